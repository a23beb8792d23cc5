#include "autocrop/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "autocrop/layers.hpp"
#include "autocrop/networks.hpp"
#include "autocrop/resize.hpp"

namespace autocrop {

std::vector<int> top_left_offsets() { return {-40, -32, -24, -16, -8, 0}; }
std::vector<int> bottom_right_offsets() { return {0, 8, 16, 24, 32, 40}; }

CropCandidateSet gen_candidates(const BoxCorners& initial, int image_w, int image_h) {
    if (!initial.valid() || initial.x1 > image_w || initial.y1 > image_h) {
        throw std::invalid_argument("gen_candidates: initial crop " + initial.str() +
                                    " outside image bounds");
    }
    const auto tl = top_left_offsets();
    const auto br = bottom_right_offsets();
    CropCandidateSet set;
    set.initial = initial;
    std::set<std::array<int, 4>> seen;
    for (int dy0 : tl) {
        for (int dx0 : tl) {
            for (int dy1 : br) {
                for (int dx1 : br) {
                    BoxCorners c{std::max(0, initial.x0 + dx0), std::max(0, initial.y0 + dy0),
                                 std::min(image_w, initial.x1 + dx1),
                                 std::min(image_h, initial.y1 + dy1)};
                    if (seen.insert({c.x0, c.y0, c.x1, c.y1}).second) {
                        set.candidates.push_back(c);
                    }
                }
            }
        }
    }
    return set;
}

BoxCorners scale_box(const BoxCorners& box, double scale, int target_w, int target_h) {
    if (!(scale > 0.0)) throw std::invalid_argument("scale_box: scale must be positive");
    BoxCorners out{static_cast<int>(std::lround(box.x0 / scale)),
                   static_cast<int>(std::lround(box.y0 / scale)),
                   static_cast<int>(std::lround(box.x1 / scale)),
                   static_cast<int>(std::lround(box.y1 / scale))};
    out.x0 = std::clamp(out.x0, 0, target_w);
    out.x1 = std::clamp(out.x1, 0, target_w);
    out.y0 = std::clamp(out.y0, 0, target_h);
    out.y1 = std::clamp(out.y1, 0, target_h);
    if (!out.valid()) {
        throw std::invalid_argument("scale_box: degenerate result for box " + box.str());
    }
    return out;
}

CropResult crop_image(const Tensor& image, const ParamStore& params, const ModelConfig& cfg) {
    if (image.rank() != 3 || image.extent(0) != 3) {
        throw std::invalid_argument("crop_image: expected [3,H,W] image, got " +
                                    image.shape_str());
    }
    const int orig_h = static_cast<int>(image.extent(1));
    const int orig_w = static_cast<int>(image.extent(2));
    if (std::min(orig_h, orig_w) < 32) {
        throw std::invalid_argument("crop_image: image smaller than 32px min side");
    }

    auto [resized, info] = bilinear_resize(image, cfg.min_side);
    const int rw = static_cast<int>(info.resized_w);
    const int rh = static_cast<int>(info.resized_h);
    const Tensor padded = pad_to_multiple(resized, 16);

    const VarMap vars = bind_params(params, false);
    const ag::Var shared = shared_trunk(ag::leaf(padded), vars, cfg);

    const AbpOutput abp = abp_from_shared(shared, vars, cfg);
    const AnchorGrid grid = gen_anchors(abp.fh, abp.fw, cfg.abp_stride, cfg);
    const BoxCorners initial =
        select_initial_crop(abp.scores->value, abp.deltas->value, grid, rw, rh);

    const CropCandidateSet cands = gen_candidates(initial, rw, rh);
    std::vector<std::array<int, 4>> boxes;
    boxes.reserve(cands.candidates.size());
    for (const BoxCorners& c : cands.candidates) boxes.push_back({c.x0, c.y0, c.x1, c.y1});

    const ag::Var feat8 = aa_features_from_shared(shared, vars, cfg);
    const ag::Var logits = aa_logits(feat8, boxes, vars, cfg);

    CropResult res;
    res.initial = initial;
    res.scale = info.scale;
    res.candidate_scores.reserve(cands.candidates.size());
    for (std::size_t i = 0; i < cands.candidates.size(); ++i) {
        res.candidate_scores.push_back(
            ag::softmax2(logits->value[i * 2 + 0], logits->value[i * 2 + 1]).first);
    }
    res.best_index = 0;
    for (std::size_t i = 1; i < res.candidate_scores.size(); ++i) {
        if (res.candidate_scores[i] > res.candidate_scores[res.best_index]) res.best_index = i;
    }
    res.final_crop = cands.candidates[res.best_index];
    res.initial_original = scale_box(res.initial, res.scale, orig_w, orig_h);
    res.final_original = scale_box(res.final_crop, res.scale, orig_w, orig_h);
    return res;
}

std::string crop_result_json(const CropResult& r) {
    nlohmann::json j;
    j["initial"] = {r.initial.x0, r.initial.y0, r.initial.x1, r.initial.y1};
    j["final"] = {r.final_crop.x0, r.final_crop.y0, r.final_crop.x1, r.final_crop.y1};
    j["initial_original"] = {r.initial_original.x0, r.initial_original.y0, r.initial_original.x1,
                             r.initial_original.y1};
    j["final_original"] = {r.final_original.x0, r.final_original.y0, r.final_original.x1,
                           r.final_original.y1};
    j["scale"] = r.scale;
    j["num_candidates"] = r.candidate_scores.size();
    j["best_score"] = r.candidate_scores[r.best_index];
    return j.dump();
}

ImageU8 draw_crop_overlay(const ImageU8& image, const BoxCorners& box) {
    ImageU8 out = image;
    const int w = static_cast<int>(image.w), h = static_cast<int>(image.h);
    auto paint = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        out.at(x, y, 0) = 255;
        out.at(x, y, 1) = 220;
        out.at(x, y, 2) = 0;
    };
    for (int t = 0; t < 2; ++t) {
        for (int x = box.x0; x < box.x1; ++x) {
            paint(x, box.y0 + t);
            paint(x, box.y1 - 1 - t);
        }
        for (int y = box.y0; y < box.y1; ++y) {
            paint(box.x0 + t, y);
            paint(box.x1 - 1 - t, y);
        }
    }
    return out;
}

}  // namespace autocrop
