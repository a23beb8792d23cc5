#include "autocrop/networks.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "autocrop/layers.hpp"

namespace autocrop {

namespace {

// fan-in scaled uniform init; preserves activation variance through the
// ReLU stacks better than fan-average scaling at these depths
Tensor uniform_init(std::vector<std::size_t> shape, std::size_t fan_in, std::mt19937_64& rng) {
    const double r = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-r, r);
    Tensor t(std::move(shape));
    for (double& v : t.values()) v = dist(rng);
    return t;
}

void add_conv(ParamStore& store, const std::string& name, std::size_t out, std::size_t in,
              std::size_t k, std::mt19937_64& rng) {
    store.insert(name + ".weight", uniform_init({out, in, k, k}, in * k * k, rng));
    store.insert(name + ".bias", Tensor({out}));
}

void add_linear(ParamStore& store, const std::string& name, std::size_t out, std::size_t in,
                std::mt19937_64& rng) {
    store.insert(name + ".weight", uniform_init({out, in}, in, rng));
    store.insert(name + ".bias", Tensor({out}));
}

ag::Var conv_block(const ag::Var& x, const VarMap& p, const std::string& name, bool pool) {
    ag::Var out = ag::relu(ag::conv2d(x, p.at(name + ".weight"), p.at(name + ".bias"), 1));
    return pool ? ag::maxpool2x2(out) : out;
}

}  // namespace

ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    ParamStore store;
    const std::size_t A = cfg.anchors_per_cell();
    add_conv(store, "conv1", cfg.c1, 3, 3, rng);
    add_conv(store, "conv2", cfg.c2, cfg.c1, 3, rng);
    add_conv(store, "abp.conv3", cfg.abp_c3, cfg.c2, 3, rng);
    add_conv(store, "abp.conv4", cfg.abp_c4, cfg.abp_c3, 3, rng);
    add_conv(store, "abp.conv5", cfg.abp_c5, cfg.abp_c4, 3, rng);
    add_conv(store, "abp.head", cfg.head_dim, cfg.abp_c5, 3, rng);
    add_conv(store, "abp.cls", 2 * A, cfg.head_dim, 1, rng);
    add_conv(store, "abp.reg", 4 * A, cfg.head_dim, 1, rng);
    add_conv(store, "aa.conv3", cfg.aa_c3, cfg.c2, 3, rng);
    add_conv(store, "aa.conv4", cfg.aa_c4, cfg.aa_c3, 3, rng);
    add_linear(store, "aa.fc1", cfg.fc_hidden, cfg.aa_c4 * cfg.roi_bins * cfg.roi_bins, rng);
    add_linear(store, "aa.fc2", 2, cfg.fc_hidden, rng);
    return store;
}

ag::Var shared_trunk(const ag::Var& image, const VarMap& params, const ModelConfig&) {
    if (image->value.rank() != 3 || image->value.extent(0) != 3) {
        throw std::invalid_argument("shared_trunk: expected [3,H,W], got " +
                                    image->value.shape_str());
    }
    ag::Var x = conv_block(image, params, "conv1", true);
    return conv_block(x, params, "conv2", true);
}

AbpOutput abp_from_shared(const ag::Var& shared_feat, const VarMap& params,
                          const ModelConfig& cfg) {
    ag::Var x = conv_block(shared_feat, params, "abp.conv3", true);
    x = conv_block(x, params, "abp.conv4", true);
    x = conv_block(x, params, "abp.conv5", false);
    ag::Var head =
        ag::relu(ag::conv2d(x, params.at("abp.head.weight"), params.at("abp.head.bias"), 1));
    ag::Var cls = ag::conv2d(head, params.at("abp.cls.weight"), params.at("abp.cls.bias"), 0);
    ag::Var reg = ag::conv2d(head, params.at("abp.reg.weight"), params.at("abp.reg.bias"), 0);
    const std::size_t A = cfg.anchors_per_cell();
    AbpOutput out;
    out.fh = head->value.extent(1);
    out.fw = head->value.extent(2);
    out.scores = ag::anchor_rows(cls, A, 2);
    out.deltas = ag::anchor_rows(reg, A, 4);
    return out;
}

AbpOutput abp_forward(const ag::Var& image, const VarMap& params, const ModelConfig& cfg) {
    const std::size_t H = image->value.extent(1), W = image->value.extent(2);
    if (H % 16 != 0 || W % 16 != 0) {
        throw std::invalid_argument("abp_forward: extents must be multiples of 16, got " +
                                    image->value.shape_str());
    }
    return abp_from_shared(shared_trunk(image, params, cfg), params, cfg);
}

ag::Var abp_loss(const AbpOutput& out, const MatchResult& match, const AnchorGrid& grid,
                 std::uint64_t sample_seed) {
    if (match.labels.size() != out.scores->value.extent(0) ||
        match.labels.size() != grid.boxes.size()) {
        throw std::invalid_argument("abp_loss: anchor count mismatch");
    }
    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < match.labels.size(); ++i) {
        if (match.labels[i] == AnchorLabel::Positive) positives.push_back(i);
        if (match.labels[i] == AnchorLabel::Negative) negatives.push_back(i);
    }
    if (positives.empty() && negatives.empty()) {
        throw std::invalid_argument("abp_loss: no positive or negative anchors");
    }
    // subsample negatives to at most 3x the positives (min 16)
    const std::size_t keep =
        std::min(negatives.size(), std::max<std::size_t>(16, 3 * positives.size()));
    std::mt19937_64 rng(sample_seed);
    std::shuffle(negatives.begin(), negatives.end(), rng);
    negatives.resize(keep);
    std::sort(negatives.begin(), negatives.end());

    std::vector<std::pair<std::size_t, int>> cls_items;
    for (std::size_t i : positives) cls_items.emplace_back(i, 1);
    for (std::size_t i : negatives) cls_items.emplace_back(i, 0);
    ag::Var l_cls = ag::softmax_cross_entropy(out.scores, cls_items);

    if (positives.empty()) return l_cls;
    const BoxCXCYWH gt = to_cxcywh(match.matched_gt);
    std::vector<ag::RegressionTarget> reg_targets;
    for (std::size_t i : positives) {
        const BoxDelta d = encode_box(gt, grid.boxes[i]);
        reg_targets.push_back({i, {d.tx, d.ty, d.tw, d.th}});
    }
    return ag::add(l_cls, ag::smooth_l1_loss(out.deltas, reg_targets));
}

BoxCorners select_initial_crop(const Tensor& scores, const Tensor& deltas, const AnchorGrid& grid,
                               int image_w, int image_h) {
    const std::size_t N = grid.boxes.size();
    if (scores.rank() != 2 || scores.extent(0) != N || deltas.extent(0) != N) {
        throw std::invalid_argument("select_initial_crop: output/anchor count mismatch");
    }
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double p1 = ag::softmax2(scores[i * 2 + 0], scores[i * 2 + 1]).first;
        if (p1 > best_score) {  // ties keep the lowest index
            best_score = p1;
            best = i;
        }
    }
    const BoxDelta d{deltas[best * 4 + 0], deltas[best * 4 + 1], deltas[best * 4 + 2],
                     deltas[best * 4 + 3]};
    auto clip = [&](BoxCorners b) {
        b.x0 = std::clamp(b.x0, 0, image_w);
        b.x1 = std::clamp(b.x1, 0, image_w);
        b.y0 = std::clamp(b.y0, 0, image_h);
        b.y1 = std::clamp(b.y1, 0, image_h);
        return b;
    };
    BoxCorners box = clip(to_corners(decode_box(d, grid.boxes[best])));
    if (!box.valid()) box = clip(to_corners(grid.boxes[best]));
    if (!box.valid()) box = {0, 0, image_w, image_h};  // anchor fully outside
    return box;
}

ag::Var aa_features_from_shared(const ag::Var& shared_feat, const VarMap& params,
                                const ModelConfig&) {
    ag::Var x = conv_block(shared_feat, params, "aa.conv3", true);
    return conv_block(x, params, "aa.conv4", false);
}

ag::Var aa_features(const ag::Var& image, const VarMap& params, const ModelConfig& cfg) {
    const std::size_t H = image->value.extent(1), W = image->value.extent(2);
    if (H % 8 != 0 || W % 8 != 0) {
        throw std::invalid_argument("aa_features: extents must be multiples of 8, got " +
                                    image->value.shape_str());
    }
    return aa_features_from_shared(shared_trunk(image, params, cfg), params, cfg);
}

ag::Var aa_logits(const ag::Var& feat8, const std::vector<std::array<int, 4>>& candidates,
                  const VarMap& params, const ModelConfig& cfg) {
    if (candidates.empty()) throw std::invalid_argument("aa_logits: empty candidate set");
    ag::Var pooled = ag::roi_pool(feat8, candidates, cfg.roi_bins, cfg.aa_stride);
    ag::Var flat = ag::flatten_rows(pooled);
    ag::Var hidden =
        ag::relu(ag::linear(flat, params.at("aa.fc1.weight"), params.at("aa.fc1.bias")));
    return ag::linear(hidden, params.at("aa.fc2.weight"), params.at("aa.fc2.bias"));
}

ag::Var aa_loss(const ag::Var& logits, const std::vector<int>& labels) {
    if (labels.size() != logits->value.extent(0)) {
        throw std::invalid_argument("aa_loss: one label required per scored sample");
    }
    std::vector<std::pair<std::size_t, int>> items;
    for (std::size_t i = 0; i < labels.size(); ++i) items.emplace_back(i, labels[i]);
    return ag::softmax_cross_entropy(logits, items);
}

std::map<std::string, Tensor> collect_grads(const VarMap& params) {
    std::map<std::string, Tensor> grads;
    for (const auto& [name, var] : params) {
        if (var->requires_grad) grads.emplace(name, ag::grad_of(var));
    }
    return grads;
}

}  // namespace autocrop
