#include "autocrop/anchors.hpp"

#include <cmath>
#include <stdexcept>

namespace autocrop {

void ModelConfig::validate() const {
    if (anchor_scales.empty() || anchor_ratios.empty()) {
        throw std::invalid_argument("ModelConfig: anchor scales/ratios must be non-empty");
    }
    if (!(pos_iou > neg_iou)) {
        throw std::invalid_argument("ModelConfig: pos_iou must exceed neg_iou");
    }
    for (double r : anchor_ratios) {
        if (!(r > 0.0)) throw std::invalid_argument("ModelConfig: non-positive anchor ratio");
    }
}

AnchorGrid gen_anchors(std::size_t fh, std::size_t fw, std::size_t stride,
                       const ModelConfig& cfg) {
    if (fh == 0 || fw == 0 || stride == 0) {
        throw std::invalid_argument("gen_anchors: extents and stride must be positive");
    }
    cfg.validate();
    AnchorGrid grid;
    grid.fh = fh;
    grid.fw = fw;
    grid.stride = stride;
    grid.boxes.reserve(fh * fw * cfg.anchors_per_cell());
    const auto s = static_cast<double>(stride);
    for (std::size_t y = 0; y < fh; ++y) {
        for (std::size_t x = 0; x < fw; ++x) {
            const double cx = s * (static_cast<double>(x) + 0.5);
            const double cy = s * (static_cast<double>(y) + 0.5);
            for (double scale : cfg.anchor_scales) {
                for (double ratio : cfg.anchor_ratios) {
                    // area-preserving: w = scale*sqrt(ratio), h = scale/sqrt(ratio)
                    const double sr = std::sqrt(ratio);
                    grid.boxes.push_back({cx, cy, scale * sr, scale / sr});
                }
            }
        }
    }
    return grid;
}

MatchResult match_anchors(const AnchorGrid& grid, const BoxCorners& gt, const ModelConfig& cfg) {
    if (!gt.valid()) throw std::invalid_argument("match_anchors: invalid groundtruth box");
    if (grid.boxes.empty()) throw std::invalid_argument("match_anchors: empty anchor grid");
    MatchResult res;
    res.matched_gt = gt;
    res.labels.resize(grid.boxes.size());
    res.ious.resize(grid.boxes.size());
    const RectD g = to_rect(gt);
    double best = -1.0;
    for (std::size_t i = 0; i < grid.boxes.size(); ++i) {
        const double v = iou(to_rect(grid.boxes[i]), g);
        res.ious[i] = v;
        if (v > best) {  // first index wins ties
            best = v;
            res.forced_index = i;
        }
    }
    for (std::size_t i = 0; i < grid.boxes.size(); ++i) {
        if (res.ious[i] >= cfg.pos_iou || i == res.forced_index) {
            res.labels[i] = AnchorLabel::Positive;
        } else if (res.ious[i] < cfg.neg_iou) {
            res.labels[i] = AnchorLabel::Negative;
        } else {
            res.labels[i] = AnchorLabel::Ignore;
        }
    }
    return res;
}

BoxDelta encode_box(const BoxCXCYWH& gt, const BoxCXCYWH& anchor) {
    if (gt.bw <= 0 || gt.bh <= 0 || anchor.bw <= 0 || anchor.bh <= 0) {
        throw std::invalid_argument("encode_box: non-positive extents");
    }
    return {(gt.cx - anchor.cx) / anchor.bw, (gt.cy - anchor.cy) / anchor.bh,
            std::log(gt.bw / anchor.bw), std::log(gt.bh / anchor.bh)};
}

BoxCXCYWH decode_box(const BoxDelta& delta, const BoxCXCYWH& anchor) {
    if (anchor.bw <= 0 || anchor.bh <= 0) {
        throw std::invalid_argument("decode_box: non-positive anchor extents");
    }
    return {anchor.cx + delta.tx * anchor.bw, anchor.cy + delta.ty * anchor.bh,
            anchor.bw * std::exp(delta.tw), anchor.bh * std::exp(delta.th)};
}

}  // namespace autocrop
