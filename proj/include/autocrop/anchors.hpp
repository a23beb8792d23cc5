#pragma once

#include <vector>

#include "autocrop/box.hpp"
#include "autocrop/model_config.hpp"

namespace autocrop {

// Default boxes over a feature grid. Ordering is row-major over locations,
// then scale, then ratio; centers sit at (stride*(x+0.5), stride*(y+0.5)).
// Anchors are not clipped to the image.
struct AnchorGrid {
    std::size_t fh = 0, fw = 0;
    std::size_t stride = 0;
    std::vector<BoxCXCYWH> boxes;
};

AnchorGrid gen_anchors(std::size_t fh, std::size_t fw, std::size_t stride,
                       const ModelConfig& cfg);

enum class AnchorLabel : std::uint8_t { Negative = 0, Positive = 1, Ignore = 2 };

struct MatchResult {
    std::vector<AnchorLabel> labels;
    std::vector<double> ious;
    BoxCorners matched_gt;
    std::size_t forced_index = 0;  // argmax-IoU anchor, always positive
};

// IoU >= pos_iou (or argmax over the grid) -> positive; IoU < neg_iou and not
// forced -> negative; everything else ignored.
MatchResult match_anchors(const AnchorGrid& grid, const BoxCorners& gt, const ModelConfig& cfg);

// Center-normalized, log-extent offsets of a box relative to its anchor.
struct BoxDelta {
    double tx = 0, ty = 0, tw = 0, th = 0;
};

BoxDelta encode_box(const BoxCXCYWH& gt, const BoxCXCYWH& anchor);
BoxCXCYWH decode_box(const BoxDelta& delta, const BoxCXCYWH& anchor);

}  // namespace autocrop
