#pragma once

#include "autocrop/tensor.hpp"

namespace autocrop {

struct ResizeInfo {
    double scale = 1.0;  // resized = original * scale
    std::size_t resized_h = 0;
    std::size_t resized_w = 0;
};

// Bilinear resize of a [C,H,W] image so that min(H,W) == target_min_side.
// Both extents are scaled by the same factor and rounded to nearest.
std::pair<Tensor, ResizeInfo> bilinear_resize(const Tensor& image, std::size_t target_min_side);

// Zero-pads a [C,H,W] tensor on the bottom/right so both spatial extents are
// multiples of `multiple`.
Tensor pad_to_multiple(const Tensor& image, std::size_t multiple);

}  // namespace autocrop
