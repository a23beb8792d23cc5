#include "autocrop/resize.hpp"

#include <algorithm>
#include <cmath>

namespace autocrop {

std::pair<Tensor, ResizeInfo> bilinear_resize(const Tensor& image, std::size_t target_min_side) {
    if (image.rank() != 3) {
        throw std::invalid_argument("bilinear_resize: expected [C,H,W], got " + image.shape_str());
    }
    const std::size_t C = image.extent(0), H = image.extent(1), W = image.extent(2);
    if (H < 2 || W < 2) {
        throw std::invalid_argument("bilinear_resize: degenerate image " + image.shape_str());
    }
    const double s = static_cast<double>(target_min_side) / static_cast<double>(std::min(H, W));
    ResizeInfo info;
    info.scale = s;
    if (H <= W) {
        info.resized_h = target_min_side;
        info.resized_w = static_cast<std::size_t>(std::llround(W * s));
    } else {
        info.resized_w = target_min_side;
        info.resized_h = static_cast<std::size_t>(std::llround(H * s));
    }
    if (s == 1.0) return {image, info};

    const std::size_t OH = info.resized_h, OW = info.resized_w;
    Tensor out({C, OH, OW});
    for (std::size_t oy = 0; oy < OH; ++oy) {
        // pixel-center alignment: src = (dst + 0.5)/s - 0.5
        const double sy = std::clamp((oy + 0.5) / s - 0.5, 0.0, static_cast<double>(H - 1));
        const std::size_t y0 = static_cast<std::size_t>(sy);
        const std::size_t y1 = std::min(y0 + 1, H - 1);
        const double fy = sy - static_cast<double>(y0);
        for (std::size_t ox = 0; ox < OW; ++ox) {
            const double sx = std::clamp((ox + 0.5) / s - 0.5, 0.0, static_cast<double>(W - 1));
            const std::size_t x0 = static_cast<std::size_t>(sx);
            const std::size_t x1 = std::min(x0 + 1, W - 1);
            const double fx = sx - static_cast<double>(x0);
            for (std::size_t c = 0; c < C; ++c) {
                const double* p = image.data() + c * H * W;
                const double v = (1 - fy) * ((1 - fx) * p[y0 * W + x0] + fx * p[y0 * W + x1]) +
                                 fy * ((1 - fx) * p[y1 * W + x0] + fx * p[y1 * W + x1]);
                out[(c * OH + oy) * OW + ox] = v;
            }
        }
    }
    return {std::move(out), info};
}

Tensor pad_to_multiple(const Tensor& image, std::size_t multiple) {
    if (image.rank() != 3) {
        throw std::invalid_argument("pad_to_multiple: expected [C,H,W], got " + image.shape_str());
    }
    const std::size_t C = image.extent(0), H = image.extent(1), W = image.extent(2);
    const std::size_t PH = (H + multiple - 1) / multiple * multiple;
    const std::size_t PW = (W + multiple - 1) / multiple * multiple;
    if (PH == H && PW == W) return image;
    Tensor out({C, PH, PW});
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t y = 0; y < H; ++y) {
            const double* src = image.data() + (c * H + y) * W;
            double* dst = out.data() + (c * PH + y) * PW;
            std::copy(src, src + W, dst);
        }
    }
    return out;
}

}  // namespace autocrop
