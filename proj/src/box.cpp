#include "autocrop/box.hpp"

#include <algorithm>

namespace autocrop {

double iou(const BoxCorners& a, const BoxCorners& b) {
    const long long ix = std::max(0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
    const long long iy = std::max(0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
    const long long inter = ix * iy;
    const long long uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

double iou(const RectD& a, const RectD& b) {
    const double ix = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
    const double iy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
    const double inter = ix * iy;
    const double uni = (a.x1 - a.x0) * (a.y1 - a.y0) + (b.x1 - b.x0) * (b.y1 - b.y0) - inter;
    return uni > 0 ? inter / uni : 0.0;
}

}  // namespace autocrop
