#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace autocrop {

// Half-open pixel rectangle [x0,x1) x [y0,y1), origin top-left, y downward.
struct BoxCorners {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    long long area() const { return static_cast<long long>(width()) * height(); }
    bool valid() const { return x0 >= 0 && y0 >= 0 && x1 > x0 && y1 > y0; }

    bool contains(const BoxCorners& inner) const {
        return x0 <= inner.x0 && y0 <= inner.y0 && x1 >= inner.x1 && y1 >= inner.y1;
    }

    friend bool operator==(const BoxCorners&, const BoxCorners&) = default;

    std::string str() const {
        return "(" + std::to_string(x0) + "," + std::to_string(y0) + "," + std::to_string(x1) +
               "," + std::to_string(y1) + ")";
    }
};

// Center/extent box in continuous pixel coordinates.
struct BoxCXCYWH {
    double cx = 0, cy = 0, bw = 0, bh = 0;
};

inline BoxCXCYWH to_cxcywh(const BoxCorners& b) {
    return {(b.x0 + b.x1) / 2.0, (b.y0 + b.y1) / 2.0, static_cast<double>(b.x1 - b.x0),
            static_cast<double>(b.y1 - b.y0)};
}

inline BoxCorners to_corners(const BoxCXCYWH& b) {
    if (b.bw <= 0 || b.bh <= 0) {
        throw std::invalid_argument("to_corners: non-positive extents");
    }
    return {static_cast<int>(std::lround(b.cx - b.bw / 2.0)),
            static_cast<int>(std::lround(b.cy - b.bh / 2.0)),
            static_cast<int>(std::lround(b.cx + b.bw / 2.0)),
            static_cast<int>(std::lround(b.cy + b.bh / 2.0))};
}

double iou(const BoxCorners& a, const BoxCorners& b);

// Continuous-coordinate rectangle, used for anchor/groundtruth overlap where
// anchors have fractional corners.
struct RectD {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

inline RectD to_rect(const BoxCXCYWH& b) {
    return {b.cx - b.bw / 2.0, b.cy - b.bh / 2.0, b.cx + b.bw / 2.0, b.cy + b.bh / 2.0};
}
inline RectD to_rect(const BoxCorners& b) {
    return {static_cast<double>(b.x0), static_cast<double>(b.y0), static_cast<double>(b.x1),
            static_cast<double>(b.y1)};
}

double iou(const RectD& a, const RectD& b);

}  // namespace autocrop
