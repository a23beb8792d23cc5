#include "autocrop/window_search.hpp"

#include <array>
#include <stdexcept>

namespace autocrop {

void AttentionMap::validate() const {
    if (w == 0 || h == 0 || values.size() != w * h) {
        throw std::invalid_argument("AttentionMap: inconsistent extents");
    }
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("AttentionMap: value outside [0,1]");
        }
    }
}

double AttentionMap::total_mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

std::vector<double> integral_image(const AttentionMap& map) {
    map.validate();
    const std::size_t w = map.w, h = map.h;
    std::vector<double> S((w + 1) * (h + 1), 0.0);
    for (std::size_t y = 0; y < h; ++y) {
        double row = 0.0;
        for (std::size_t x = 0; x < w; ++x) {
            row += map.at(x, y);
            S[(y + 1) * (w + 1) + (x + 1)] = S[y * (w + 1) + (x + 1)] + row;
        }
    }
    return S;
}

double window_mass(const std::vector<double>& prefix, std::size_t map_w, std::size_t map_h,
                   const BoxCorners& box) {
    if (!box.valid() || box.x1 > static_cast<int>(map_w) || box.y1 > static_cast<int>(map_h)) {
        throw std::invalid_argument("window_mass: box " + box.str() + " out of bounds for " +
                                    std::to_string(map_w) + "x" + std::to_string(map_h));
    }
    const std::size_t W = map_w + 1;
    return prefix[box.y1 * W + box.x1] - prefix[box.y0 * W + box.x1] -
           prefix[box.y1 * W + box.x0] + prefix[box.y0 * W + box.x0];
}

namespace {

using Key = std::array<long long, 5>;  // (area, y0, x0, y1, x1)

Key key_of(int y0, int x0, int y1, int x1) {
    return {static_cast<long long>(x1 - x0) * (y1 - y0), y0, x0, y1, x1};
}

double qualify_threshold(const AttentionMap& map, const SearchConfig& cfg,
                         const std::vector<double>& prefix) {
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
        throw std::invalid_argument("window search: lambda outside [0,1]");
    }
    const double total = prefix[(map.h + 1) * (map.w + 1) - 1];
    if (!(total > 0.0)) throw std::invalid_argument("window search: attention map has zero mass");
    return cfg.lambda * total;
}

[[noreturn]] void no_window() {
    throw std::runtime_error("window search: no qualifying window (lambda too high)");
}

}  // namespace

BoxCorners min_area_window_bruteforce(const AttentionMap& map, const SearchConfig& cfg) {
    const auto prefix = integral_image(map);
    const double thresh = qualify_threshold(map, cfg, prefix);
    const int w = static_cast<int>(map.w), h = static_cast<int>(map.h);
    const std::size_t W = map.w + 1;

    bool found = false;
    Key best{};
    for (int y0 = 0; y0 < h; ++y0) {
        for (int y1 = y0 + 1; y1 <= h; ++y1) {
            for (int x0 = 0; x0 < w; ++x0) {
                for (int x1 = x0 + 1; x1 <= w; ++x1) {
                    const double mass = prefix[y1 * W + x1] - prefix[y0 * W + x1] -
                                        prefix[y1 * W + x0] + prefix[y0 * W + x0];
                    if (mass > thresh) {
                        const Key k = key_of(y0, x0, y1, x1);
                        if (!found || k < best) {
                            best = k;
                            found = true;
                        }
                    }
                }
            }
        }
    }
    if (!found) no_window();
    return {static_cast<int>(best[2]), static_cast<int>(best[1]), static_cast<int>(best[4]),
            static_cast<int>(best[3])};
}

BoxCorners min_area_window_fast(const AttentionMap& map, const SearchConfig& cfg) {
    const auto prefix = integral_image(map);
    const double thresh = qualify_threshold(map, cfg, prefix);
    const int w = static_cast<int>(map.w), h = static_cast<int>(map.h);
    const std::size_t W = map.w + 1;

    auto mass = [&](int y0, int x0, int y1, int x1) {
        return prefix[y1 * W + x1] - prefix[y0 * W + x1] - prefix[y1 * W + x0] +
               prefix[y0 * W + x0];
    };

    bool found = false;
    Key best{};
    for (int y0 = 0; y0 < h; ++y0) {
        for (int y1 = y0 + 1; y1 <= h; ++y1) {
            // Minimal qualifying x1 is nondecreasing in x0 (mass is
            // nonincreasing when the left edge moves right), so the column
            // window advances with two pointers in O(w) per row pair.
            int x1 = 1;
            for (int x0 = 0; x0 < w; ++x0) {
                if (x1 < x0 + 1) x1 = x0 + 1;
                while (x1 <= w && !(mass(y0, x0, y1, x1) > thresh)) ++x1;
                if (x1 > w) break;  // wider starts cannot qualify either
                const Key k = key_of(y0, x0, y1, x1);
                if (!found || k < best) {
                    best = k;
                    found = true;
                }
            }
        }
    }
    if (!found) no_window();
    return {static_cast<int>(best[2]), static_cast<int>(best[1]), static_cast<int>(best[4]),
            static_cast<int>(best[3])};
}

}  // namespace autocrop
