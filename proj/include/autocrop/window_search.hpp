#pragma once

#include <vector>

#include "autocrop/box.hpp"

namespace autocrop {

// Per-pixel visual-importance grid, values in [0,1], row-major.
struct AttentionMap {
    std::size_t w = 0, h = 0;
    std::vector<double> values;

    AttentionMap() = default;
    AttentionMap(std::size_t w_, std::size_t h_, double fill = 0.0)
        : w(w_), h(h_), values(w_ * h_, fill) {}

    double& at(std::size_t x, std::size_t y) { return values[y * w + x]; }
    double at(std::size_t x, std::size_t y) const { return values[y * w + x]; }

    void validate() const;
    double total_mass() const;
};

struct SearchConfig {
    double lambda = 0.9;  // fraction of total mass a qualifying window must exceed
};

// (h+1)x(w+1) prefix-sum grid: S[y][x] = sum of P over [0,x) x [0,y).
std::vector<double> integral_image(const AttentionMap& map);

double window_mass(const std::vector<double>& prefix, std::size_t map_w, std::size_t map_h,
                   const BoxCorners& box);

// Minimum-area window whose mass strictly exceeds lambda * total mass.
// Ties broken lexicographically by (y0, x0, y1, x1). The brute-force version
// enumerates every rectangle; the fast one sweeps row pairs with a
// two-pointer column window and returns the identical box.
BoxCorners min_area_window_bruteforce(const AttentionMap& map, const SearchConfig& cfg);
BoxCorners min_area_window_fast(const AttentionMap& map, const SearchConfig& cfg);

}  // namespace autocrop
