#pragma once

#include <functional>
#include <vector>

#include "autocrop/autograd.hpp"
#include "autocrop/tensor.hpp"

namespace autocrop {

// Builds a scalar loss graph from leaf variables created over `point`.
using GraphBuilder = std::function<ag::Var(const std::vector<ag::Var>&)>;

struct GradCheckOptions {
    double h = 1e-5;
    // 0 checks every coordinate; otherwise a seeded subset per tensor.
    std::size_t max_coords_per_tensor = 0;
    std::uint64_t seed = 0;
};

// Compares the tape gradient against central finite differences at `point`.
// Returns max over checked coordinates of |analytic - numeric| /
// max(1, |analytic|, |numeric|).
double grad_check(const GraphBuilder& build, std::vector<Tensor> point,
                  const GradCheckOptions& opts = {});

}  // namespace autocrop
