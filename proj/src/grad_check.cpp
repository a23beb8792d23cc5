#include "autocrop/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace autocrop {

double grad_check(const GraphBuilder& build, std::vector<Tensor> point,
                  const GradCheckOptions& opts) {
    std::vector<ag::Var> leaves;
    leaves.reserve(point.size());
    for (const Tensor& t : point) leaves.push_back(ag::leaf(t, true));
    ag::Var loss = build(leaves);
    ag::backward(loss);

    auto eval = [&](const std::vector<Tensor>& at) {
        std::vector<ag::Var> frozen;
        frozen.reserve(at.size());
        for (const Tensor& t : at) frozen.push_back(ag::leaf(t, false));
        return build(frozen)->value[0];
    };

    std::mt19937_64 rng(opts.seed);
    double worst = 0.0;
    for (std::size_t ti = 0; ti < point.size(); ++ti) {
        const std::size_t n = point[ti].numel();
        std::vector<std::size_t> coords(n);
        std::iota(coords.begin(), coords.end(), 0);
        if (opts.max_coords_per_tensor != 0 && n > opts.max_coords_per_tensor) {
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(opts.max_coords_per_tensor);
        }
        for (std::size_t ci : coords) {
            const double saved = point[ti][ci];
            point[ti][ci] = saved + opts.h;
            const double fp = eval(point);
            point[ti][ci] = saved - opts.h;
            const double fm = eval(point);
            point[ti][ci] = saved;
            const double numeric = (fp - fm) / (2.0 * opts.h);
            const double analytic = leaves[ti]->grad[ci];
            const double err = std::abs(analytic - numeric) /
                               std::max({1.0, std::abs(analytic), std::abs(numeric)});
            worst = std::max(worst, err);
        }
    }
    return worst;
}

}  // namespace autocrop
