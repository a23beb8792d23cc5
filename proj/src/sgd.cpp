#include "autocrop/sgd.hpp"

namespace autocrop {

void SgdOptimizer::step(ParamStore& params, const std::map<std::string, Tensor>& grads,
                        double lr) {
    for (auto& [name, w] : params.entries()) {
        auto git = grads.find(name);
        if (git == grads.end()) continue;  // parameter untouched this step
        const Tensor& g = git->second;
        if (!g.same_shape(w)) {
            throw std::invalid_argument("sgd_step: gradient shape " + g.shape_str() +
                                        " misaligned with parameter '" + name + "' " +
                                        w.shape_str());
        }
        auto vit = velocity_.find(name);
        if (vit == velocity_.end()) {
            vit = velocity_.emplace(name, Tensor(w.shape())).first;
        }
        Tensor& v = vit->second;
        for (std::size_t i = 0; i < w.numel(); ++i) {
            v[i] = momentum_ * v[i] + g[i] + weight_decay_ * w[i];
            w[i] -= lr * v[i];
        }
    }
}

}  // namespace autocrop
