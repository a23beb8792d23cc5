#pragma once

#include <map>
#include <string>

#include "autocrop/param_store.hpp"
#include "autocrop/tensor.hpp"

namespace autocrop {

// Momentum SGD with decoupled-from-nothing classic weight decay:
//   v <- momentum*v + grad + weight_decay*w ;  w <- w - lr*v
// Velocity persists across steps, keyed by parameter name.
class SgdOptimizer {
public:
    SgdOptimizer(double momentum, double weight_decay)
        : momentum_(momentum), weight_decay_(weight_decay) {}

    void step(ParamStore& params, const std::map<std::string, Tensor>& grads, double lr);

    double momentum() const { return momentum_; }
    double weight_decay() const { return weight_decay_; }

private:
    double momentum_;
    double weight_decay_;
    std::map<std::string, Tensor> velocity_;
};

}  // namespace autocrop
