#pragma once

#include <string>

#include "autocrop/autograd.hpp"
#include "autocrop/param_store.hpp"
#include "autocrop/tensor.hpp"

namespace autocrop {

enum class LayerKind { Conv3x3, MaxPool2x2, Relu, Linear };

// One trunk/head building block. `name` resolves "<name>.weight" /
// "<name>.bias" in a ParamStore for layers that carry parameters.
struct LayerSpec {
    LayerKind kind;
    std::string name;
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t stride = 1;   // conv only; fixed at 1
    std::size_t padding = 1;  // conv only; fixed at 1

    static LayerSpec conv3x3(std::string name, std::size_t in, std::size_t out) {
        return {LayerKind::Conv3x3, std::move(name), in, out, 1, 1};
    }
    static LayerSpec maxpool() { return {LayerKind::MaxPool2x2, "", 0, 0}; }
    static LayerSpec relu() { return {LayerKind::Relu, "", 0, 0}; }
    static LayerSpec linear(std::string name, std::size_t in, std::size_t out) {
        return {LayerKind::Linear, std::move(name), in, out};
    }
};

// Inference-path layer application (no gradient recording).
Tensor forward_layer(const LayerSpec& spec, const Tensor& input, const ParamStore& params);

// Tape-recorded equivalent over a bound parameter set.
ag::Var forward_layer(const LayerSpec& spec, const ag::Var& input,
                      const std::map<std::string, ag::Var>& params);

// Binds every ParamStore entry to a leaf Var (shared per name).
std::map<std::string, ag::Var> bind_params(const ParamStore& store, bool requires_grad);

}  // namespace autocrop
