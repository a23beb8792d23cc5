#include "autocrop/layers.hpp"

namespace autocrop {

namespace {

ag::Var lookup(const std::map<std::string, ag::Var>& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw std::out_of_range("forward_layer: missing parameter '" + key + "'");
    return it->second;
}

void check_channels(const LayerSpec& spec, const ag::Var& input) {
    if (input->value.rank() == 3 && input->value.extent(0) != spec.in_channels) {
        throw std::invalid_argument("layer '" + spec.name + "': expected " +
                                    std::to_string(spec.in_channels) + " input channels, got " +
                                    input->value.shape_str());
    }
}

}  // namespace

ag::Var forward_layer(const LayerSpec& spec, const ag::Var& input,
                      const std::map<std::string, ag::Var>& params) {
    switch (spec.kind) {
        case LayerKind::Conv3x3:
            check_channels(spec, input);
            return ag::conv2d(input, lookup(params, spec.name + ".weight"),
                              lookup(params, spec.name + ".bias"), 1);
        case LayerKind::MaxPool2x2:
            return ag::maxpool2x2(input);
        case LayerKind::Relu:
            return ag::relu(input);
        case LayerKind::Linear:
            return ag::linear(input, lookup(params, spec.name + ".weight"),
                              lookup(params, spec.name + ".bias"));
    }
    throw std::logic_error("forward_layer: unknown layer kind");
}

Tensor forward_layer(const LayerSpec& spec, const Tensor& input, const ParamStore& params) {
    std::map<std::string, ag::Var> bound;
    if (spec.kind == LayerKind::Conv3x3 || spec.kind == LayerKind::Linear) {
        bound.emplace(spec.name + ".weight", ag::leaf(params.at(spec.name + ".weight")));
        bound.emplace(spec.name + ".bias", ag::leaf(params.at(spec.name + ".bias")));
    }
    ag::Var out = forward_layer(spec, ag::leaf(input), bound);
    check_finite(out->value, "forward_layer('" + spec.name + "')");
    return out->value;
}

std::map<std::string, ag::Var> bind_params(const ParamStore& store, bool requires_grad) {
    std::map<std::string, ag::Var> bound;
    for (const auto& [name, t] : store.entries()) {
        bound.emplace(name, ag::leaf(t, requires_grad));
    }
    return bound;
}

}  // namespace autocrop
