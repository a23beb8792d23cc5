#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "autocrop/anchors.hpp"
#include "autocrop/autograd.hpp"
#include "autocrop/model_config.hpp"
#include "autocrop/param_store.hpp"

namespace autocrop {

using VarMap = std::map<std::string, ag::Var>;

// Seeded uniform init, range sqrt(6/(fan_in+fan_out)); biases zero.
ParamStore init_params(const ModelConfig& cfg, std::uint64_t seed);

// conv1/conv2 blocks shared by both branches; output stride 4.
ag::Var shared_trunk(const ag::Var& image, const VarMap& params, const ModelConfig& cfg);

// Per-anchor class logits (column 0 = attention-box class) and box deltas.
struct AbpOutput {
    ag::Var scores;  // [N,2]
    ag::Var deltas;  // [N,4]
    std::size_t fh = 0, fw = 0;
};

AbpOutput abp_from_shared(const ag::Var& shared_feat, const VarMap& params,
                          const ModelConfig& cfg);
// image [3,H,W], H and W multiples of 16
AbpOutput abp_forward(const ag::Var& image, const VarMap& params, const ModelConfig& cfg);

// Eq.-style detector loss: mean softmax cross-entropy over sampled anchors
// plus mean smooth-L1 over positive anchors' encoded offsets.
ag::Var abp_loss(const AbpOutput& out, const MatchResult& match, const AnchorGrid& grid,
                 std::uint64_t sample_seed);

// Highest-scoring anchor decoded, clipped to the image and rounded; falls
// back to the clipped anchor when the decoded box degenerates.
BoxCorners select_initial_crop(const Tensor& scores, const Tensor& deltas, const AnchorGrid& grid,
                               int image_w, int image_h);

// Aesthetics branch: stride-8 feature map, then RoI-pooled classifier.
ag::Var aa_features_from_shared(const ag::Var& shared_feat, const VarMap& params,
                                const ModelConfig& cfg);
ag::Var aa_features(const ag::Var& image, const VarMap& params, const ModelConfig& cfg);
// One trunk pass serves every candidate; returns [N,2] logits.
ag::Var aa_logits(const ag::Var& feat8, const std::vector<std::array<int, 4>>& candidates,
                  const VarMap& params, const ModelConfig& cfg);

// Eq.-style softmax loss: mean over samples of -log(true-class probability).
ag::Var aa_loss(const ag::Var& logits, const std::vector<int>& labels);

// Collects accumulated leaf gradients for the optimizer.
std::map<std::string, Tensor> collect_grads(const VarMap& params);

}  // namespace autocrop
