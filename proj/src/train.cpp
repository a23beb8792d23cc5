#include <cmath>
#include <random>

#include "autocrop/harness.hpp"
#include "autocrop/layers.hpp"
#include "autocrop/networks.hpp"
#include "autocrop/resize.hpp"
#include "autocrop/sgd.hpp"

namespace autocrop {

namespace {

BoxCorners scale_gt(const BoxCorners& box, double s, int rw, int rh) {
    BoxCorners out{static_cast<int>(std::lround(box.x0 * s)),
                   static_cast<int>(std::lround(box.y0 * s)),
                   static_cast<int>(std::lround(box.x1 * s)),
                   static_cast<int>(std::lround(box.y1 * s))};
    out.x0 = std::clamp(out.x0, 0, rw - 1);
    out.y0 = std::clamp(out.y0, 0, rh - 1);
    out.x1 = std::clamp(out.x1, out.x0 + 1, rw);
    out.y1 = std::clamp(out.y1, out.y0 + 1, rh);
    return out;
}

}  // namespace

TrainResult train(ParamStore& params, const std::vector<AttentionTrainSample>& attention_set,
                  const std::vector<AestheticsTrainSample>& aesthetics_set,
                  const TrainConfig& cfg, const ModelConfig& model_cfg) {
    if (attention_set.empty() || aesthetics_set.empty()) {
        throw std::invalid_argument("train: both sample sets must be non-empty");
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick_attn(0, attention_set.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_aes(0, aesthetics_set.size() - 1);
    SgdOptimizer opt(cfg.momentum, cfg.weight_decay);
    TrainResult result;
    result.loss_curve.reserve(cfg.iterations);

    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        const VarMap vars = bind_params(params, true);
        const std::uint64_t neg_seed = rng();

        ag::Var attn_loss;
        for (int k = 0; k < 2; ++k) {
            const AttentionTrainSample& s = attention_set[pick_attn(rng)];
            auto [resized, info] = bilinear_resize(s.image, model_cfg.min_side);
            const int rw = static_cast<int>(info.resized_w);
            const int rh = static_cast<int>(info.resized_h);
            const Tensor padded = pad_to_multiple(resized, 16);
            const AbpOutput out = abp_forward(ag::leaf(padded), vars, model_cfg);
            const AnchorGrid grid = gen_anchors(out.fh, out.fw, model_cfg.abp_stride, model_cfg);
            const BoxCorners gt = scale_gt(s.gt_box, info.scale, rw, rh);
            const MatchResult match = match_anchors(grid, gt, model_cfg);
            ag::Var l = abp_loss(out, match, grid, neg_seed + k);
            attn_loss = attn_loss ? ag::add(attn_loss, l) : l;
        }
        attn_loss = ag::scale(attn_loss, 0.5);

        ag::Var aes_loss;
        for (int k = 0; k < 2; ++k) {
            const AestheticsTrainSample& s = aesthetics_set[pick_aes(rng)];
            auto [resized, info] = bilinear_resize(s.image, model_cfg.min_side);
            const Tensor padded = pad_to_multiple(resized, 16);
            const ag::Var feat = aa_features(ag::leaf(padded), vars, model_cfg);
            // whole image as the single cropping candidate
            const std::array<int, 4> whole{0, 0, static_cast<int>(info.resized_w),
                                           static_cast<int>(info.resized_h)};
            const ag::Var logits = aa_logits(feat, {whole}, vars, model_cfg);
            ag::Var l = aa_loss(logits, {s.label});
            aes_loss = aes_loss ? ag::add(aes_loss, l) : l;
        }
        aes_loss = ag::scale(aes_loss, 0.5);

        const ag::Var total = ag::add(attn_loss, aes_loss);
        const double loss_value = total->value[0];
        if (!std::isfinite(loss_value)) {
            throw std::runtime_error("train: loss diverged (non-finite) at iteration " +
                                     std::to_string(iter));
        }
        ag::backward(total);
        const double lr =
            cfg.lr * std::pow(cfg.lr_decay, static_cast<double>(iter / cfg.lr_decay_every));
        opt.step(params, collect_grads(vars), lr);
        result.loss_curve.push_back(loss_value);
    }
    return result;
}

}  // namespace autocrop
