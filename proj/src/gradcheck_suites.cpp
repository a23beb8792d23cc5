#include "autocrop/gradcheck_suites.hpp"

#include <random>

#include "autocrop/grad_check.hpp"
#include "autocrop/layers.hpp"
#include "autocrop/networks.hpp"

namespace autocrop {

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng, double lo = -1.0,
                     double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Tensor t(std::move(shape));
    for (double& v : t.values()) v = dist(rng);
    return t;
}

ModelConfig toy_config() {
    ModelConfig cfg;
    cfg.c1 = 2;
    cfg.c2 = 3;
    cfg.abp_c3 = 3;
    cfg.abp_c4 = 4;
    cfg.abp_c5 = 4;
    cfg.head_dim = 6;
    cfg.aa_c3 = 3;
    cfg.aa_c4 = 3;
    cfg.fc_hidden = 8;
    return cfg;
}

// Flattens a ParamStore to an ordered (names, tensors) pair for grad_check.
std::pair<std::vector<std::string>, std::vector<Tensor>> unpack(const ParamStore& store) {
    std::vector<std::string> names;
    std::vector<Tensor> tensors;
    for (const auto& [name, t] : store.entries()) {
        names.push_back(name);
        tensors.push_back(t);
    }
    return {names, tensors};
}

VarMap pack(const std::vector<std::string>& names, const std::vector<ag::Var>& leaves) {
    VarMap vars;
    for (std::size_t i = 0; i < names.size(); ++i) vars.emplace(names[i], leaves[i]);
    return vars;
}

GradCheckCase check_smooth_l1() {
    // probe points away from the |x| = 1 kink
    Tensor x({5, 1}, {-2.0, -0.5, 0.3, 0.7, 2.5});
    std::vector<ag::RegressionTarget> targets;
    for (std::size_t i = 0; i < 5; ++i) targets.push_back({i, {0.0}});
    const double err = grad_check(
        [&](const std::vector<ag::Var>& leaves) { return ag::smooth_l1_loss(leaves[0], targets); },
        {x});
    return {"smooth_l1", err};
}

GradCheckCase check_softmax_ce() {
    std::mt19937_64 rng(11);
    Tensor logits = random_tensor({6, 2}, rng, -2.0, 2.0);
    std::vector<std::pair<std::size_t, int>> items;
    for (std::size_t i = 0; i < 6; ++i) items.emplace_back(i, static_cast<int>(i % 2));
    const double err = grad_check(
        [&](const std::vector<ag::Var>& leaves) {
            return ag::softmax_cross_entropy(leaves[0], items);
        },
        {logits});
    return {"softmax_cross_entropy", err};
}

GradCheckCase check_conv_pool() {
    std::mt19937_64 rng(12);
    Tensor x = random_tensor({2, 6, 6}, rng);
    Tensor w = random_tensor({3, 2, 3, 3}, rng);
    Tensor b = random_tensor({3}, rng);
    const double err = grad_check(
        [](const std::vector<ag::Var>& v) {
            return ag::sum(ag::maxpool2x2(ag::relu(ag::conv2d(v[0], v[1], v[2], 1))));
        },
        {x, w, b});
    return {"conv3x3+relu+maxpool", err};
}

GradCheckCase check_linear() {
    std::mt19937_64 rng(13);
    Tensor x = random_tensor({3, 5}, rng);
    Tensor w = random_tensor({4, 5}, rng);
    Tensor b = random_tensor({4}, rng);
    const double err = grad_check(
        [](const std::vector<ag::Var>& v) {
            return ag::sum(ag::relu(ag::linear(v[0], v[1], v[2])));
        },
        {x, w, b});
    return {"linear+relu", err};
}

GradCheckCase check_abp_composite() {
    const ModelConfig cfg = toy_config();
    const ParamStore store = init_params(cfg, 21);
    auto [names, tensors] = unpack(store);
    std::mt19937_64 rng(22);
    tensors.push_back(random_tensor({3, 32, 32}, rng, 0.0, 1.0));

    const AnchorGrid grid = gen_anchors(2, 2, cfg.abp_stride, cfg);
    const BoxCorners gt{4, 6, 28, 30};
    const MatchResult match = match_anchors(grid, gt, cfg);

    GradCheckOptions opts;
    opts.max_coords_per_tensor = 10;
    opts.seed = 7;
    const double err = grad_check(
        [&](const std::vector<ag::Var>& leaves) {
            std::vector<ag::Var> param_leaves(leaves.begin(), leaves.end() - 1);
            const VarMap vars = pack(names, param_leaves);
            const AbpOutput out = abp_forward(leaves.back(), vars, cfg);
            return abp_loss(out, match, grid, 5);
        },
        tensors, opts);
    return {"abp_loss composite (3x32x32)", err};
}

GradCheckCase check_aa_composite() {
    const ModelConfig cfg = toy_config();
    const ParamStore store = init_params(cfg, 31);
    auto [names, tensors] = unpack(store);
    std::mt19937_64 rng(32);
    tensors.push_back(random_tensor({3, 32, 32}, rng, 0.0, 1.0));

    const std::vector<std::array<int, 4>> candidates = {{0, 0, 32, 32}, {6, 4, 30, 28}};
    const std::vector<int> labels = {1, 0};

    GradCheckOptions opts;
    opts.max_coords_per_tensor = 10;
    opts.seed = 8;
    const double err = grad_check(
        [&](const std::vector<ag::Var>& leaves) {
            std::vector<ag::Var> param_leaves(leaves.begin(), leaves.end() - 1);
            const VarMap vars = pack(names, param_leaves);
            const ag::Var feat = aa_features(leaves.back(), vars, cfg);
            return aa_loss(aa_logits(feat, candidates, vars, cfg), labels);
        },
        tensors, opts);
    return {"aa_loss composite with roi_pool (3x32x32)", err};
}

}  // namespace

std::vector<GradCheckCase> run_gradcheck_suite(const std::string& module) {
    std::vector<GradCheckCase> cases;
    const bool all = module == "all";
    if (all || module == "core") {
        cases.push_back(check_smooth_l1());
        cases.push_back(check_softmax_ce());
        cases.push_back(check_conv_pool());
        cases.push_back(check_linear());
    }
    if (all || module == "abp") cases.push_back(check_abp_composite());
    if (all || module == "aa") cases.push_back(check_aa_composite());
    if (cases.empty()) {
        throw std::invalid_argument("run_gradcheck_suite: unknown module '" + module + "'");
    }
    return cases;
}

}  // namespace autocrop
