#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "autocrop/layers.hpp"
#include "autocrop/networks.hpp"

using namespace autocrop;

namespace {

ModelConfig tiny_config() {
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

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed, double lo = 0.0,
                     double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Tensor t(std::move(shape));
    for (double& v : t.values()) v = dist(rng);
    return t;
}

}  // namespace

TEST_CASE("aa trunk produces stride-8 features either way") {
    const ModelConfig cfg = tiny_config();
    const ParamStore params = init_params(cfg, 4);
    const VarMap vars = bind_params(params, false);
    const Tensor img = random_tensor({3, 224, 224}, 5);

    const ag::Var direct = aa_features(ag::leaf(img), vars, cfg);
    CHECK(direct->value.shape() == std::vector<std::size_t>{cfg.aa_c4, 28, 28});

    // raw-image path is bit-identical to the shared conv1/conv2 path
    const ag::Var shared = shared_trunk(ag::leaf(img), vars, cfg);
    const ag::Var via_shared = aa_features_from_shared(shared, vars, cfg);
    CHECK(direct->value.values() == via_shared->value.values());

    const ag::Var again = aa_features(ag::leaf(img), vars, cfg);
    CHECK(direct->value.values() == again->value.values());

    CHECK_THROWS(aa_features(ag::leaf(Tensor({3, 20, 224})), vars, cfg));
}

TEST_CASE("roi_pool") {
    const std::size_t n = 7;
    SUBCASE("constant feature map pools to the constant") {
        const ag::Var feat = ag::leaf(Tensor({2, 28, 28}, 0.6));
        const ag::Var out = ag::roi_pool(feat, {{3, 5, 100, 90}}, n, 8);
        REQUIRE(out->value.shape() == std::vector<std::size_t>{1, 2, n, n});
        for (double v : out->value.values()) CHECK(v == 0.6);
    }
    SUBCASE("box covering exactly n x n cells is the identity") {
        Tensor feat({1, 10, 10});
        for (std::size_t i = 0; i < feat.numel(); ++i) feat[i] = static_cast<double>(i);
        // feature cells [1,8) x [2,9) in image pixels with stride 8
        const ag::Var out = ag::roi_pool(ag::leaf(feat), {{8, 16, 64, 72}}, n, 8);
        for (std::size_t by = 0; by < n; ++by) {
            for (std::size_t bx = 0; bx < n; ++bx) {
                CHECK(out->value[by * n + bx] == feat[(2 + by) * 10 + (1 + bx)]);
            }
        }
    }
    SUBCASE("matches a direct per-bin max enumeration on a seeded map") {
        const Tensor feat = random_tensor({2, 28, 28}, 21);
        std::mt19937_64 rng(22);
        for (int trial = 0; trial < 30; ++trial) {
            const int x0 = static_cast<int>(rng() % 150);
            const int y0 = static_cast<int>(rng() % 150);
            const std::array<int, 4> box{x0, y0, x0 + 20 + static_cast<int>(rng() % 70),
                                         y0 + 20 + static_cast<int>(rng() % 70)};
            const ag::Var out = ag::roi_pool(ag::leaf(feat), {box}, n, 8);
            // oracle: same floor/ceil mapping evaluated independently
            const long fx0 = static_cast<long>(std::floor(box[0] / 8.0));
            const long fy0 = static_cast<long>(std::floor(box[1] / 8.0));
            const long fx1 = std::min<long>(28, static_cast<long>(std::ceil(box[2] / 8.0)));
            const long fy1 = std::min<long>(28, static_cast<long>(std::ceil(box[3] / 8.0)));
            const long LX = fx1 - fx0, LY = fy1 - fy0;
            for (std::size_t c = 0; c < 2; ++c) {
                for (std::size_t by = 0; by < n; ++by) {
                    for (std::size_t bx = 0; bx < n; ++bx) {
                        long yy0 = fy0 + static_cast<long>(std::floor(double(by) * LY / n));
                        long yy1 = fy0 + static_cast<long>(std::ceil(double(by + 1) * LY / n));
                        long xx0 = fx0 + static_cast<long>(std::floor(double(bx) * LX / n));
                        long xx1 = fx0 + static_cast<long>(std::ceil(double(bx + 1) * LX / n));
                        yy1 = std::max(yy1, yy0 + 1);
                        xx1 = std::max(xx1, xx0 + 1);
                        double m = -1e300;
                        for (long y = yy0; y < yy1; ++y)
                            for (long x = xx0; x < xx1; ++x)
                                m = std::max(m, feat[(c * 28 + y) * 28 + x]);
                        CHECK(out->value[((c * n) + by) * n + bx] == m);
                    }
                }
            }
        }
    }
    SUBCASE("invariant to values outside the box, monotone in values inside") {
        Tensor feat = random_tensor({1, 28, 28}, 31);
        const std::array<int, 4> box{40, 40, 120, 120};  // cells [5,15) x [5,15)
        const ag::Var base = ag::roi_pool(ag::leaf(feat), {box}, n, 8);
        Tensor outside = feat;
        outside[0] = 99.0;  // cell (0,0), outside the mapped box
        const ag::Var changed = ag::roi_pool(ag::leaf(outside), {box}, n, 8);
        CHECK(base->value.values() == changed->value.values());

        Tensor inside = feat;
        inside[8 * 28 + 8] += 0.5;
        const ag::Var bumped = ag::roi_pool(ag::leaf(inside), {box}, n, 8);
        for (std::size_t i = 0; i < base->value.numel(); ++i) {
            CHECK(bumped->value[i] >= base->value[i]);
        }
    }
    SUBCASE("box fully outside the feature map is rejected") {
        const ag::Var feat = ag::leaf(Tensor({1, 4, 4}));
        CHECK_THROWS(ag::roi_pool(feat, {{400, 400, 500, 500}}, n, 8));
        CHECK_THROWS(ag::roi_pool(feat, {{10, 10, 10, 20}}, n, 8));
    }
}

TEST_CASE("aa_logits: zero classifier weights give uniform scores") {
    const ModelConfig cfg = tiny_config();
    ParamStore params = init_params(cfg, 6);
    for (double& v : params.at("aa.fc2.weight").values()) v = 0.0;
    for (double& v : params.at("aa.fc2.bias").values()) v = 0.0;
    const VarMap vars = bind_params(params, false);
    const ag::Var feat = aa_features(ag::leaf(random_tensor({3, 64, 64}, 7)), vars, cfg);
    const ag::Var logits = aa_logits(feat, {{0, 0, 64, 64}, {8, 8, 40, 40}}, vars, cfg);
    for (double v : logits->value.values()) CHECK(v == 0.0);
}

TEST_CASE("aa_logits: duplicated candidate scores identically; batch == one-at-a-time") {
    const ModelConfig cfg = tiny_config();
    const ParamStore params = init_params(cfg, 8);
    const VarMap vars = bind_params(params, false);
    const ag::Var feat = aa_features(ag::leaf(random_tensor({3, 64, 64}, 9)), vars, cfg);

    const std::vector<std::array<int, 4>> cands = {
        {0, 0, 64, 64}, {8, 8, 40, 40}, {0, 0, 64, 64}, {16, 0, 64, 48}};
    const ag::Var batch = aa_logits(feat, cands, vars, cfg);
    CHECK(batch->value[0 * 2 + 0] == batch->value[2 * 2 + 0]);
    CHECK(batch->value[0 * 2 + 1] == batch->value[2 * 2 + 1]);
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const ag::Var solo = aa_logits(feat, {cands[i]}, vars, cfg);
        CHECK(solo->value[0] == batch->value[i * 2 + 0]);
        CHECK(solo->value[1] == batch->value[i * 2 + 1]);
    }
}

TEST_CASE("aa_loss values") {
    SUBCASE("equal logits give ln 2") {
        const ag::Var logits = ag::leaf(Tensor({3, 2}));
        const ag::Var loss = aa_loss(logits, {1, 0, 1});
        CHECK(loss->value[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("logits (1,0) with true class 1 gives ln(1+e^-1)") {
        const ag::Var logits = ag::leaf(Tensor({1, 2}, {1.0, 0.0}));
        const ag::Var loss = aa_loss(logits, {1});
        CHECK(loss->value[0] == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
    }
    SUBCASE("dominant true-class logit drives the loss to 0") {
        const ag::Var logits = ag::leaf(Tensor({1, 2}, {50.0, 0.0}));
        CHECK(aa_loss(logits, {1})->value[0] < 1e-20);
    }
    SUBCASE("matches direct arithmetic on random logits within 1e-12") {
        std::mt19937_64 rng(41);
        std::uniform_real_distribution<double> dist(-3.0, 3.0);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 1 + rng() % 6;
            Tensor logits({n, 2});
            std::vector<int> labels(n);
            for (std::size_t i = 0; i < n; ++i) {
                logits[i * 2] = dist(rng);
                logits[i * 2 + 1] = dist(rng);
                labels[i] = static_cast<int>(rng() % 2);
            }
            double expect = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e1 = std::exp(logits[i * 2]), e0 = std::exp(logits[i * 2 + 1]);
                const double q = (labels[i] == 1 ? e1 : e0) / (e1 + e0);
                expect += -std::log(q);
            }
            expect /= static_cast<double>(n);
            CHECK(aa_loss(ag::leaf(logits), labels)->value[0] ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("label count must match") {
        CHECK_THROWS(aa_loss(ag::leaf(Tensor({2, 2})), {1}));
    }
}
