#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>
#include <set>

#include "autocrop/cascade.hpp"
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

Tensor random_image(std::size_t h, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Tensor t({3, h, w});
    for (double& v : t.values()) v = dist(rng);
    return t;
}

// independent enumeration of the clamped offset grid
std::vector<BoxCorners> oracle_candidates(const BoxCorners& b, int w, int h) {
    std::vector<BoxCorners> out;
    std::set<std::array<int, 4>> seen;
    for (int dy0 = -40; dy0 <= 0; dy0 += 8)
        for (int dx0 = -40; dx0 <= 0; dx0 += 8)
            for (int dy1 = 0; dy1 <= 40; dy1 += 8)
                for (int dx1 = 0; dx1 <= 40; dx1 += 8) {
                    BoxCorners c{std::max(0, b.x0 + dx0), std::max(0, b.y0 + dy0),
                                 std::min(w, b.x1 + dx1), std::min(h, b.y1 + dy1)};
                    if (seen.insert({c.x0, c.y0, c.x1, c.y1}).second) out.push_back(c);
                }
    return out;
}

}  // namespace

TEST_CASE("offset sequences") {
    CHECK(top_left_offsets() == std::vector<int>{-40, -32, -24, -16, -8, 0});
    CHECK(bottom_right_offsets() == std::vector<int>{0, 8, 16, 24, 32, 40});
}

TEST_CASE("gen_candidates counts") {
    SUBCASE("interior initial crop yields all 1296 distinct boxes") {
        const auto set = gen_candidates({100, 100, 200, 200}, 400, 400);
        CHECK(set.candidates.size() == 1296);
    }
    SUBCASE("whole-image crop collapses to a single candidate") {
        const auto set = gen_candidates({0, 0, 300, 300}, 300, 300);
        REQUIRE(set.candidates.size() == 1);
        CHECK(set.candidates.front() == BoxCorners{0, 0, 300, 300});
    }
    SUBCASE("top-left-flush crop leaves only the 36 bottom-right shifts") {
        const auto set = gen_candidates({0, 0, 120, 120}, 300, 300);
        CHECK(set.candidates.size() == 36);
        for (const BoxCorners& c : set.candidates) {
            CHECK(c.x0 == 0);
            CHECK(c.y0 == 0);
        }
    }
}

TEST_CASE("gen_candidates matches enumeration oracle at fuzzed positions") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const int w = 120 + static_cast<int>(rng() % 400);
        const int h = 120 + static_cast<int>(rng() % 400);
        const int x0 = static_cast<int>(rng() % (w - 60));
        const int y0 = static_cast<int>(rng() % (h - 60));
        const BoxCorners init{x0, y0, x0 + 50 + static_cast<int>(rng() % (w - x0 - 50)),
                              y0 + 50 + static_cast<int>(rng() % (h - y0 - 50))};
        const auto set = gen_candidates(init, w, h);
        const auto oracle = oracle_candidates(init, w, h);
        REQUIRE(set.candidates.size() == oracle.size());
        std::set<std::array<int, 4>> uniq;
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            CHECK(set.candidates[i] == oracle[i]);
            const BoxCorners& c = set.candidates[i];
            CHECK(c.valid());
            CHECK(c.x0 >= 0);
            CHECK(c.y0 >= 0);
            CHECK(c.x1 <= w);
            CHECK(c.y1 <= h);
            CHECK(c.contains(init));
            CHECK(uniq.insert({c.x0, c.y0, c.x1, c.y1}).second);
        }
        const bool front_ok =
            set.candidates.front() == init || set.candidates.front().area() > init.area();
        CHECK(front_ok);
        // the unshifted combination is always present
        CHECK(uniq.count({init.x0, init.y0, init.x1, init.y1}) == 1);
    }
}

TEST_CASE("gen_candidates rejects out-of-bounds initial crops") {
    CHECK_THROWS(gen_candidates({0, 0, 500, 100}, 400, 400));
    CHECK_THROWS(gen_candidates({10, 10, 10, 50}, 400, 400));
}

TEST_CASE("scale_box") {
    SUBCASE("scale 1 is the identity") {
        const BoxCorners b{3, 7, 90, 110};
        CHECK(scale_box(b, 1.0, 200, 200) == b);
    }
    SUBCASE("scale 0.5 doubles coordinates") {
        CHECK(scale_box({10, 20, 30, 40}, 0.5, 200, 200) == BoxCorners{20, 40, 60, 80});
    }
    SUBCASE("clamps to the target bounds") {
        CHECK(scale_box({0, 0, 100, 100}, 0.5, 150, 150) == BoxCorners{0, 0, 150, 150});
    }
    SUBCASE("round trip moves each corner at most 1px") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 100; ++i) {
            const double s = 0.3 + (rng() % 1000) / 1000.0;
            const BoxCorners b{static_cast<int>(rng() % 100), static_cast<int>(rng() % 100),
                               static_cast<int>(120 + rng() % 100),
                               static_cast<int>(120 + rng() % 100)};
            const BoxCorners up = scale_box(b, s, 2000, 2000);
            const BoxCorners back = scale_box(up, 1.0 / s, 2000, 2000);
            CHECK(std::abs(back.x0 - b.x0) <= 1);
            CHECK(std::abs(back.y0 - b.y0) <= 1);
            CHECK(std::abs(back.x1 - b.x1) <= 1);
            CHECK(std::abs(back.y1 - b.y1) <= 1);
        }
    }
    SUBCASE("degenerate results and bad scales are rejected") {
        CHECK_THROWS(scale_box({0, 0, 10, 10}, 0.0, 100, 100));
        CHECK_THROWS(scale_box({500, 500, 510, 510}, 1.0, 100, 100));
    }
}

TEST_CASE("crop_image") {
    const ModelConfig cfg = tiny_config();
    const Tensor img = random_image(180, 260, 11);

    SUBCASE("tied scores select the first candidate") {
        ParamStore params = init_params(cfg, 13);
        for (double& v : params.at("aa.fc2.weight").values()) v = 0.0;
        for (double& v : params.at("aa.fc2.bias").values()) v = 0.0;
        const CropResult r = crop_image(img, params, cfg);
        CHECK(r.best_index == 0);
        for (double q : r.candidate_scores) CHECK(q == 0.5);
        const auto cands = gen_candidates(
            r.initial, static_cast<int>(std::lround(260 * r.scale)),
            static_cast<int>(std::lround(180 * r.scale)));
        CHECK(r.final_crop == cands.candidates.front());
    }

    SUBCASE("final crop contains the initial crop in both frames") {
        const ParamStore params = init_params(cfg, 17);
        const CropResult r = crop_image(img, params, cfg);
        CHECK(r.final_crop.contains(r.initial));
        CHECK(r.final_original.contains(r.initial_original));
        CHECK(r.best_index < r.candidate_scores.size());
        for (double q : r.candidate_scores) {
            CHECK(q > 0.0);
            CHECK(q < 1.0);
            CHECK(q <= r.candidate_scores[r.best_index]);
        }
        // original-frame boxes live inside the original image
        CHECK(r.final_original.x1 <= 260);
        CHECK(r.final_original.y1 <= 180);
    }

    SUBCASE("deterministic across calls") {
        const ParamStore params = init_params(cfg, 19);
        const CropResult a = crop_image(img, params, cfg);
        const CropResult b = crop_image(img, params, cfg);
        CHECK(a.initial == b.initial);
        CHECK(a.final_crop == b.final_crop);
        CHECK(a.best_index == b.best_index);
        CHECK(a.candidate_scores == b.candidate_scores);
    }

    SUBCASE("undersized images are rejected") {
        CHECK_THROWS(crop_image(random_image(20, 300, 1), init_params(cfg, 1), cfg));
        CHECK_THROWS(crop_image(Tensor({1, 64, 64}), init_params(cfg, 1), cfg));
    }
}

TEST_CASE("crop_result_json is well-formed") {
    const ModelConfig cfg = tiny_config();
    const ParamStore params = init_params(cfg, 23);
    const CropResult r = crop_image(random_image(200, 200, 29), params, cfg);
    const nlohmann::json j = nlohmann::json::parse(crop_result_json(r));
    REQUIRE(j["final"].size() == 4);
    CHECK(j["initial"][0] == r.initial.x0);
    CHECK(j["final"][3] == r.final_crop.y1);
    CHECK(j["num_candidates"] == r.candidate_scores.size());
    CHECK(j["best_score"] == r.candidate_scores[r.best_index]);
    CHECK(j["scale"] == r.scale);
    REQUIRE(j["final_original"].size() == 4);
}

TEST_CASE("draw_crop_overlay marks the border and nothing else") {
    const ImageU8 img{30, 20, 3, std::vector<std::uint8_t>(30 * 20 * 3, 0)};
    const BoxCorners box{5, 4, 15, 12};
    const ImageU8 out = draw_crop_overlay(img, box);
    CHECK(out.at(5, 4, 0) == 255);
    CHECK(out.at(14, 11, 0) == 255);
    CHECK(out.at(9, 8, 0) == 0);    // interior untouched
    CHECK(out.at(0, 0, 0) == 0);    // exterior untouched
    CHECK(img.at(5, 4, 0) == 0);    // source unchanged
}
