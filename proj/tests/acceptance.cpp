// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
// Usage: acceptance [cli-path] [criterion-numbers...]
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "autocrop/cascade.hpp"
#include "autocrop/gradcheck_suites.hpp"
#include "autocrop/harness.hpp"
#include "autocrop/layers.hpp"
#include "autocrop/networks.hpp"
#include "autocrop/window_search.hpp"

using namespace autocrop;
namespace fs = std::filesystem;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

ModelConfig small_config() {
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

// ---------------------------------------------------------------- criteria

std::string criterion1() {
    Timer timer;
    std::mt19937_64 seeds(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t w = 2 + seeds() % 15, h = 2 + seeds() % 15;  // <= 16x16
        AttentionMap map(w, h);
        std::mt19937_64 rng(seeds());
        for (double& v : map.values) v = unit(rng);
        for (double lambda : {0.5, 0.9}) {
            const BoxCorners fast = min_area_window_fast(map, {lambda});
            const BoxCorners brute = min_area_window_bruteforce(map, {lambda});
            require(fast == brute, "fast/brute mismatch on map " + std::to_string(trial) +
                                       ": " + fast.str() + " vs " + brute.str());
        }
    }
    const double t = timer.seconds();
    require(t < 10.0, "window search took " + std::to_string(t) + "s (budget 10s)");
    char buf[96];
    std::snprintf(buf, sizeof buf, "200 maps, both lambdas, identical boxes, %.2fs", t);
    return buf;
}

std::string criterion2() {
    Timer timer;
    const auto cases = run_gradcheck_suite("all");
    double worst = 0.0;
    for (const GradCheckCase& c : cases) {
        require(c.passed(), "gradient check '" + c.name + "' rel error " +
                                std::to_string(c.max_rel_error) + " >= " +
                                std::to_string(c.tolerance));
        worst = std::max(worst, c.max_rel_error);
    }
    const double t = timer.seconds();
    require(t < 60.0, "gradient suite took " + std::to_string(t) + "s (budget 60s)");
    std::ostringstream os;
    os << cases.size() << " graphs, worst rel error " << worst << ", " << t << "s";
    return os.str();
}

std::string criterion3() {
    const ModelConfig cfg;  // default anchor scales/ratios and thresholds
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t fh = 2 + rng() % 7, fw = 2 + rng() % 7;
        const AnchorGrid grid = gen_anchors(fh, fw, cfg.abp_stride, cfg);
        const int iw = static_cast<int>(fw * cfg.abp_stride);
        const int ih = static_cast<int>(fh * cfg.abp_stride);
        const int x0 = static_cast<int>(rng() % (iw - 16));
        const int y0 = static_cast<int>(rng() % (ih - 16));
        const BoxCorners gt{x0, y0, x0 + 16 + static_cast<int>(rng() % (iw - x0 - 15)),
                            y0 + 16 + static_cast<int>(rng() % (ih - y0 - 15))};
        const MatchResult m = match_anchors(grid, gt, cfg);
        require(m.labels.size() == grid.boxes.size(), "label count mismatch");
        std::size_t positives = 0;
        for (std::size_t i = 0; i < m.labels.size(); ++i) {
            const AnchorLabel l = m.labels[i];
            require(l == AnchorLabel::Positive || l == AnchorLabel::Negative ||
                        l == AnchorLabel::Ignore,
                    "label outside the partition");
            if (l == AnchorLabel::Positive) ++positives;
            if (m.ious[i] >= cfg.pos_iou) {
                require(l == AnchorLabel::Positive, "IoU >= 0.7 anchor not positive");
            }
            if (m.ious[i] < cfg.neg_iou && i != m.forced_index) {
                require(l == AnchorLabel::Negative, "low-IoU anchor not negative");
            }
        }
        require(positives >= 1, "no positive anchor for gt " + gt.str());
        require(m.labels[m.forced_index] == AnchorLabel::Positive, "forced anchor not positive");
    }
    return "1000 fuzzed (grid, gt) pairs, partition and threshold rules hold";
}

std::string criterion4() {
    const auto interior = gen_candidates({200, 200, 320, 300}, 800, 800);
    require(interior.candidates.size() == 1296,
            "interior crop gave " + std::to_string(interior.candidates.size()) + " candidates");

    const BoxCorners flush{0, 0, 120, 100};
    const auto corner = gen_candidates(flush, 600, 600);
    // enumeration oracle for the clamped offset grid
    std::set<std::array<int, 4>> oracle;
    for (int dy0 = -40; dy0 <= 0; dy0 += 8)
        for (int dx0 = -40; dx0 <= 0; dx0 += 8)
            for (int dy1 = 0; dy1 <= 40; dy1 += 8)
                for (int dx1 = 0; dx1 <= 40; dx1 += 8)
                    oracle.insert({std::max(0, flush.x0 + dx0), std::max(0, flush.y0 + dy0),
                                   std::min(600, flush.x1 + dx1), std::min(600, flush.y1 + dy1)});
    require(corner.candidates.size() == oracle.size(),
            "corner-flush count " + std::to_string(corner.candidates.size()) + " != oracle " +
                std::to_string(oracle.size()));

    for (const auto* set : {&interior, &corner}) {
        std::set<std::array<int, 4>> seen;
        for (const BoxCorners& c : set->candidates) {
            require(c.contains(set->initial), "candidate does not contain the initial crop");
            require(c.x0 >= 0 && c.y0 >= 0 && c.x1 <= 800 && c.y1 <= 800, "candidate off-image");
            require(seen.insert({c.x0, c.y0, c.x1, c.y1}).second, "duplicate candidate");
        }
    }
    return "1296 interior, " + std::to_string(corner.candidates.size()) +
           " corner-flush (oracle), containment and bounds hold";
}

std::string criterion5() {
    const ModelConfig cfg = small_config();
    const ParamStore params = init_params(cfg, 55);
    const VarMap vars = bind_params(params, false);
    std::mt19937_64 rng(56);
    Tensor img({3, 160, 224});
    for (double& v : img.values()) v = (rng() % 1000) / 1000.0;

    const auto cands = gen_candidates({40, 40, 120, 120}, 224, 160);
    std::vector<std::array<int, 4>> boxes;
    for (const BoxCorners& c : cands.candidates) boxes.push_back({c.x0, c.y0, c.x1, c.y1});

    const ag::Var shared = shared_trunk(ag::leaf(img), vars, cfg);
    const ag::Var feat_shared = aa_features_from_shared(shared, vars, cfg);
    const ag::Var feat_raw = aa_features(ag::leaf(img), vars, cfg);
    require(feat_shared->value.values() == feat_raw->value.values(),
            "shared-path features differ from raw-pixel features");

    const ag::Var batch = aa_logits(feat_shared, boxes, vars, cfg);
    const ag::Var batch_raw = aa_logits(feat_raw, boxes, vars, cfg);
    require(batch->value.values() == batch_raw->value.values(),
            "scores differ between shared and raw feature paths");
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const ag::Var solo = aa_logits(feat_shared, {boxes[i]}, vars, cfg);
        require(solo->value[0] == batch->value[i * 2 + 0] &&
                    solo->value[1] == batch->value[i * 2 + 1],
                "batch scoring differs from one-at-a-time at candidate " + std::to_string(i));
    }
    return std::to_string(boxes.size()) + " candidates bit-identical across paths and batching";
}

std::string criterion6() {
    Timer timer;
    const ModelConfig cfg;  // full toy-scale configuration
    const SyntheticSpec spec;

    std::vector<AttentionTrainSample> att;
    std::vector<AestheticsTrainSample> aes;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const AttentionSample a = gen_synthetic_attention(spec, i);
        att.push_back({to_tensor(a.image), a.gt_box});
        const AestheticsSample s = gen_synthetic_aesthetics(spec, i);
        aes.push_back({to_tensor(s.image), s.label});
    }

    ParamStore params = init_params(cfg, 0);
    TrainConfig tc;
    tc.iterations = 2000;
    tc.lr = 0.002;
    tc.seed = 0;
    const TrainResult tr = train(params, att, aes, tc, cfg);

    const VarMap vars = bind_params(params, false);

    double iou_sum = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const AttentionSample a = gen_synthetic_attention(spec, 10000 + i);
        const Tensor img = to_tensor(a.image);  // 224x224: already min-side sized
        const AbpOutput out = abp_forward(ag::leaf(img), vars, cfg);
        const AnchorGrid grid = gen_anchors(out.fh, out.fw, cfg.abp_stride, cfg);
        const BoxCorners crop = select_initial_crop(out.scores->value, out.deltas->value, grid,
                                                    static_cast<int>(spec.width),
                                                    static_cast<int>(spec.height));
        iou_sum += iou(crop, a.gt_box);
    }
    const double mean_iou = iou_sum / 100.0;

    std::size_t correct = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const AestheticsSample s = gen_synthetic_aesthetics(spec, 20000 + i);
        const ag::Var feat = aa_features(ag::leaf(to_tensor(s.image)), vars, cfg);
        const ag::Var logits = aa_logits(
            feat, {{0, 0, static_cast<int>(spec.width), static_cast<int>(spec.height)}}, vars,
            cfg);
        const int pred = logits->value[0] > logits->value[1] ? 1 : 0;
        if (pred == s.label) ++correct;
    }
    const double accuracy = correct / 200.0;
    const double t = timer.seconds();

    std::ostringstream os;
    os << "loss " << tr.loss_curve.front() << " -> " << tr.loss_curve.back() << ", held-out IoU "
       << mean_iou << ", accuracy " << accuracy << ", " << t << "s";
    require(mean_iou > 0.6, "mean initial-crop IoU " + std::to_string(mean_iou) + " <= 0.6");
    require(accuracy > 0.9, "classification accuracy " + std::to_string(accuracy) + " <= 0.9");
    require(t < 900.0, "training run took " + std::to_string(t) + "s (budget 900s)");
    return os.str();
}

std::string criterion7() {
    require(std::abs(iou(BoxCorners{0, 0, 10, 10}, BoxCorners{5, 0, 15, 10}) - 1.0 / 3.0) < 1e-12,
            "IoU fixture mismatch");
    require(std::abs(bde({0, 0, 100, 100}, {10, 10, 90, 90}, 100, 100) - 0.1) < 1e-12,
            "BDE fixture mismatch");

    // 3-annotator, 2-image fixture evaluated end-to-end
    const ModelConfig cfg = small_config();
    const ParamStore params = init_params(cfg, 77);
    const fs::path dir = fs::temp_directory_path() / "autocrop_acceptance_eval";
    fs::remove_all(dir);
    fs::create_directories(dir);
    SyntheticSpec spec;
    spec.width = 96;
    spec.height = 72;
    std::vector<DatasetRecord> recs;
    for (int i = 0; i < 2; ++i) {
        const AttentionSample s = gen_synthetic_attention(spec, 700 + i);
        const std::string name = "img_" + std::to_string(i) + ".ppm";
        write_ppm((dir / name).string(), s.image);
        DatasetRecord rec;
        rec.image = name;
        rec.gt_boxes = {{1, s.gt_box}, {2, {12, 10, 80, 60}}, {3, {0, 0, 96, 72}}};
        recs.push_back(rec);
    }
    const EvalReport rep = eval_dataset(params, cfg, recs, dir.string());
    fs::remove_all(dir);
    require(rep.rows.size() == 6 && rep.per_annotator.size() == 3, "unexpected report shape");
    double sum_iou = 0.0, sum_bde = 0.0;
    for (const auto& [ann, st] : rep.per_annotator) {
        double s_iou = 0.0, s_bde = 0.0;
        std::size_t n = 0;
        for (const EvalRow& r : rep.rows) {
            if (r.annotator == ann) {
                s_iou += r.iou;
                s_bde += r.bde;
                ++n;
            }
        }
        require(n == st.count && std::abs(st.mean_iou - s_iou / n) < 1e-12 &&
                    std::abs(st.mean_bde - s_bde / n) < 1e-12,
                "per-annotator means do not match hand averages");
    }
    for (const EvalRow& r : rep.rows) {
        sum_iou += r.iou;
        sum_bde += r.bde;
    }
    require(std::abs(rep.mean_iou - sum_iou / 6.0) < 1e-12 &&
                std::abs(rep.mean_bde - sum_bde / 6.0) < 1e-12,
            "overall means do not match hand averages");
    return "metric fixtures exact to 1e-12; eval means match hand arithmetic";
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string criterion8(const std::string& cli) {
    require(!cli.empty(), "CLI path not supplied (argv[1])");
    const fs::path dir = fs::temp_directory_path() / "autocrop_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string q = "\"" + cli + "\"";
    auto run = [&](const std::string& args) {
        const std::string cmd =
            q + " " + args + " > " + (dir / "stdout.log").string() + " 2>&1";
        require(std::system(cmd.c_str()) == 0, "command failed: " + cmd);
    };

    run("gen-data --kind attention --count 4 --seed 1 --out " + (dir / "data").string());
    run("gen-data --kind aesthetics --count 4 --seed 1 --out " + (dir / "aes").string());
    run("train --data-attention " + (dir / "data").string() + " --data-aesthetics " +
        (dir / "aes").string() + " --iters 3 --seed 1 --out " + (dir / "w.bin").string());

    const std::string image = (dir / "data" / "img_00000.ppm").string();
    for (int r = 1; r <= 2; ++r) {
        run("crop --weights " + (dir / "w.bin").string() + " --image " + image + " --out " +
            (dir / ("crop" + std::to_string(r) + ".json")).string());
        run("eval --weights " + (dir / "w.bin").string() + " --data " +
            (dir / "data" / "annotations.jsonl").string() + " --report " +
            (dir / ("report" + std::to_string(r))).string());
    }
    require(read_file(dir / "crop1.json") == read_file(dir / "crop2.json"),
            "crop outputs differ between runs");
    require(read_file(dir / "report1" / "report.csv") == read_file(dir / "report2" / "report.csv"),
            "eval CSV reports differ between runs");
    require(read_file(dir / "report1" / "summary.json") ==
                read_file(dir / "report2" / "summary.json"),
            "eval summaries differ between runs");
    fs::remove_all(dir);
    return "crop and eval outputs byte-identical across repeated runs";
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    std::set<int> only;
    for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));

    struct Criterion {
        int number;
        const char* title;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "window-search oracle equivalence", criterion1},
        {2, "gradient suite", criterion2},
        {3, "anchor matching contract", criterion3},
        {4, "candidate contract", criterion4},
        {5, "shared-feature exactness", criterion5},
        {6, "toy end-to-end training", criterion6},
        {7, "metric fixtures", criterion7},
        {8, "determinism", [&] { return criterion8(cli); }},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!only.empty() && !only.count(c.number)) continue;
        try {
            const std::string detail = c.run();
            std::cout << "PASS criterion " << c.number << " (" << c.title << "): " << detail
                      << "\n";
        } catch (const std::exception& e) {
            std::cout << "FAIL criterion " << c.number << " (" << c.title << "): " << e.what()
                      << "\n";
            ++failures;
        }
        std::cout.flush();
    }
    return failures == 0 ? 0 : 1;
}
