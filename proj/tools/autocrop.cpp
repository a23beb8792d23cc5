// Command-line front end: synthetic data generation, mixed-batch training,
// single-image cropping, dataset evaluation and gradient checking.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "autocrop/cascade.hpp"
#include "autocrop/gradcheck_suites.hpp"
#include "autocrop/harness.hpp"
#include "autocrop/networks.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenDataArgs {
    std::string kind;
    std::size_t count = 10;
    std::uint64_t seed = 0;
    std::string out;
};

struct TrainArgs {
    std::string data_attention;
    std::string data_aesthetics;
    std::size_t iters = 2000;
    double lr = 0.002;
    double momentum = 0.9;
    double weight_decay = 0.0001;
    std::size_t lr_decay_every = 10000;
    double lr_decay = 0.1;
    std::uint64_t seed = 0;
    std::string out;
};

struct CropArgs {
    std::string weights;
    std::string image;
    std::string out;
    std::string overlay;
    std::uint64_t seed = 0;
};

struct EvalArgs {
    std::string weights;
    std::string data;
    std::string report;
    int jobs = 1;
    std::uint64_t seed = 0;
};

struct GradcheckArgs {
    std::string module = "all";
    std::uint64_t seed = 0;
};

std::string zero_pad(std::size_t n, int width) {
    std::string s = std::to_string(n);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

void echo_config(const std::string& command, const json& cfg) {
    json j;
    j["command"] = command;
    j["config"] = cfg;
    std::cout << j.dump() << "\n";
}

int cmd_gen_data(const GenDataArgs& args) {
    echo_config("gen-data", {{"kind", args.kind},
                             {"count", args.count},
                             {"seed", args.seed},
                             {"out", args.out}});
    fs::create_directories(args.out);
    autocrop::SyntheticSpec spec;
    std::vector<autocrop::DatasetRecord> records;
    for (std::size_t i = 0; i < args.count; ++i) {
        const std::uint64_t seed = args.seed + i;
        autocrop::DatasetRecord rec;
        const std::string stem = "img_" + zero_pad(i, 5);
        rec.image = stem + ".ppm";
        if (args.kind == "attention") {
            const auto sample = autocrop::gen_synthetic_attention(spec, seed);
            autocrop::write_ppm((fs::path(args.out) / rec.image).string(), sample.image);
            autocrop::write_attention_map((fs::path(args.out) / (stem + ".pgm")).string(),
                                          sample.map);
            rec.attention_box = sample.gt_box;
            rec.gt_boxes.push_back({1, sample.gt_box});
        } else {
            const auto sample = autocrop::gen_synthetic_aesthetics(spec, seed);
            autocrop::write_ppm((fs::path(args.out) / rec.image).string(), sample.image);
            rec.aesthetic_label = sample.label;
        }
        records.push_back(std::move(rec));
    }
    autocrop::write_jsonl((fs::path(args.out) / "annotations.jsonl").string(), records);
    std::cout << "wrote " << records.size() << " " << args.kind << " records to " << args.out
              << "\n";
    return 0;
}

int cmd_train(const TrainArgs& args) {
    echo_config("train", {{"data_attention", args.data_attention},
                          {"data_aesthetics", args.data_aesthetics},
                          {"iters", args.iters},
                          {"lr", args.lr},
                          {"momentum", args.momentum},
                          {"weight_decay", args.weight_decay},
                          {"lr_decay_every", args.lr_decay_every},
                          {"lr_decay", args.lr_decay},
                          {"seed", args.seed},
                          {"out", args.out}});

    std::vector<autocrop::AttentionTrainSample> attention;
    for (const auto& rec :
         autocrop::read_jsonl((fs::path(args.data_attention) / "annotations.jsonl").string())) {
        if (!rec.attention_box) continue;
        attention.push_back(
            {autocrop::to_tensor(
                 autocrop::read_ppm((fs::path(args.data_attention) / rec.image).string())),
             *rec.attention_box});
    }
    std::vector<autocrop::AestheticsTrainSample> aesthetics;
    for (const auto& rec :
         autocrop::read_jsonl((fs::path(args.data_aesthetics) / "annotations.jsonl").string())) {
        if (!rec.aesthetic_label) continue;
        aesthetics.push_back(
            {autocrop::to_tensor(
                 autocrop::read_ppm((fs::path(args.data_aesthetics) / rec.image).string())),
             *rec.aesthetic_label});
    }
    std::cout << "loaded " << attention.size() << " attention and " << aesthetics.size()
              << " aesthetics samples\n";

    const autocrop::ModelConfig model_cfg;
    autocrop::ParamStore params = autocrop::init_params(model_cfg, args.seed);
    autocrop::TrainConfig cfg;
    cfg.iterations = args.iters;
    cfg.lr = args.lr;
    cfg.momentum = args.momentum;
    cfg.weight_decay = args.weight_decay;
    cfg.lr_decay_every = args.lr_decay_every;
    cfg.lr_decay = args.lr_decay;
    cfg.seed = args.seed;

    const autocrop::TrainResult result =
        autocrop::train(params, attention, aesthetics, cfg, model_cfg);
    params.save(args.out);
    if (!result.loss_curve.empty()) {
        std::cout << "initial loss " << result.loss_curve.front() << ", final loss "
                  << result.loss_curve.back() << "\n";
    }
    std::cout << "saved weights to " << args.out << "\n";
    return 0;
}

int cmd_crop(const CropArgs& args) {
    echo_config("crop", {{"weights", args.weights},
                         {"image", args.image},
                         {"out", args.out},
                         {"overlay", args.overlay},
                         {"seed", args.seed}});
    const autocrop::ParamStore params = autocrop::ParamStore::load(args.weights);
    const autocrop::ImageU8 img = autocrop::read_ppm(args.image);
    const autocrop::ModelConfig cfg;
    const autocrop::CropResult result =
        autocrop::crop_image(autocrop::to_tensor(img), params, cfg);
    std::ofstream os(args.out);
    if (!os) throw std::runtime_error("crop: cannot open '" + args.out + "' for writing");
    os << autocrop::crop_result_json(result) << "\n";
    if (!args.overlay.empty()) {
        autocrop::write_ppm(args.overlay,
                            autocrop::draw_crop_overlay(img, result.final_original));
    }
    std::cout << autocrop::crop_result_json(result) << "\n";
    return 0;
}

int cmd_eval(const EvalArgs& args) {
    echo_config("eval", {{"weights", args.weights},
                         {"data", args.data},
                         {"report", args.report},
                         {"jobs", args.jobs},
                         {"seed", args.seed}});
    const autocrop::ParamStore params = autocrop::ParamStore::load(args.weights);
    const auto records = autocrop::read_jsonl(args.data);
    const std::string base_dir = fs::path(args.data).parent_path().string();
    const autocrop::ModelConfig cfg;
    const autocrop::EvalReport report =
        autocrop::eval_dataset(params, cfg, records, base_dir, args.jobs);
    fs::create_directories(args.report);
    {
        std::ofstream os(fs::path(args.report) / "report.csv");
        os << autocrop::report_csv(report);
    }
    {
        std::ofstream os(fs::path(args.report) / "summary.json");
        os << autocrop::report_summary_json(report) << "\n";
    }
    std::cout << autocrop::report_summary_json(report) << "\n";
    return 0;
}

int cmd_gradcheck(const GradcheckArgs& args) {
    echo_config("gradcheck", {{"module", args.module}, {"seed", args.seed}});
    bool ok = true;
    for (const auto& c : autocrop::run_gradcheck_suite(args.module)) {
        std::cout << (c.passed() ? "PASS" : "FAIL") << "  " << c.name
                  << "  max_rel_error=" << c.max_rel_error << " (tol " << c.tolerance << ")\n";
        ok = ok && c.passed();
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"determining-adjusting automatic photo cropping"};
    app.require_subcommand(1);
    app.set_config("--config", "", "optional config file (flags take precedence)");

    GenDataArgs gen_args;
    auto* gen = app.add_subcommand("gen-data", "generate synthetic training data");
    gen->add_option("--kind", gen_args.kind, "attention|aesthetics")
        ->required()
        ->check(CLI::IsMember({"attention", "aesthetics"}));
    gen->add_option("--count", gen_args.count, "number of samples");
    gen->add_option("--seed", gen_args.seed, "RNG seed");
    gen->add_option("--out", gen_args.out, "output directory")->required();

    TrainArgs train_args;
    auto* tr = app.add_subcommand("train", "train both sub-networks");
    tr->add_option("--data-attention", train_args.data_attention)->required();
    tr->add_option("--data-aesthetics", train_args.data_aesthetics)->required();
    tr->add_option("--iters", train_args.iters, "SGD iterations");
    tr->add_option("--lr", train_args.lr, "learning rate");
    tr->add_option("--momentum", train_args.momentum);
    tr->add_option("--weight-decay", train_args.weight_decay);
    tr->add_option("--lr-decay-every", train_args.lr_decay_every);
    tr->add_option("--lr-decay", train_args.lr_decay);
    tr->add_option("--seed", train_args.seed, "RNG seed");
    tr->add_option("--out", train_args.out, "weight file to write")->required();

    CropArgs crop_args;
    auto* cr = app.add_subcommand("crop", "crop a single image");
    cr->add_option("--weights", crop_args.weights)->required();
    cr->add_option("--image", crop_args.image, "input PPM")->required();
    cr->add_option("--out", crop_args.out, "output JSON path")->required();
    cr->add_option("--overlay", crop_args.overlay, "optional overlay PPM path");
    cr->add_option("--seed", crop_args.seed, "RNG seed (accepted for uniformity)");

    EvalArgs eval_args;
    auto* ev = app.add_subcommand("eval", "evaluate cropping accuracy on a dataset");
    ev->add_option("--weights", eval_args.weights)->required();
    ev->add_option("--data", eval_args.data, "JSONL annotation file")->required();
    ev->add_option("--report", eval_args.report, "report directory")->required();
    ev->add_option("--jobs", eval_args.jobs, "parallel workers")->check(CLI::PositiveNumber);
    ev->add_option("--seed", eval_args.seed, "RNG seed (accepted for uniformity)");

    GradcheckArgs gc_args;
    auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient checks");
    gc->add_option("--module", gc_args.module)->check(CLI::IsMember({"abp", "aa", "all"}));
    gc->add_option("--seed", gc_args.seed, "RNG seed (accepted for uniformity)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // exits 0 with usage text
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gen_args);
        if (tr->parsed()) return cmd_train(train_args);
        if (cr->parsed()) return cmd_crop(crop_args);
        if (ev->parsed()) return cmd_eval(eval_args);
        if (gc->parsed()) return cmd_gradcheck(gc_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
