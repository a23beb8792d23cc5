#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autocrop/box.hpp"
#include "autocrop/model_config.hpp"
#include "autocrop/netpbm.hpp"
#include "autocrop/param_store.hpp"
#include "autocrop/tensor.hpp"
#include "autocrop/window_search.hpp"

namespace autocrop {

// Boundary displacement error: per-edge displacement normalized by the image
// extent along that edge's axis, averaged over the four edges.
double bde(const BoxCorners& pred, const BoxCorners& gt, int image_w, int image_h);

// ---------------------------------------------------------------- dataset

struct AnnotatorBox {
    int annotator = 0;
    BoxCorners box;
};

struct DatasetRecord {
    std::string image;  // path, relative to the annotation file
    std::vector<AnnotatorBox> gt_boxes;
    std::optional<BoxCorners> attention_box;
    std::optional<int> aesthetic_label;
};

std::vector<DatasetRecord> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<DatasetRecord>& records);

// --------------------------------------------------------------- synthetic

struct SyntheticSpec {
    std::size_t width = 224;
    std::size_t height = 224;
    int min_blobs = 1;
    int max_blobs = 3;
    double min_sigma = 20.0;
    double max_sigma = 30.0;
    double lambda = 0.9;  // groundtruth-box mass threshold
};

struct AttentionSample {
    ImageU8 image;
    AttentionMap map;
    BoxCorners gt_box;
};

// Gaussian-blob attention map plus a correlated color image; the groundtruth
// box is the minimal window holding > lambda of the map's mass.
AttentionSample gen_synthetic_attention(const SyntheticSpec& spec, std::uint64_t seed);

struct AestheticsSample {
    ImageU8 image;
    int label = 0;  // 1 high quality, 0 low
};

// High-quality images place a salient disc at a rule-of-thirds point on a
// graded background; low-quality ones push it flush against a border and add
// clutter.
AestheticsSample gen_synthetic_aesthetics(const SyntheticSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------- training

struct TrainConfig {
    std::size_t iterations = 2000;
    double lr = 0.002;
    double momentum = 0.9;
    double weight_decay = 0.0001;
    std::size_t lr_decay_every = 10000;
    double lr_decay = 0.1;
    std::uint64_t seed = 0;
};

struct AttentionTrainSample {
    Tensor image;  // [3,H,W] in [0,1]
    BoxCorners gt_box;
};

struct AestheticsTrainSample {
    Tensor image;
    int label = 0;
};

struct TrainResult {
    std::vector<double> loss_curve;
};

// Mixed-batch loop: each iteration draws 2 attention + 2 aesthetics samples,
// sums the two branch losses (shared conv1/conv2 receive both gradients) and
// takes a momentum-SGD step.
TrainResult train(ParamStore& params, const std::vector<AttentionTrainSample>& attention_set,
                  const std::vector<AestheticsTrainSample>& aesthetics_set,
                  const TrainConfig& cfg, const ModelConfig& model_cfg);

// -------------------------------------------------------------- evaluation

struct EvalRow {
    std::string image;
    int annotator = 0;
    double iou = 0.0;
    double bde = 0.0;
};

struct AnnotatorStats {
    double mean_iou = 0.0;
    double mean_bde = 0.0;
    std::size_t count = 0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    std::map<int, AnnotatorStats> per_annotator;
    double mean_iou = 0.0;
    double mean_bde = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

// Runs the full cascade per record and scores the final crop (original
// coordinates) against every annotator box. Unreadable images are skipped
// with a warning and counted.
EvalReport eval_dataset(const ParamStore& params, const ModelConfig& cfg,
                        const std::vector<DatasetRecord>& records, const std::string& base_dir,
                        int jobs = 1);

std::string report_csv(const EvalReport& report);
std::string report_summary_json(const EvalReport& report);

}  // namespace autocrop
