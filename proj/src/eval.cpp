#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>

#include "autocrop/cascade.hpp"
#include "autocrop/harness.hpp"

namespace autocrop {

namespace {

struct RecordOutcome {
    bool ok = false;
    std::string warning;
    std::vector<EvalRow> rows;
};

RecordOutcome eval_record(const DatasetRecord& rec, const ParamStore& params,
                          const ModelConfig& cfg, const std::string& base_dir) {
    RecordOutcome out;
    const std::filesystem::path path = std::filesystem::path(base_dir) / rec.image;
    Tensor image;
    try {
        image = to_tensor(read_ppm(path.string()));
    } catch (const std::exception& e) {
        out.warning = std::string("skipping '") + rec.image + "': " + e.what();
        return out;
    }
    const CropResult crop = crop_image(image, params, cfg);
    const int w = static_cast<int>(image.extent(2));
    const int h = static_cast<int>(image.extent(1));
    for (const AnnotatorBox& g : rec.gt_boxes) {
        out.rows.push_back({rec.image, g.annotator, iou(crop.final_original, g.box),
                            bde(crop.final_original, g.box, w, h)});
    }
    out.ok = true;
    return out;
}

}  // namespace

EvalReport eval_dataset(const ParamStore& params, const ModelConfig& cfg,
                        const std::vector<DatasetRecord>& records, const std::string& base_dir,
                        int jobs) {
    for (const auto& rec : records) {
        if (rec.gt_boxes.empty()) {
            throw std::invalid_argument("eval_dataset: record '" + rec.image +
                                        "' has no cropping groundtruth");
        }
    }
    std::vector<RecordOutcome> outcomes(records.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            outcomes[i] = eval_record(records[i], params, cfg, base_dir);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= records.size()) break;
                outcomes[i] = eval_record(records[i], params, cfg, base_dir);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    EvalReport report;
    for (const auto& o : outcomes) {
        if (!o.ok) {
            std::cerr << "warning: " << o.warning << "\n";
            ++report.skipped;
            continue;
        }
        ++report.evaluated;
        report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
    }
    double iou_sum = 0.0, bde_sum = 0.0;
    for (const EvalRow& row : report.rows) {
        AnnotatorStats& s = report.per_annotator[row.annotator];
        s.mean_iou += row.iou;
        s.mean_bde += row.bde;
        ++s.count;
        iou_sum += row.iou;
        bde_sum += row.bde;
    }
    for (auto& [annotator, s] : report.per_annotator) {
        s.mean_iou /= static_cast<double>(s.count);
        s.mean_bde /= static_cast<double>(s.count);
    }
    if (!report.rows.empty()) {
        report.mean_iou = iou_sum / static_cast<double>(report.rows.size());
        report.mean_bde = bde_sum / static_cast<double>(report.rows.size());
    }
    return report;
}

}  // namespace autocrop
