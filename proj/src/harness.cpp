#include "autocrop/harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace autocrop {

double bde(const BoxCorners& pred, const BoxCorners& gt, int image_w, int image_h) {
    if (image_w <= 0 || image_h <= 0) throw std::invalid_argument("bde: non-positive image size");
    const double w = image_w, h = image_h;
    return (std::abs(pred.x0 - gt.x0) / w + std::abs(pred.x1 - gt.x1) / w +
            std::abs(pred.y0 - gt.y0) / h + std::abs(pred.y1 - gt.y1) / h) /
           4.0;
}

namespace {

BoxCorners box_from_json(const nlohmann::json& a) {
    if (!a.is_array() || a.size() != 4) throw std::runtime_error("dataset: bad box array");
    return {a[0].get<int>(), a[1].get<int>(), a[2].get<int>(), a[3].get<int>()};
}

nlohmann::json box_to_json(const BoxCorners& b) {
    return nlohmann::json::array({b.x0, b.y0, b.x1, b.y1});
}

}  // namespace

std::vector<DatasetRecord> read_jsonl(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("dataset: cannot open '" + path + "'");
    std::vector<DatasetRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("dataset: '" + path + "' line " + std::to_string(lineno) +
                                     ": " + e.what());
        }
        DatasetRecord rec;
        rec.image = j.at("image").get<std::string>();
        if (j.contains("gt_boxes") && !j["gt_boxes"].is_null()) {
            for (const auto& g : j["gt_boxes"]) {
                rec.gt_boxes.push_back({g.at("annotator").get<int>(), box_from_json(g.at("box"))});
            }
        }
        if (j.contains("attention_box") && !j["attention_box"].is_null()) {
            rec.attention_box = box_from_json(j["attention_box"]);
        }
        if (j.contains("label") && !j["label"].is_null()) {
            rec.aesthetic_label = j["label"].get<int>();
        }
        if (rec.gt_boxes.empty() && !rec.attention_box && !rec.aesthetic_label) {
            throw std::runtime_error("dataset: '" + path + "' line " + std::to_string(lineno) +
                                     ": record carries no annotation");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_jsonl(const std::string& path, const std::vector<DatasetRecord>& records) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("dataset: cannot open '" + path + "' for writing");
    for (const auto& rec : records) {
        nlohmann::json j;
        j["image"] = rec.image;
        auto boxes = nlohmann::json::array();
        for (const auto& g : rec.gt_boxes) {
            boxes.push_back({{"annotator", g.annotator}, {"box", box_to_json(g.box)}});
        }
        j["gt_boxes"] = boxes;
        j["attention_box"] =
            rec.attention_box ? box_to_json(*rec.attention_box) : nlohmann::json(nullptr);
        j["label"] = rec.aesthetic_label ? nlohmann::json(*rec.aesthetic_label)
                                         : nlohmann::json(nullptr);
        os << j.dump() << "\n";
    }
}

std::string report_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "image,annotator,iou,bde\n";
    os.precision(12);
    for (const auto& row : report.rows) {
        os << row.image << "," << row.annotator << "," << row.iou << "," << row.bde << "\n";
    }
    return os.str();
}

std::string report_summary_json(const EvalReport& report) {
    nlohmann::json j;
    j["mean_iou"] = report.mean_iou;
    j["mean_bde"] = report.mean_bde;
    j["evaluated"] = report.evaluated;
    j["skipped"] = report.skipped;
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [annotator, stats] : report.per_annotator) {
        per[std::to_string(annotator)] = {{"mean_iou", stats.mean_iou},
                                          {"mean_bde", stats.mean_bde},
                                          {"count", stats.count}};
    }
    j["per_annotator"] = per;
    return j.dump(2);
}

}  // namespace autocrop
