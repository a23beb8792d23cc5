#pragma once

#include <string>
#include <vector>

#include "autocrop/box.hpp"
#include "autocrop/model_config.hpp"
#include "autocrop/netpbm.hpp"
#include "autocrop/param_store.hpp"
#include "autocrop/tensor.hpp"

namespace autocrop {

// Corner offset sequences applied around the initial crop: top-left corners
// move outward by {-40..0} and bottom-right by {0..40}, step 8, giving
// 6^4 = 1296 raw combinations before border clamping and dedup.
std::vector<int> top_left_offsets();
std::vector<int> bottom_right_offsets();

struct CropCandidateSet {
    BoxCorners initial;
    std::vector<BoxCorners> candidates;  // distinct, each contains `initial`
};

CropCandidateSet gen_candidates(const BoxCorners& initial, int image_w, int image_h);

// Maps a box from resized coordinates back to the original resolution
// (corners divided by `scale`, rounded, clamped).
BoxCorners scale_box(const BoxCorners& box, double scale, int target_w, int target_h);

struct CropResult {
    BoxCorners initial;            // resized (min-side) coordinates
    BoxCorners final_crop;         // resized coordinates
    BoxCorners initial_original;   // original-resolution coordinates
    BoxCorners final_original;
    std::vector<double> candidate_scores;  // q-hat for the high-quality class
    std::size_t best_index = 0;
    double scale = 1.0;
};

// Full determining-adjusting cascade: resize, shared trunk once, ABP initial
// crop, candidate generation, AA scoring, argmax selection, back-mapping.
CropResult crop_image(const Tensor& image, const ParamStore& params, const ModelConfig& cfg);

std::string crop_result_json(const CropResult& result);

// 2px crop border drawn into a copy of the image.
ImageU8 draw_crop_overlay(const ImageU8& image, const BoxCorners& box);

}  // namespace autocrop
