#pragma once

#include <cstddef>
#include <vector>

namespace autocrop {

// Channel counts and detector hyperparameters for both sub-networks. The
// trunk mirrors VGG block structure at reduced width; conv1/conv2 are shared
// between the two branches.
struct ModelConfig {
    // shared trunk
    std::size_t c1 = 4;
    std::size_t c2 = 8;

    // attention-box branch: three more blocks, stride 16 at the head
    std::size_t abp_c3 = 8;
    std::size_t abp_c4 = 16;
    std::size_t abp_c5 = 16;
    std::size_t head_dim = 32;
    // square anchors at four scales: with few positive anchors per image the
    // classifier ranks a small anchor set far more reliably, and the box
    // regressor absorbs aspect-ratio deviations
    std::vector<double> anchor_scales = {64.0, 96.0, 136.0, 190.0};
    std::vector<double> anchor_ratios = {1.0};  // w:h
    double pos_iou = 0.7;
    double neg_iou = 0.3;
    std::size_t abp_stride = 16;

    // aesthetics branch: two more blocks, stride 8, RoI-pooled classifier
    std::size_t aa_c3 = 8;
    std::size_t aa_c4 = 8;
    std::size_t fc_hidden = 256;
    std::size_t roi_bins = 7;
    std::size_t aa_stride = 8;

    std::size_t min_side = 224;

    std::size_t anchors_per_cell() const { return anchor_scales.size() * anchor_ratios.size(); }

    void validate() const;
};

}  // namespace autocrop
