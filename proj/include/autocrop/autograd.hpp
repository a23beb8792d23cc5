#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "autocrop/tensor.hpp"

namespace autocrop::ag {

// Reverse-mode tape node. Forward ops allocate nodes; backward() walks the
// recorded graph once. A graph is single-use: re-running a forward pass
// builds fresh nodes.
struct Node {
    Tensor value;
    std::vector<double> grad;  // same length as value when requires_grad
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;  // pushes grad into parents

    explicit Node(Tensor v, bool rg) : value(std::move(v)), requires_grad(rg) {
        if (requires_grad) grad.assign(value.numel(), 0.0);
    }
};

using Var = std::shared_ptr<Node>;

Var leaf(Tensor value, bool requires_grad = false);

// value copied out of a leaf's accumulated gradient
Tensor grad_of(const Var& v);

// Elementwise / reduction primitives.
Var add(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double c);
Var sum(const Var& a);

// Neural layers. Convolution is stride-1 with square kernels (1x1 or 3x3 in
// practice); weight shape [O,C,k,k], bias [O], input [C,H,W].
Var conv2d(const Var& input, const Var& weight, const Var& bias, std::size_t pad);
Var relu(const Var& input);
Var maxpool2x2(const Var& input);
// input [N,in], weight [out,in], bias [out] -> [N,out]
Var linear(const Var& input, const Var& weight, const Var& bias);
// flatten all but the first axis: [N,...] -> [N,rest]
Var flatten_rows(const Var& input);

// Max RoI pooling. Boxes are half-open pixel rectangles {x0,y0,x1,y1} in
// image coordinates; they are mapped to the feature grid by feature_stride
// (x0,y0 floored, x1,y1 ceiled). Output [N,C,n,n]; gradient routes to the
// argmax cell of each bin (first maximum in scan order on ties).
Var roi_pool(const Var& feat, const std::vector<std::array<int, 4>>& boxes,
             std::size_t bins, std::size_t feature_stride);

// Reorders detector-head maps into per-anchor rows. Input [G*A,fh,fw] with G
// values per anchor interleaved along channels; row index is
// (y*fw + x)*A + a, matching AnchorGrid ordering.
Var anchor_rows(const Var& head_out, std::size_t anchors_per_cell, std::size_t group);

// Mean over items of -log softmax(logits[row])[label]; logits [N,2].
Var softmax_cross_entropy(const Var& logits,
                          const std::vector<std::pair<std::size_t, int>>& items);

// Mean over items of sum_k smooth_l1(pred[row][k] - target[k]); pred [N,K].
struct RegressionTarget {
    std::size_t row;
    std::vector<double> target;
};
Var smooth_l1_loss(const Var& pred, const std::vector<RegressionTarget>& targets);

// Runs the recorded graph backwards from a scalar node, accumulating into
// every requires_grad node's grad buffer.
void backward(const Var& loss);

// Plain (non-tape) helpers.
double smooth_l1(double x);
double smooth_l1_deriv(double x);
// Numerically stable two-class softmax.
std::pair<double, double> softmax2(double logit1, double logit0);

}  // namespace autocrop::ag
