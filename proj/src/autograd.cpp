#include "autocrop/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace autocrop {

void check_finite(const Tensor& t, const std::string& context) {
    for (double v : t.values()) {
        if (!std::isfinite(v)) {
            throw std::runtime_error(context + ": non-finite value encountered");
        }
    }
}

}  // namespace autocrop

namespace autocrop::ag {

namespace {

Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backprop) {
    bool rg = false;
    for (const auto& p : parents) rg = rg || p->requires_grad;
    auto n = std::make_shared<Node>(std::move(value), rg);
    if (rg) {
        n->parents = std::move(parents);
        n->backprop = std::move(backprop);
    }
    return n;
}

void require_rank(const Var& v, std::size_t rank, const char* op) {
    if (v->value.rank() != rank) {
        throw std::invalid_argument(std::string(op) + ": expected rank " + std::to_string(rank) +
                                    " tensor, got shape " + v->value.shape_str());
    }
}

}  // namespace

Var leaf(Tensor value, bool requires_grad) {
    return std::make_shared<Node>(std::move(value), requires_grad);
}

Tensor grad_of(const Var& v) {
    if (!v->requires_grad) throw std::invalid_argument("grad_of: node does not track gradients");
    return Tensor(v->value.shape(), v->grad);
}

Var add(const Var& a, const Var& b) {
    if (!a->value.same_shape(b->value)) {
        throw std::invalid_argument("add: shape mismatch " + a->value.shape_str() + " vs " +
                                    b->value.shape_str());
    }
    Tensor out(a->value.shape());
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] + b->value[i];
    return make_node(std::move(out), {a, b}, [](Node& n) {
        for (int pi = 0; pi < 2; ++pi) {
            Node& p = *n.parents[pi];
            if (!p.requires_grad) continue;
            for (std::size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += n.grad[i];
        }
    });
}

Var mul(const Var& a, const Var& b) {
    if (!a->value.same_shape(b->value)) {
        throw std::invalid_argument("mul: shape mismatch " + a->value.shape_str() + " vs " +
                                    b->value.shape_str());
    }
    Tensor out(a->value.shape());
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] * b->value[i];
    return make_node(std::move(out), {a, b}, [](Node& n) {
        Node& a = *n.parents[0];
        Node& b = *n.parents[1];
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
            if (a.requires_grad) a.grad[i] += n.grad[i] * b.value[i];
            if (b.requires_grad) b.grad[i] += n.grad[i] * a.value[i];
        }
    });
}

Var scale(const Var& a, double c) {
    Tensor out(a->value.shape());
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] * c;
    return make_node(std::move(out), {a}, [c](Node& n) {
        Node& a = *n.parents[0];
        for (std::size_t i = 0; i < n.grad.size(); ++i) a.grad[i] += n.grad[i] * c;
    });
}

Var sum(const Var& a) {
    double s = 0.0;
    for (double v : a->value.values()) s += v;
    Tensor out({1});
    out[0] = s;
    return make_node(std::move(out), {a}, [](Node& n) {
        Node& a = *n.parents[0];
        for (std::size_t i = 0; i < a.grad.size(); ++i) a.grad[i] += n.grad[0];
    });
}

Var conv2d(const Var& input, const Var& weight, const Var& bias, std::size_t pad) {
    require_rank(input, 3, "conv2d input");
    require_rank(weight, 4, "conv2d weight");
    require_rank(bias, 1, "conv2d bias");
    const auto& xs = input->value.shape();
    const auto& ws = weight->value.shape();
    const std::size_t C = xs[0], H = xs[1], W = xs[2];
    const std::size_t O = ws[0], K = ws[2];
    if (ws[1] != C || ws[3] != K) {
        throw std::invalid_argument("conv2d: weight " + weight->value.shape_str() +
                                    " incompatible with input " + input->value.shape_str());
    }
    if (bias->value.numel() != O) throw std::invalid_argument("conv2d: bias extent mismatch");
    if (H + 2 * pad < K || W + 2 * pad < K) {
        throw std::invalid_argument("conv2d: input " + input->value.shape_str() +
                                    " too small for kernel " + std::to_string(K));
    }
    const std::size_t OH = H + 2 * pad - K + 1, OW = W + 2 * pad - K + 1;

    Tensor out({O, OH, OW});
    const double* x = input->value.data();
    const double* w = weight->value.data();
    const double* b = bias->value.data();
    double* y = out.data();
    const long ipad = static_cast<long>(pad);
    for (std::size_t o = 0; o < O; ++o) {
        double* yo = y + o * OH * OW;
        for (std::size_t i = 0; i < OH * OW; ++i) yo[i] = b[o];
        for (std::size_t c = 0; c < C; ++c) {
            const double* xc = x + c * H * W;
            for (std::size_t ky = 0; ky < K; ++ky) {
                for (std::size_t kx = 0; kx < K; ++kx) {
                    const double wv = w[((o * C + c) * K + ky) * K + kx];
                    if (wv == 0.0) continue;
                    const long dy = static_cast<long>(ky) - ipad;
                    const long dx = static_cast<long>(kx) - ipad;
                    const long oy0 = std::max(0L, -dy);
                    const long oy1 = std::min<long>(OH, static_cast<long>(H) - dy);
                    const long ox0 = std::max(0L, -dx);
                    const long ox1 = std::min<long>(OW, static_cast<long>(W) - dx);
                    for (long oy = oy0; oy < oy1; ++oy) {
                        double* yrow = yo + oy * static_cast<long>(OW);
                        const double* xrow = xc + (oy + dy) * static_cast<long>(W) + dx;
                        for (long ox = ox0; ox < ox1; ++ox) yrow[ox] += wv * xrow[ox];
                    }
                }
            }
        }
    }

    auto back = [C, H, W, O, K, OH, OW, ipad](Node& n) {
        Node& in = *n.parents[0];
        Node& wt = *n.parents[1];
        Node& bs = *n.parents[2];
        const double* g = n.grad.data();
        const double* x = in.value.data();
        const double* w = wt.value.data();
        if (bs.requires_grad) {
            for (std::size_t o = 0; o < O; ++o) {
                double s = 0.0;
                const double* go = g + o * OH * OW;
                for (std::size_t i = 0; i < OH * OW; ++i) s += go[i];
                bs.grad[o] += s;
            }
        }
        for (std::size_t o = 0; o < O; ++o) {
            const double* go = g + o * OH * OW;
            for (std::size_t c = 0; c < C; ++c) {
                const double* xc = x + c * H * W;
                double* gxc = in.requires_grad ? in.grad.data() + c * H * W : nullptr;
                for (std::size_t ky = 0; ky < K; ++ky) {
                    for (std::size_t kx = 0; kx < K; ++kx) {
                        const std::size_t widx = ((o * C + c) * K + ky) * K + kx;
                        const double wv = w[widx];
                        const long dy = static_cast<long>(ky) - ipad;
                        const long dx = static_cast<long>(kx) - ipad;
                        const long oy0 = std::max(0L, -dy);
                        const long oy1 = std::min<long>(OH, static_cast<long>(H) - dy);
                        const long ox0 = std::max(0L, -dx);
                        const long ox1 = std::min<long>(OW, static_cast<long>(W) - dx);
                        double wg = 0.0;
                        for (long oy = oy0; oy < oy1; ++oy) {
                            const double* grow = go + oy * static_cast<long>(OW);
                            const double* xrow = xc + (oy + dy) * static_cast<long>(W) + dx;
                            double* gxrow =
                                gxc ? gxc + (oy + dy) * static_cast<long>(W) + dx : nullptr;
                            for (long ox = ox0; ox < ox1; ++ox) {
                                wg += grow[ox] * xrow[ox];
                                if (gxrow) gxrow[ox] += grow[ox] * wv;
                            }
                        }
                        if (wt.requires_grad) wt.grad[widx] += wg;
                    }
                }
            }
        }
    };
    return make_node(std::move(out), {input, weight, bias}, back);
}

Var relu(const Var& input) {
    Tensor out(input->value.shape());
    for (std::size_t i = 0; i < out.numel(); ++i) out[i] = std::max(0.0, input->value[i]);
    return make_node(std::move(out), {input}, [](Node& n) {
        Node& in = *n.parents[0];
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
            if (in.value[i] > 0.0) in.grad[i] += n.grad[i];
        }
    });
}

Var maxpool2x2(const Var& input) {
    require_rank(input, 3, "maxpool2x2");
    const auto& xs = input->value.shape();
    const std::size_t C = xs[0], H = xs[1], W = xs[2];
    if (H % 2 != 0 || W % 2 != 0) {
        throw std::invalid_argument("maxpool2x2: odd spatial extents rejected, input " +
                                    input->value.shape_str());
    }
    const std::size_t OH = H / 2, OW = W / 2;
    Tensor out({C, OH, OW});
    auto argmax = std::make_shared<std::vector<std::size_t>>(C * OH * OW);
    const double* x = input->value.data();
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t oy = 0; oy < OH; ++oy) {
            for (std::size_t ox = 0; ox < OW; ++ox) {
                std::size_t best = (c * H + 2 * oy) * W + 2 * ox;
                double bv = x[best];
                const std::size_t cand[3] = {best + 1, best + W, best + W + 1};
                for (std::size_t k : cand) {
                    if (x[k] > bv) {
                        bv = x[k];
                        best = k;
                    }
                }
                out[(c * OH + oy) * OW + ox] = bv;
                (*argmax)[(c * OH + oy) * OW + ox] = best;
            }
        }
    }
    return make_node(std::move(out), {input}, [argmax](Node& n) {
        Node& in = *n.parents[0];
        for (std::size_t i = 0; i < n.grad.size(); ++i) in.grad[(*argmax)[i]] += n.grad[i];
    });
}

Var linear(const Var& input, const Var& weight, const Var& bias) {
    require_rank(input, 2, "linear input");
    require_rank(weight, 2, "linear weight");
    const std::size_t N = input->value.extent(0), IN = input->value.extent(1);
    const std::size_t OUT = weight->value.extent(0);
    if (weight->value.extent(1) != IN || bias->value.numel() != OUT) {
        throw std::invalid_argument("linear: weight " + weight->value.shape_str() +
                                    " incompatible with input " + input->value.shape_str());
    }
    Tensor out({N, OUT});
    const double* x = input->value.data();
    const double* w = weight->value.data();
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t o = 0; o < OUT; ++o) {
            double s = bias->value[o];
            const double* wr = w + o * IN;
            const double* xr = x + n * IN;
            for (std::size_t i = 0; i < IN; ++i) s += wr[i] * xr[i];
            out[n * OUT + o] = s;
        }
    }
    return make_node(std::move(out), {input, weight, bias}, [N, IN, OUT](Node& nd) {
        Node& in = *nd.parents[0];
        Node& wt = *nd.parents[1];
        Node& bs = *nd.parents[2];
        const double* g = nd.grad.data();
        for (std::size_t n = 0; n < N; ++n) {
            for (std::size_t o = 0; o < OUT; ++o) {
                const double go = g[n * OUT + o];
                if (go == 0.0) continue;
                if (bs.requires_grad) bs.grad[o] += go;
                const double* xr = in.value.data() + n * IN;
                const double* wr = wt.value.data() + o * IN;
                for (std::size_t i = 0; i < IN; ++i) {
                    if (wt.requires_grad) wt.grad[o * IN + i] += go * xr[i];
                    if (in.requires_grad) in.grad[n * IN + i] += go * wr[i];
                }
            }
        }
    });
}

Var flatten_rows(const Var& input) {
    if (input->value.rank() < 2) throw std::invalid_argument("flatten_rows: rank < 2");
    const std::size_t N = input->value.extent(0);
    Tensor out({N, input->value.numel() / N}, input->value.values());
    return make_node(std::move(out), {input}, [](Node& n) {
        Node& in = *n.parents[0];
        for (std::size_t i = 0; i < n.grad.size(); ++i) in.grad[i] += n.grad[i];
    });
}

Var roi_pool(const Var& feat, const std::vector<std::array<int, 4>>& boxes, std::size_t bins,
             std::size_t feature_stride) {
    require_rank(feat, 3, "roi_pool");
    if (boxes.empty()) throw std::invalid_argument("roi_pool: empty box list");
    const std::size_t C = feat->value.extent(0), FH = feat->value.extent(1),
                      FW = feat->value.extent(2);
    const std::size_t N = boxes.size(), n = bins;
    const auto s = static_cast<double>(feature_stride);

    Tensor out({N, C, n, n});
    auto argmax = std::make_shared<std::vector<std::size_t>>(N * C * n * n);
    const double* x = feat->value.data();
    for (std::size_t bi = 0; bi < N; ++bi) {
        const auto& b = boxes[bi];
        if (b[2] <= b[0] || b[3] <= b[1]) {
            throw std::invalid_argument("roi_pool: degenerate box at index " + std::to_string(bi));
        }
        long fx0 = static_cast<long>(std::floor(b[0] / s));
        long fy0 = static_cast<long>(std::floor(b[1] / s));
        long fx1 = static_cast<long>(std::ceil(b[2] / s));
        long fy1 = static_cast<long>(std::ceil(b[3] / s));
        if (fx1 <= 0 || fy1 <= 0 || fx0 >= static_cast<long>(FW) || fy0 >= static_cast<long>(FH)) {
            throw std::invalid_argument("roi_pool: box " + std::to_string(bi) +
                                        " lies fully outside the feature map");
        }
        fx0 = std::clamp<long>(fx0, 0, static_cast<long>(FW) - 1);
        fy0 = std::clamp<long>(fy0, 0, static_cast<long>(FH) - 1);
        fx1 = std::clamp<long>(fx1, fx0 + 1, static_cast<long>(FW));
        fy1 = std::clamp<long>(fy1, fy0 + 1, static_cast<long>(FH));
        const long LX = fx1 - fx0, LY = fy1 - fy0;
        for (std::size_t by = 0; by < n; ++by) {
            long y0 = fy0 + static_cast<long>(std::floor(double(by) * LY / n));
            long y1 = fy0 + static_cast<long>(std::ceil(double(by + 1) * LY / n));
            y0 = std::clamp(y0, fy0, fy1 - 1);
            y1 = std::clamp(y1, y0 + 1, fy1);
            for (std::size_t bx = 0; bx < n; ++bx) {
                long x0 = fx0 + static_cast<long>(std::floor(double(bx) * LX / n));
                long x1 = fx0 + static_cast<long>(std::ceil(double(bx + 1) * LX / n));
                x0 = std::clamp(x0, fx0, fx1 - 1);
                x1 = std::clamp(x1, x0 + 1, fx1);
                for (std::size_t c = 0; c < C; ++c) {
                    std::size_t best = (c * FH + y0) * FW + x0;
                    double bv = x[best];
                    for (long yy = y0; yy < y1; ++yy) {
                        for (long xx = x0; xx < x1; ++xx) {
                            const std::size_t idx = (c * FH + yy) * FW + xx;
                            if (x[idx] > bv) {
                                bv = x[idx];
                                best = idx;
                            }
                        }
                    }
                    const std::size_t oidx = ((bi * C + c) * n + by) * n + bx;
                    out[oidx] = bv;
                    (*argmax)[oidx] = best;
                }
            }
        }
    }
    return make_node(std::move(out), {feat}, [argmax](Node& nd) {
        Node& in = *nd.parents[0];
        for (std::size_t i = 0; i < nd.grad.size(); ++i) in.grad[(*argmax)[i]] += nd.grad[i];
    });
}

Var anchor_rows(const Var& head_out, std::size_t anchors_per_cell, std::size_t group) {
    require_rank(head_out, 3, "anchor_rows");
    const std::size_t CH = head_out->value.extent(0), FH = head_out->value.extent(1),
                      FW = head_out->value.extent(2);
    const std::size_t A = anchors_per_cell, G = group;
    if (CH != A * G) {
        throw std::invalid_argument("anchor_rows: channel count " + std::to_string(CH) +
                                    " != anchors*group " + std::to_string(A * G));
    }
    const std::size_t N = FH * FW * A;
    Tensor out({N, G});
    for (std::size_t y = 0; y < FH; ++y) {
        for (std::size_t xx = 0; xx < FW; ++xx) {
            for (std::size_t a = 0; a < A; ++a) {
                const std::size_t row = (y * FW + xx) * A + a;
                for (std::size_t g = 0; g < G; ++g) {
                    out[row * G + g] = head_out->value[((a * G + g) * FH + y) * FW + xx];
                }
            }
        }
    }
    return make_node(std::move(out), {head_out}, [A, G, FH, FW](Node& nd) {
        Node& in = *nd.parents[0];
        for (std::size_t y = 0; y < FH; ++y) {
            for (std::size_t xx = 0; xx < FW; ++xx) {
                for (std::size_t a = 0; a < A; ++a) {
                    const std::size_t row = (y * FW + xx) * A + a;
                    for (std::size_t g = 0; g < G; ++g) {
                        in.grad[((a * G + g) * FH + y) * FW + xx] += nd.grad[row * G + g];
                    }
                }
            }
        }
    });
}

Var softmax_cross_entropy(const Var& logits,
                          const std::vector<std::pair<std::size_t, int>>& items) {
    require_rank(logits, 2, "softmax_cross_entropy");
    if (logits->value.extent(1) != 2) {
        throw std::invalid_argument("softmax_cross_entropy: expected 2 logits per row");
    }
    if (items.empty()) throw std::invalid_argument("softmax_cross_entropy: no items");
    const std::size_t N = logits->value.extent(0);
    double total = 0.0;
    for (const auto& [row, label] : items) {
        if (row >= N || (label != 0 && label != 1)) {
            throw std::invalid_argument("softmax_cross_entropy: bad item (row " +
                                        std::to_string(row) + ")");
        }
        const double l1 = logits->value[row * 2 + 0];  // class 1 logit in column 0
        const double l0 = logits->value[row * 2 + 1];
        const double m = std::max(l1, l0);
        const double lse = m + std::log(std::exp(l1 - m) + std::exp(l0 - m));
        total += lse - (label == 1 ? l1 : l0);
    }
    Tensor out({1});
    out[0] = total / static_cast<double>(items.size());
    auto its = items;
    return make_node(std::move(out), {logits}, [its](Node& nd) {
        Node& lg = *nd.parents[0];
        const double g = nd.grad[0] / static_cast<double>(its.size());
        for (const auto& [row, label] : its) {
            const auto [p1, p0] = softmax2(lg.value[row * 2 + 0], lg.value[row * 2 + 1]);
            lg.grad[row * 2 + 0] += g * (p1 - (label == 1 ? 1.0 : 0.0));
            lg.grad[row * 2 + 1] += g * (p0 - (label == 0 ? 1.0 : 0.0));
        }
    });
}

Var smooth_l1_loss(const Var& pred, const std::vector<RegressionTarget>& targets) {
    require_rank(pred, 2, "smooth_l1_loss");
    if (targets.empty()) throw std::invalid_argument("smooth_l1_loss: no targets");
    const std::size_t N = pred->value.extent(0), K = pred->value.extent(1);
    double total = 0.0;
    for (const auto& t : targets) {
        if (t.row >= N || t.target.size() != K) {
            throw std::invalid_argument("smooth_l1_loss: bad target row");
        }
        for (std::size_t k = 0; k < K; ++k) {
            total += smooth_l1(pred->value[t.row * K + k] - t.target[k]);
        }
    }
    Tensor out({1});
    out[0] = total / static_cast<double>(targets.size());
    auto ts = targets;
    return make_node(std::move(out), {pred}, [ts, K](Node& nd) {
        Node& p = *nd.parents[0];
        const double g = nd.grad[0] / static_cast<double>(ts.size());
        for (const auto& t : ts) {
            for (std::size_t k = 0; k < K; ++k) {
                p.grad[t.row * K + k] += g * smooth_l1_deriv(p.value[t.row * K + k] - t.target[k]);
            }
        }
    });
}

void backward(const Var& loss) {
    if (loss->value.numel() != 1) {
        throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                    loss->value.shape_str());
    }
    if (!loss->requires_grad) return;

    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Var, std::size_t>> stack;
    stack.emplace_back(loss, 0);
    seen.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Var child = node->parents[next++];
            if (child->requires_grad && seen.insert(child.get()).second) {
                stack.emplace_back(std::move(child), 0);
            }
        } else {
            order.push_back(node.get());
            stack.pop_back();
        }
    }
    loss->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->backprop) (*it)->backprop(**it);
    }
}

double smooth_l1(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("smooth_l1: non-finite input");
    const double ax = std::abs(x);
    return ax < 1.0 ? 0.5 * x * x : ax - 0.5;
}

double smooth_l1_deriv(double x) {
    const double ax = std::abs(x);
    if (ax < 1.0) return x;
    return x > 0.0 ? 1.0 : -1.0;
}

std::pair<double, double> softmax2(double logit1, double logit0) {
    if (!std::isfinite(logit1) || !std::isfinite(logit0)) {
        throw std::invalid_argument("softmax2: non-finite logits");
    }
    const double m = std::max(logit1, logit0);
    const double e1 = std::exp(logit1 - m);
    const double e0 = std::exp(logit0 - m);
    return {e1 / (e1 + e0), e0 / (e1 + e0)};
}

}  // namespace autocrop::ag
