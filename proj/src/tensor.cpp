#include "ctdn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ctdn/parallel.hpp"

namespace ctdn {

std::string shape_string(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        os << shape[i] << (i + 1 < shape.size() ? "," : "");
    }
    os << "]";
    return os.str();
}

std::int64_t shape_numel(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int e : shape) {
        if (e < 0) throw std::invalid_argument("tensor extent must be >= 0, got " + shape_string(shape));
        n *= e;
    }
    return n;
}

TensorPtr Tensor::create(std::vector<int> shape, bool requires_grad) {
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->values.assign(static_cast<std::size_t>(shape_numel(t->shape)), 0.0);
    t->requires_grad = requires_grad;
    if (requires_grad) t->grad.assign(t->values.size(), 0.0);
    return t;
}

TensorPtr Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
    auto t = create(std::move(shape), requires_grad);
    std::fill(t->values.begin(), t->values.end(), value);
    return t;
}

TensorPtr Tensor::from_values(std::vector<int> shape, std::vector<double> v, bool requires_grad) {
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    if (static_cast<std::int64_t>(v.size()) != shape_numel(t->shape)) {
        throw std::invalid_argument("from_values: " + std::to_string(v.size()) +
                                    " values do not fill shape " + shape_string(t->shape));
    }
    t->values = std::move(v);
    t->requires_grad = requires_grad;
    if (requires_grad) t->grad.assign(t->values.size(), 0.0);
    return t;
}

TensorPtr Tensor::randn(std::vector<int> shape, double mean, double sd, RngStream& rng,
                        bool requires_grad) {
    auto t = create(std::move(shape), requires_grad);
    for (auto& x : t->values) x = rng.normal(mean, sd);
    return t;
}

double Tensor::item() const {
    if (values.size() != 1) {
        throw std::invalid_argument("item: tensor has " + std::to_string(values.size()) +
                                    " elements, expected 1");
    }
    return values[0];
}

void Tensor::zero_grad() {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    backward_done = false;
}

void Tensor::ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
}

TensorPtr Tensor::detach() const {
    auto t = std::make_shared<Tensor>();
    t->shape = shape;
    t->values = values;
    return t;
}

namespace {

TensorPtr make_result(std::vector<int> shape, std::vector<TensorPtr> parents) {
    auto t = std::make_shared<Tensor>();
    t->shape = std::move(shape);
    t->values.assign(static_cast<std::size_t>(shape_numel(t->shape)), 0.0);
    for (const auto& p : parents) {
        if (p->requires_grad) {
            t->requires_grad = true;
            break;
        }
    }
    if (t->requires_grad) t->parents = std::move(parents);
    return t;
}

void check_same_shape(const char* op, const TensorPtr& a, const TensorPtr& b) {
    if (a->shape != b->shape) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                    shape_string(a->shape) + " vs " + shape_string(b->shape));
    }
}

} // namespace

Tape::Tape(const TensorPtr& root) {
    // Iterative post-order DFS; nodes_ ends up in forward topological order.
    std::unordered_set<const Tensor*> seen;
    std::vector<std::pair<TensorPtr, std::size_t>> stack;
    stack.emplace_back(root, 0);
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            TensorPtr parent = node->parents[next++];
            if (seen.insert(parent.get()).second) {
                stack.emplace_back(std::move(parent), 0);
            }
        } else {
            nodes_.push_back(node.get());
            keepalive_.push_back(node);
            stack.pop_back();
        }
    }
}

void backward(const TensorPtr& loss) {
    if (loss->size() != 1) {
        throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                    shape_string(loss->shape));
    }
    if (loss->backward_done) {
        throw std::runtime_error("backward: already called on this node; build a fresh graph "
                                 "or zero_grad first");
    }
    if (loss->is_leaf() && !loss->requires_grad) {
        throw std::runtime_error("backward: loss is detached from any differentiable graph");
    }
    loss->backward_done = true;

    Tape tape(loss);
    for (Tensor* n : tape.nodes()) {
        if (!n->is_leaf()) n->grad.assign(n->values.size(), 0.0);
        else if (n->requires_grad) n->ensure_grad();
    }
    loss->ensure_grad();
    loss->grad[0] = 1.0;
    const auto& order = tape.nodes();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Tensor* n = *it;
        if (n->backprop) n->backprop();
    }
}

// --- elementwise --------------------------------------------------------

TensorPtr add(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape("add", a, b);
    auto out = make_result(a->shape, {a, b});
    for (std::size_t i = 0; i < out->values.size(); ++i) out->values[i] = a->values[i] + b->values[i];
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, a, b] {
            a->ensure_grad();
            b->ensure_grad();
            for (std::size_t i = 0; i < o->grad.size(); ++i) {
                a->grad[i] += o->grad[i];
                b->grad[i] += o->grad[i];
            }
        };
    }
    return out;
}

TensorPtr sub(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape("sub", a, b);
    auto out = make_result(a->shape, {a, b});
    for (std::size_t i = 0; i < out->values.size(); ++i) out->values[i] = a->values[i] - b->values[i];
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, a, b] {
            a->ensure_grad();
            b->ensure_grad();
            for (std::size_t i = 0; i < o->grad.size(); ++i) {
                a->grad[i] += o->grad[i];
                b->grad[i] -= o->grad[i];
            }
        };
    }
    return out;
}

TensorPtr mul(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape("mul", a, b);
    auto out = make_result(a->shape, {a, b});
    for (std::size_t i = 0; i < out->values.size(); ++i) out->values[i] = a->values[i] * b->values[i];
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, a, b] {
            a->ensure_grad();
            b->ensure_grad();
            for (std::size_t i = 0; i < o->grad.size(); ++i) {
                a->grad[i] += o->grad[i] * b->values[i];
                b->grad[i] += o->grad[i] * a->values[i];
            }
        };
    }
    return out;
}

TensorPtr scale(const TensorPtr& x, double c) {
    auto out = make_result(x->shape, {x});
    for (std::size_t i = 0; i < out->values.size(); ++i) out->values[i] = c * x->values[i];
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, x, c] {
            x->ensure_grad();
            for (std::size_t i = 0; i < o->grad.size(); ++i) x->grad[i] += c * o->grad[i];
        };
    }
    return out;
}

TensorPtr add_scalar(const TensorPtr& x, double c) {
    auto out = make_result(x->shape, {x});
    for (std::size_t i = 0; i < out->values.size(); ++i) out->values[i] = x->values[i] + c;
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, x] {
            x->ensure_grad();
            for (std::size_t i = 0; i < o->grad.size(); ++i) x->grad[i] += o->grad[i];
        };
    }
    return out;
}

TensorPtr exp_op(const TensorPtr& x) {
    auto out = make_result(x->shape, {x});
    for (std::size_t i = 0; i < out->values.size(); ++i) out->values[i] = std::exp(x->values[i]);
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, x] {
            x->ensure_grad();
            for (std::size_t i = 0; i < o->grad.size(); ++i) x->grad[i] += o->grad[i] * o->values[i];
        };
    }
    return out;
}

TensorPtr leaky_relu(const TensorPtr& x, double slope) {
    auto out = make_result(x->shape, {x});
    for (std::size_t i = 0; i < out->values.size(); ++i) {
        const double v = x->values[i];
        out->values[i] = v >= 0.0 ? v : slope * v;
    }
    if (out->requires_grad) {
        Tensor* o = out.get();
        // subgradient at exactly 0 is the negative-side slope
        out->backprop = [o, x, slope] {
            x->ensure_grad();
            for (std::size_t i = 0; i < o->grad.size(); ++i) {
                x->grad[i] += o->grad[i] * (x->values[i] > 0.0 ? 1.0 : slope);
            }
        };
    }
    return out;
}

TensorPtr sum(const TensorPtr& x) {
    auto out = make_result({1}, {x});
    double s = 0.0;
    for (double v : x->values) s += v;
    out->values[0] = s;
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, x] {
            x->ensure_grad();
            const double g = o->grad[0];
            for (auto& gi : x->grad) gi += g;
        };
    }
    return out;
}

TensorPtr mean(const TensorPtr& x) {
    if (x->size() == 0) throw std::invalid_argument("mean: empty tensor");
    auto out = make_result({1}, {x});
    double s = 0.0;
    for (double v : x->values) s += v;
    const double inv_n = 1.0 / static_cast<double>(x->size());
    out->values[0] = s * inv_n;
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, x, inv_n] {
            x->ensure_grad();
            const double g = o->grad[0] * inv_n;
            for (auto& gi : x->grad) gi += g;
        };
    }
    return out;
}

TensorPtr mse_loss(const TensorPtr& a, const TensorPtr& b) {
    check_same_shape("mse_loss", a, b);
    if (a->size() == 0) throw std::invalid_argument("mse_loss: empty tensors");
    auto out = make_result({1}, {a, b});
    double s = 0.0;
    for (std::size_t i = 0; i < a->values.size(); ++i) {
        const double d = a->values[i] - b->values[i];
        s += d * d;
    }
    const double inv_n = 1.0 / static_cast<double>(a->size());
    out->values[0] = s * inv_n;
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, a, b, inv_n] {
            a->ensure_grad();
            b->ensure_grad();
            const double g = o->grad[0] * 2.0 * inv_n;
            for (std::size_t i = 0; i < a->values.size(); ++i) {
                const double d = g * (a->values[i] - b->values[i]);
                a->grad[i] += d;
                b->grad[i] -= d;
            }
        };
    }
    return out;
}

// --- conv2d -------------------------------------------------------------

namespace {

struct ConvDims {
    int n, c, h, w;     // input
    int f, kh, kw;      // filters
    int oh, ow;         // output
    int stride, pad;
};

ConvDims conv_dims(const TensorPtr& input, const TensorPtr& weight, const TensorPtr& bias,
                   int stride, int pad) {
    if (input->rank() != 4) {
        throw std::invalid_argument("conv2d: input must be [N,C,H,W], got " +
                                    shape_string(input->shape));
    }
    if (weight->rank() != 4) {
        throw std::invalid_argument("conv2d: weight must be [F,C,kh,kw], got " +
                                    shape_string(weight->shape));
    }
    ConvDims d;
    d.n = input->dim(0);
    d.c = input->dim(1);
    d.h = input->dim(2);
    d.w = input->dim(3);
    d.f = weight->dim(0);
    d.kh = weight->dim(2);
    d.kw = weight->dim(3);
    d.stride = stride;
    d.pad = pad;
    if (weight->dim(1) != d.c) {
        throw std::invalid_argument("conv2d: weight channels " + shape_string(weight->shape) +
                                    " do not match input channels " + shape_string(input->shape));
    }
    if (bias->rank() != 1 || bias->dim(0) != d.f) {
        throw std::invalid_argument("conv2d: bias must be [F]=" + std::to_string(d.f) + ", got " +
                                    shape_string(bias->shape));
    }
    if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
    if (pad < 0) throw std::invalid_argument("conv2d: zero_padding must be >= 0");
    if (d.kh > d.h + 2 * pad || d.kw > d.w + 2 * pad) {
        throw std::invalid_argument("conv2d: kernel " + shape_string(weight->shape) +
                                    " larger than padded input " + shape_string(input->shape));
    }
    d.oh = (d.h + 2 * pad - d.kh) / stride + 1;
    d.ow = (d.w + 2 * pad - d.kw) / stride + 1;
    return d;
}

// Valid output-column range for a given kernel column: 0 <= ow*s - pad + kw < W.
inline void ow_range(int kw, int w, int stride, int pad, int ow, int& lo, int& hi) {
    const int num_lo = pad - kw;
    lo = num_lo <= 0 ? 0 : (num_lo + stride - 1) / stride;
    const int num_hi = w - 1 + pad - kw;
    hi = num_hi < 0 ? -1 : std::min(ow - 1, num_hi / stride);
}

} // namespace

TensorPtr conv2d(const TensorPtr& input, const TensorPtr& weight, const TensorPtr& bias,
                 int stride, int zero_padding) {
    const ConvDims d = conv_dims(input, weight, bias, stride, zero_padding);
    auto out = make_result({d.n, d.f, d.oh, d.ow}, {input, weight, bias});

    const double* x = input->values.data();
    const double* wv = weight->values.data();
    const double* bv = bias->values.data();
    double* y = out->values.data();
    const std::int64_t in_chw = static_cast<std::int64_t>(d.c) * d.h * d.w;
    const std::int64_t out_fhw = static_cast<std::int64_t>(d.f) * d.oh * d.ow;

    parallel_for(static_cast<std::int64_t>(d.n) * d.f, [&](std::int64_t nf) {
        const int n = static_cast<int>(nf / d.f);
        const int f = static_cast<int>(nf % d.f);
        double* yslice = y + n * out_fhw + static_cast<std::int64_t>(f) * d.oh * d.ow;
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(d.oh) * d.ow; ++i) yslice[i] = bv[f];
        for (int c = 0; c < d.c; ++c) {
            const double* xslice = x + n * in_chw + static_cast<std::int64_t>(c) * d.h * d.w;
            for (int kh = 0; kh < d.kh; ++kh) {
                for (int kw = 0; kw < d.kw; ++kw) {
                    const double wval =
                        wv[((static_cast<std::int64_t>(f) * d.c + c) * d.kh + kh) * d.kw + kw];
                    if (wval == 0.0) continue;
                    int lo, hi;
                    ow_range(kw, d.w, d.stride, d.pad, d.ow, lo, hi);
                    for (int oh = 0; oh < d.oh; ++oh) {
                        const int ih = oh * d.stride - d.pad + kh;
                        if (ih < 0 || ih >= d.h) continue;
                        const double* xrow = xslice + static_cast<std::int64_t>(ih) * d.w;
                        double* yrow = yslice + static_cast<std::int64_t>(oh) * d.ow;
                        if (d.stride == 1) {
                            const double* xp = xrow - d.pad + kw;
                            for (int ow = lo; ow <= hi; ++ow) yrow[ow] += wval * xp[ow];
                        } else {
                            for (int ow = lo; ow <= hi; ++ow) {
                                yrow[ow] += wval * xrow[ow * d.stride - d.pad + kw];
                            }
                        }
                    }
                }
            }
        }
    });

    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, input, weight, bias, d] {
            input->ensure_grad();
            weight->ensure_grad();
            bias->ensure_grad();
            const double* g = o->grad.data();
            const double* x = input->values.data();
            const double* wv = weight->values.data();
            double* gx = input->grad.data();
            double* gw = weight->grad.data();
            double* gb = bias->grad.data();
            const std::int64_t in_chw = static_cast<std::int64_t>(d.c) * d.h * d.w;
            const std::int64_t out_fhw = static_cast<std::int64_t>(d.f) * d.oh * d.ow;
            for (int n = 0; n < d.n; ++n) {
                for (int f = 0; f < d.f; ++f) {
                    const double* gslice =
                        g + n * out_fhw + static_cast<std::int64_t>(f) * d.oh * d.ow;
                    double bsum = 0.0;
                    for (std::int64_t i = 0; i < static_cast<std::int64_t>(d.oh) * d.ow; ++i) {
                        bsum += gslice[i];
                    }
                    gb[f] += bsum;
                    for (int c = 0; c < d.c; ++c) {
                        const double* xslice =
                            x + n * in_chw + static_cast<std::int64_t>(c) * d.h * d.w;
                        double* gxslice =
                            gx + n * in_chw + static_cast<std::int64_t>(c) * d.h * d.w;
                        for (int kh = 0; kh < d.kh; ++kh) {
                            for (int kw = 0; kw < d.kw; ++kw) {
                                const std::int64_t widx =
                                    ((static_cast<std::int64_t>(f) * d.c + c) * d.kh + kh) * d.kw +
                                    kw;
                                const double wval = wv[widx];
                                double wacc = 0.0;
                                int lo, hi;
                                ow_range(kw, d.w, d.stride, d.pad, d.ow, lo, hi);
                                for (int oh = 0; oh < d.oh; ++oh) {
                                    const int ih = oh * d.stride - d.pad + kh;
                                    if (ih < 0 || ih >= d.h) continue;
                                    const double* xrow =
                                        xslice + static_cast<std::int64_t>(ih) * d.w;
                                    double* gxrow =
                                        gxslice + static_cast<std::int64_t>(ih) * d.w;
                                    const double* grow =
                                        gslice + static_cast<std::int64_t>(oh) * d.ow;
                                    if (d.stride == 1) {
                                        const double* xp = xrow - d.pad + kw;
                                        double* gxp = gxrow - d.pad + kw;
                                        for (int ow = lo; ow <= hi; ++ow) {
                                            wacc += grow[ow] * xp[ow];
                                            gxp[ow] += grow[ow] * wval;
                                        }
                                    } else {
                                        for (int ow = lo; ow <= hi; ++ow) {
                                            const int iw = ow * d.stride - d.pad + kw;
                                            wacc += grow[ow] * xrow[iw];
                                            gxrow[iw] += grow[ow] * wval;
                                        }
                                    }
                                }
                                gw[widx] += wacc;
                            }
                        }
                    }
                }
            }
        };
    }
    return out;
}

// --- batch norm ---------------------------------------------------------

TensorPtr batch_norm2d(const TensorPtr& input, const TensorPtr& gamma, const TensorPtr& beta,
                       BatchNormMode mode, BatchNormState& stats, double eps, double momentum) {
    if (input->rank() != 4) {
        throw std::invalid_argument("batch_norm2d: input must be [N,C,H,W], got " +
                                    shape_string(input->shape));
    }
    if (eps <= 0.0) throw std::invalid_argument("batch_norm2d: eps must be > 0");
    const int n = input->dim(0), c = input->dim(1), h = input->dim(2), w = input->dim(3);
    if (gamma->rank() != 1 || gamma->dim(0) != c || beta->rank() != 1 || beta->dim(0) != c) {
        throw std::invalid_argument("batch_norm2d: gamma/beta must be [C]=" + std::to_string(c));
    }
    const std::int64_t m = static_cast<std::int64_t>(n) * h * w;
    if (mode == BatchNormMode::kTrain && m < 2) {
        throw std::invalid_argument("batch_norm2d: train mode needs N*H*W >= 2");
    }
    if (stats.running_mean.size() != static_cast<std::size_t>(c)) {
        stats.running_mean.assign(c, 0.0);
        stats.running_var.assign(c, 1.0);
    }

    auto out = make_result(input->shape, {input, gamma, beta});
    const std::int64_t hw = static_cast<std::int64_t>(h) * w;
    const std::int64_t chw = c * hw;
    const double* x = input->values.data();
    double* y = out->values.data();

    auto mean_var = std::make_shared<std::vector<double>>(2 * c, 0.0); // [mean..., var...]
    if (mode == BatchNormMode::kTrain) {
        for (int ci = 0; ci < c; ++ci) {
            double s = 0.0;
            for (int ni = 0; ni < n; ++ni) {
                const double* p = x + ni * chw + ci * hw;
                for (std::int64_t i = 0; i < hw; ++i) s += p[i];
            }
            const double mu = s / static_cast<double>(m);
            double v = 0.0;
            for (int ni = 0; ni < n; ++ni) {
                const double* p = x + ni * chw + ci * hw;
                for (std::int64_t i = 0; i < hw; ++i) {
                    const double dv = p[i] - mu;
                    v += dv * dv;
                }
            }
            v /= static_cast<double>(m); // biased
            (*mean_var)[ci] = mu;
            (*mean_var)[c + ci] = v;
            stats.running_mean[ci] = momentum * stats.running_mean[ci] + (1.0 - momentum) * mu;
            stats.running_var[ci] = momentum * stats.running_var[ci] + (1.0 - momentum) * v;
        }
    } else {
        for (int ci = 0; ci < c; ++ci) {
            (*mean_var)[ci] = stats.running_mean[ci];
            (*mean_var)[c + ci] = stats.running_var[ci];
        }
    }

    for (int ci = 0; ci < c; ++ci) {
        const double mu = (*mean_var)[ci];
        const double inv_sd = 1.0 / std::sqrt((*mean_var)[c + ci] + eps);
        const double gm = gamma->values[ci], bt = beta->values[ci];
        for (int ni = 0; ni < n; ++ni) {
            const double* p = x + ni * chw + ci * hw;
            double* q = y + ni * chw + ci * hw;
            for (std::int64_t i = 0; i < hw; ++i) q[i] = gm * (p[i] - mu) * inv_sd + bt;
        }
    }

    if (out->requires_grad) {
        Tensor* o = out.get();
        const bool train = mode == BatchNormMode::kTrain;
        out->backprop = [o, input, gamma, beta, mean_var, eps, train, n, c, h, w] {
            input->ensure_grad();
            gamma->ensure_grad();
            beta->ensure_grad();
            const std::int64_t hw = static_cast<std::int64_t>(h) * w;
            const std::int64_t chw = c * hw;
            const std::int64_t m = static_cast<std::int64_t>(n) * hw;
            const double* x = input->values.data();
            const double* g = o->grad.data();
            double* gx = input->grad.data();
            for (int ci = 0; ci < c; ++ci) {
                const double mu = (*mean_var)[ci];
                const double inv_sd = 1.0 / std::sqrt((*mean_var)[c + ci] + eps);
                const double gm = gamma->values[ci];
                double sum_g = 0.0, sum_gx = 0.0;
                for (int ni = 0; ni < n; ++ni) {
                    const double* gp = g + ni * chw + ci * hw;
                    const double* xp = x + ni * chw + ci * hw;
                    for (std::int64_t i = 0; i < hw; ++i) {
                        sum_g += gp[i];
                        sum_gx += gp[i] * (xp[i] - mu) * inv_sd;
                    }
                }
                gamma->grad[ci] += sum_gx;
                beta->grad[ci] += sum_g;
                if (train) {
                    const double mg = sum_g / static_cast<double>(m);
                    const double mgx = sum_gx / static_cast<double>(m);
                    for (int ni = 0; ni < n; ++ni) {
                        const double* gp = g + ni * chw + ci * hw;
                        const double* xp = x + ni * chw + ci * hw;
                        double* gxp = gx + ni * chw + ci * hw;
                        for (std::int64_t i = 0; i < hw; ++i) {
                            const double xhat = (xp[i] - mu) * inv_sd;
                            gxp[i] += gm * inv_sd * (gp[i] - mg - xhat * mgx);
                        }
                    }
                } else {
                    for (int ni = 0; ni < n; ++ni) {
                        const double* gp = g + ni * chw + ci * hw;
                        double* gxp = gx + ni * chw + ci * hw;
                        for (std::int64_t i = 0; i < hw; ++i) gxp[i] += gm * inv_sd * gp[i];
                    }
                }
            }
        };
    }
    return out;
}

// --- concat -------------------------------------------------------------

TensorPtr concat_channels(const TensorPtr& a, const TensorPtr& b) {
    if (a->rank() != 4 || b->rank() != 4) {
        throw std::invalid_argument("concat_channels: inputs must be [N,C,H,W]");
    }
    if (a->dim(0) != b->dim(0) || a->dim(2) != b->dim(2) || a->dim(3) != b->dim(3)) {
        throw std::invalid_argument("concat_channels: non-channel extents differ, " +
                                    shape_string(a->shape) + " vs " + shape_string(b->shape));
    }
    const int n = a->dim(0), ca = a->dim(1), cb = b->dim(1), h = a->dim(2), w = a->dim(3);
    auto out = make_result({n, ca + cb, h, w}, {a, b});
    const std::int64_t hw = static_cast<std::int64_t>(h) * w;
    for (int ni = 0; ni < n; ++ni) {
        double* dst = out->values.data() + ni * (ca + cb) * hw;
        const double* pa = a->values.data() + ni * ca * hw;
        const double* pb = b->values.data() + ni * cb * hw;
        std::copy(pa, pa + ca * hw, dst);
        std::copy(pb, pb + cb * hw, dst + ca * hw);
    }
    if (out->requires_grad) {
        Tensor* o = out.get();
        out->backprop = [o, a, b, n, ca, cb, hw] {
            a->ensure_grad();
            b->ensure_grad();
            for (int ni = 0; ni < n; ++ni) {
                const double* gsrc = o->grad.data() + ni * (ca + cb) * hw;
                double* ga = a->grad.data() + ni * ca * hw;
                double* gb = b->grad.data() + ni * cb * hw;
                for (std::int64_t i = 0; i < ca * hw; ++i) ga[i] += gsrc[i];
                for (std::int64_t i = 0; i < cb * hw; ++i) gb[i] += gsrc[ca * hw + i];
            }
        };
    }
    return out;
}

} // namespace ctdn
