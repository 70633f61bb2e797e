#include "advtrust/nn.hpp"

#include <algorithm>
#include <cmath>

#include "advtrust/rng.hpp"

namespace advtrust::nn {

const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::Relu: return "relu";
        case LayerKind::MaxPool2d: return "maxpool2d";
        case LayerKind::Flatten: return "flatten";
    }
    return "?";
}

bool Parameters::operator==(const Parameters& o) const {
    if (by_layer.size() != o.by_layer.size()) return false;
    for (const auto& [idx, lp] : by_layer) {
        auto it = o.by_layer.find(idx);
        if (it == o.by_layer.end()) return false;
        if (lp.weight.shape != it->second.weight.shape || lp.weight.data != it->second.weight.data)
            return false;
        if (lp.bias.shape != it->second.bias.shape || lp.bias.data != it->second.bias.data)
            return false;
    }
    return true;
}

namespace {

std::size_t conv_out_extent(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad,
                            std::size_t layer_idx) {
    if (in + 2 * pad < kernel)
        throw ShapeError("layer " + std::to_string(layer_idx) + ": kernel " +
                         std::to_string(kernel) + " exceeds padded extent " +
                         std::to_string(in + 2 * pad));
    return (in + 2 * pad - kernel) / stride + 1;
}

}  // namespace

std::vector<std::vector<std::size_t>> validate_spec(const ModelSpec& spec) {
    if (spec.num_classes == 0) throw ShapeError("num_classes must be positive");
    if (spec.layers.empty()) throw ShapeError("model has no layers");
    std::vector<std::vector<std::size_t>> shapes;
    std::vector<std::size_t> cur{spec.input_shape[0], spec.input_shape[1], spec.input_shape[2]};
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        shapes.push_back(cur);
        const LayerDesc& L = spec.layers[i];
        switch (L.kind) {
            case LayerKind::Dense: {
                if (cur.size() != 1)
                    throw ShapeError("layer " + std::to_string(i) +
                                     ": dense requires flat input, got " + shape_str(cur));
                if (cur[0] != L.in)
                    throw ShapeError("layer " + std::to_string(i) + ": dense expects " +
                                     std::to_string(L.in) + " inputs, got " + std::to_string(cur[0]));
                if (L.out == 0) throw ShapeError("dense out must be positive");
                cur = {L.out};
                break;
            }
            case LayerKind::Conv2d: {
                if (cur.size() != 3)
                    throw ShapeError("layer " + std::to_string(i) +
                                     ": conv2d requires (C,H,W) input, got " + shape_str(cur));
                if (cur[0] != L.in_ch)
                    throw ShapeError("layer " + std::to_string(i) + ": conv2d expects " +
                                     std::to_string(L.in_ch) + " channels, got " +
                                     std::to_string(cur[0]));
                if (L.kernel == 0 || L.stride == 0 || L.out_ch == 0)
                    throw ShapeError("conv2d kernel/stride/out_ch must be positive");
                cur = {L.out_ch, conv_out_extent(cur[1], L.kernel, L.stride, L.pad, i),
                       conv_out_extent(cur[2], L.kernel, L.stride, L.pad, i)};
                break;
            }
            case LayerKind::Relu:
                break;
            case LayerKind::MaxPool2d: {
                if (cur.size() != 3)
                    throw ShapeError("layer " + std::to_string(i) +
                                     ": maxpool2d requires (C,H,W) input, got " + shape_str(cur));
                if (L.pool == 0 || cur[1] < L.pool || cur[2] < L.pool)
                    throw ShapeError("layer " + std::to_string(i) + ": pool " +
                                     std::to_string(L.pool) + " too large for " + shape_str(cur));
                cur = {cur[0], cur[1] / L.pool, cur[2] / L.pool};
                break;
            }
            case LayerKind::Flatten: {
                std::size_t n = 1;
                for (std::size_t e : cur) n *= e;
                cur = {n};
                break;
            }
        }
    }
    if (cur.size() != 1 || cur[0] != spec.num_classes)
        throw ShapeError("final layer emits " + shape_str(cur) + ", expected (" +
                         std::to_string(spec.num_classes) + ") logits");
    return shapes;
}

Parameters zero_parameters(const ModelSpec& spec) {
    Parameters p;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerDesc& L = spec.layers[i];
        if (L.kind == LayerKind::Dense) {
            p.by_layer[i] = {Tensor({L.out, L.in}), Tensor({L.out})};
        } else if (L.kind == LayerKind::Conv2d) {
            p.by_layer[i] = {Tensor({L.out_ch, L.in_ch, L.kernel, L.kernel}), Tensor({L.out_ch})};
        }
    }
    return p;
}

Parameters init_parameters(const ModelSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    Parameters p = zero_parameters(spec);
    Rng rng(seed);
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerDesc& L = spec.layers[i];
        if (!L.parameterized()) continue;
        std::size_t fan_in = L.kind == LayerKind::Dense ? L.in : L.in_ch * L.kernel * L.kernel;
        std::size_t fan_out = L.kind == LayerKind::Dense ? L.out : L.out_ch * L.kernel * L.kernel;
        float bound = std::sqrt(6.0f / static_cast<float>(fan_in + fan_out));
        for (float& w : p.by_layer[i].weight.data) w = rng.uniform(-bound, bound);
        // biases start at zero
    }
    return p;
}

namespace {

struct Ctx {
    const ModelSpec& spec;
    const Parameters& params;
    std::vector<Tensor> acts;  // acts[i] = input to layer i; acts.back() = logits
};

const LayerParams& layer_params(const Ctx& c, std::size_t i) {
    auto it = c.params.by_layer.find(i);
    if (it == c.params.by_layer.end())
        throw ShapeError("missing parameters for layer " + std::to_string(i));
    const LayerDesc& L = c.spec.layers[i];
    const LayerParams& lp = it->second;
    if (L.kind == LayerKind::Dense) {
        if (lp.weight.shape != std::vector<std::size_t>{L.out, L.in} ||
            lp.bias.shape != std::vector<std::size_t>{L.out})
            throw ShapeError("dense parameter shapes do not match descriptor at layer " +
                             std::to_string(i));
    } else {
        if (lp.weight.shape != std::vector<std::size_t>{L.out_ch, L.in_ch, L.kernel, L.kernel} ||
            lp.bias.shape != std::vector<std::size_t>{L.out_ch})
            throw ShapeError("conv2d parameter shapes do not match descriptor at layer " +
                             std::to_string(i));
    }
    return lp;
}

Tensor dense_forward(const LayerDesc& L, const LayerParams& lp, const Tensor& x) {
    Tensor y({L.out});
    for (std::size_t o = 0; o < L.out; ++o) {
        double acc = lp.bias.data[o];
        const float* wrow = &lp.weight.data[o * L.in];
        for (std::size_t j = 0; j < L.in; ++j) acc += static_cast<double>(wrow[j]) * x.data[j];
        y.data[o] = static_cast<float>(acc);
    }
    return y;
}

Tensor conv_forward(const LayerDesc& L, const LayerParams& lp, const Tensor& x) {
    const std::size_t C = L.in_ch, H = x.shape[1], W = x.shape[2];
    const std::size_t K = L.kernel, S = L.stride, P = L.pad;
    const std::size_t OH = (H + 2 * P - K) / S + 1;
    const std::size_t OW = (W + 2 * P - K) / S + 1;
    Tensor y({L.out_ch, OH, OW});
    for (std::size_t oc = 0; oc < L.out_ch; ++oc) {
        for (std::size_t oy = 0; oy < OH; ++oy) {
            for (std::size_t ox = 0; ox < OW; ++ox) {
                double acc = lp.bias.data[oc];
                for (std::size_t ic = 0; ic < C; ++ic) {
                    for (std::size_t ky = 0; ky < K; ++ky) {
                        std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * S + ky) -
                                            static_cast<std::ptrdiff_t>(P);
                        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
                        for (std::size_t kx = 0; kx < K; ++kx) {
                            std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * S + kx) -
                                                static_cast<std::ptrdiff_t>(P);
                            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
                            acc += static_cast<double>(
                                       lp.weight.data[((oc * C + ic) * K + ky) * K + kx]) *
                                   x.data[(ic * H + iy) * W + ix];
                        }
                    }
                }
                y.data[(oc * OH + oy) * OW + ox] = static_cast<float>(acc);
            }
        }
    }
    return y;
}

Tensor pool_forward(const LayerDesc& L, const Tensor& x) {
    const std::size_t C = x.shape[0], H = x.shape[1], W = x.shape[2], K = L.pool;
    const std::size_t OH = H / K, OW = W / K;
    Tensor y({C, OH, OW});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t oy = 0; oy < OH; ++oy)
            for (std::size_t ox = 0; ox < OW; ++ox) {
                float best = x.data[(c * H + oy * K) * W + ox * K];
                for (std::size_t ky = 0; ky < K; ++ky)
                    for (std::size_t kx = 0; kx < K; ++kx)
                        best = std::max(best, x.data[(c * H + oy * K + ky) * W + ox * K + kx]);
                y.data[(c * OH + oy) * OW + ox] = best;
            }
    return y;
}

/// Runs the layers for one sample, caching every intermediate activation.
Ctx run_forward(const ModelSpec& spec, const Parameters& params, const Tensor& x) {
    Ctx c{spec, params, {}};
    c.acts.reserve(spec.layers.size() + 1);
    c.acts.push_back(x);
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerDesc& L = spec.layers[i];
        const Tensor& in = c.acts.back();
        switch (L.kind) {
            case LayerKind::Dense:
                c.acts.push_back(dense_forward(L, layer_params(c, i), in));
                break;
            case LayerKind::Conv2d:
                c.acts.push_back(conv_forward(L, layer_params(c, i), in));
                break;
            case LayerKind::Relu: {
                Tensor y = in;
                for (float& v : y.data) v = v > 0.0f ? v : 0.0f;
                c.acts.push_back(std::move(y));
                break;
            }
            case LayerKind::MaxPool2d:
                c.acts.push_back(pool_forward(L, in));
                break;
            case LayerKind::Flatten: {
                Tensor y = in;
                y.shape = {y.numel()};
                c.acts.push_back(std::move(y));
                break;
            }
        }
    }
    return c;
}

void check_sample_shape(const ModelSpec& spec, const Tensor& x) {
    std::vector<std::size_t> want{spec.input_shape[0], spec.input_shape[1], spec.input_shape[2]};
    if (x.shape != want)
        throw ShapeError("input shape " + shape_str(x.shape) + " does not match model input " +
                         shape_str(want));
}

Tensor slice_sample(const ModelSpec& spec, const Tensor& batch, std::size_t b) {
    std::size_t n = spec.input_shape[0] * spec.input_shape[1] * spec.input_shape[2];
    Tensor s({spec.input_shape[0], spec.input_shape[1], spec.input_shape[2]});
    std::copy(batch.data.begin() + b * n, batch.data.begin() + (b + 1) * n, s.data.begin());
    return s;
}

bool is_batch(const ModelSpec& spec, const Tensor& x) {
    return x.rank() == 4 && x.shape[1] == spec.input_shape[0] && x.shape[2] == spec.input_shape[1] &&
           x.shape[3] == spec.input_shape[2];
}

}  // namespace

Tensor forward(const ModelSpec& spec, const Parameters& params, const Tensor& x) {
    validate_spec(spec);
    if (is_batch(spec, x)) {
        std::size_t B = x.shape[0];
        Tensor out({B, spec.num_classes});
        for (std::size_t b = 0; b < B; ++b) {
            Ctx c = run_forward(spec, params, slice_sample(spec, x, b));
            std::copy(c.acts.back().data.begin(), c.acts.back().data.end(),
                      out.data.begin() + b * spec.num_classes);
        }
        require_finite(out, "logits");
        return out;
    }
    check_sample_shape(spec, x);
    Ctx c = run_forward(spec, params, x);
    require_finite(c.acts.back(), "logits");
    return c.acts.back();
}

std::size_t argmax_class(const Tensor& logits) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.numel(); ++i)
        if (logits.data[i] > logits.data[best]) best = i;
    return best;
}

std::vector<float> softmax(const Tensor& logits) {
    float m = logits.data[0];
    for (float v : logits.data) m = std::max(m, v);
    double denom = 0.0;
    std::vector<float> p(logits.numel());
    for (std::size_t i = 0; i < logits.numel(); ++i) {
        p[i] = std::exp(logits.data[i] - m);
        denom += p[i];
    }
    for (float& v : p) v = static_cast<float>(v / denom);
    return p;
}

std::size_t predict(const ModelSpec& spec, const Parameters& params, const Tensor& x) {
    return argmax_class(forward(spec, params, x));
}

std::vector<std::size_t> predict_batch(const ModelSpec& spec, const Parameters& params,
                                       const Tensor& batch) {
    Tensor logits = forward(spec, params, batch);
    std::size_t B = batch.rank() == 4 ? batch.shape[0] : 1;
    std::vector<std::size_t> preds(B);
    for (std::size_t b = 0; b < B; ++b) {
        Tensor row({spec.num_classes});
        std::copy(logits.data.begin() + b * spec.num_classes,
                  logits.data.begin() + (b + 1) * spec.num_classes, row.data.begin());
        preds[b] = argmax_class(row);
    }
    return preds;
}

LossGrad cross_entropy(const Tensor& logits, std::size_t label) {
    if (label >= logits.numel())
        throw LabelError("label " + std::to_string(label) + " out of range for " +
                         std::to_string(logits.numel()) + " classes");
    // log-sum-exp in double keeps extreme logits (attack iterates) stable
    double m = logits.data[0];
    for (float v : logits.data) m = std::max(m, static_cast<double>(v));
    double sum = 0.0;
    for (float v : logits.data) sum += std::exp(static_cast<double>(v) - m);
    double lse = m + std::log(sum);
    LossGrad r;
    r.loss = lse - static_cast<double>(logits.data[label]);
    r.grad_logits = Tensor({logits.numel()});
    for (std::size_t i = 0; i < logits.numel(); ++i) {
        double p = std::exp(static_cast<double>(logits.data[i]) - lse);
        r.grad_logits.data[i] = static_cast<float>(p - (i == label ? 1.0 : 0.0));
    }
    return r;
}

namespace {

Tensor dense_backward(const LayerDesc& L, const LayerParams& lp, const Tensor& in,
                      const Tensor& gout, LayerParams* grad) {
    Tensor gin({L.in});
    for (std::size_t o = 0; o < L.out; ++o) {
        float g = gout.data[o];
        if (grad) grad->bias.data[o] += g;
        const float* wrow = &lp.weight.data[o * L.in];
        float* gwrow = grad ? &grad->weight.data[o * L.in] : nullptr;
        for (std::size_t j = 0; j < L.in; ++j) {
            gin.data[j] += wrow[j] * g;
            if (gwrow) gwrow[j] += in.data[j] * g;
        }
    }
    return gin;
}

Tensor conv_backward(const LayerDesc& L, const LayerParams& lp, const Tensor& in,
                     const Tensor& gout, LayerParams* grad) {
    const std::size_t C = L.in_ch, H = in.shape[1], W = in.shape[2];
    const std::size_t K = L.kernel, S = L.stride, P = L.pad;
    const std::size_t OH = gout.shape[1], OW = gout.shape[2];
    Tensor gin({C, H, W});
    for (std::size_t oc = 0; oc < L.out_ch; ++oc) {
        for (std::size_t oy = 0; oy < OH; ++oy) {
            for (std::size_t ox = 0; ox < OW; ++ox) {
                float g = gout.data[(oc * OH + oy) * OW + ox];
                if (g == 0.0f) continue;
                if (grad) grad->bias.data[oc] += g;
                for (std::size_t ic = 0; ic < C; ++ic) {
                    for (std::size_t ky = 0; ky < K; ++ky) {
                        std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * S + ky) -
                                            static_cast<std::ptrdiff_t>(P);
                        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(H)) continue;
                        for (std::size_t kx = 0; kx < K; ++kx) {
                            std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * S + kx) -
                                                static_cast<std::ptrdiff_t>(P);
                            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(W)) continue;
                            std::size_t widx = ((oc * C + ic) * K + ky) * K + kx;
                            std::size_t xidx = (ic * H + iy) * W + ix;
                            gin.data[xidx] += lp.weight.data[widx] * g;
                            if (grad) grad->weight.data[widx] += in.data[xidx] * g;
                        }
                    }
                }
            }
        }
    }
    return gin;
}

Tensor pool_backward(const LayerDesc& L, const Tensor& in, const Tensor& gout) {
    const std::size_t C = in.shape[0], H = in.shape[1], W = in.shape[2], K = L.pool;
    const std::size_t OH = H / K, OW = W / K;
    Tensor gin({C, H, W});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t oy = 0; oy < OH; ++oy)
            for (std::size_t ox = 0; ox < OW; ++ox) {
                // gradient routes to the first-scanned maximum
                std::size_t best = (c * H + oy * K) * W + ox * K;
                for (std::size_t ky = 0; ky < K; ++ky)
                    for (std::size_t kx = 0; kx < K; ++kx) {
                        std::size_t idx = (c * H + oy * K + ky) * W + ox * K + kx;
                        if (in.data[idx] > in.data[best]) best = idx;
                    }
                gin.data[best] += gout.data[(c * OH + oy) * OW + ox];
            }
    return gin;
}

Tensor reverse_pass(const Ctx& c, Tensor seed, Parameters* param_grads);

Gradients backward_impl(const ModelSpec& spec, const Parameters& params, const Tensor& x,
                        std::size_t label, bool want_param_grads) {
    validate_spec(spec);
    check_sample_shape(spec, x);
    if (label >= spec.num_classes)
        throw LabelError("label " + std::to_string(label) + " out of range");
    Ctx c = run_forward(spec, params, x);
    Gradients out;
    out.logits = c.acts.back();
    require_finite(out.logits, "logits");
    LossGrad lg = cross_entropy(out.logits, label);
    out.loss = lg.loss;
    if (want_param_grads) out.params = zero_parameters(spec);
    out.input = reverse_pass(c, lg.grad_logits, want_param_grads ? &out.params : nullptr);
    return out;
}

Tensor reverse_pass(const Ctx& c, Tensor seed, Parameters* param_grads) {
    const ModelSpec& spec = c.spec;
    Tensor g = std::move(seed);
    for (std::size_t ii = spec.layers.size(); ii-- > 0;) {
        const LayerDesc& L = spec.layers[ii];
        const Tensor& in = c.acts[ii];
        switch (L.kind) {
            case LayerKind::Dense: {
                LayerParams* gp = param_grads ? &param_grads->by_layer[ii] : nullptr;
                g = dense_backward(L, layer_params(c, ii), in, g, gp);
                break;
            }
            case LayerKind::Conv2d: {
                LayerParams* gp = param_grads ? &param_grads->by_layer[ii] : nullptr;
                g = conv_backward(L, layer_params(c, ii), in, g, gp);
                break;
            }
            case LayerKind::Relu: {
                Tensor gi = in;
                for (std::size_t j = 0; j < gi.numel(); ++j)
                    gi.data[j] = in.data[j] > 0.0f ? g.data[j] : 0.0f;
                g = std::move(gi);
                break;
            }
            case LayerKind::MaxPool2d:
                g = pool_backward(L, in, g);
                break;
            case LayerKind::Flatten:
                g.shape = in.shape;
                break;
        }
    }
    require_finite(g, "input gradient");
    return g;
}

}  // namespace

Gradients backward(const ModelSpec& spec, const Parameters& params, const Tensor& x,
                   std::size_t label) {
    return backward_impl(spec, params, x, label, true);
}

Tensor input_gradient(const ModelSpec& spec, const Parameters& params, const Tensor& x,
                      std::size_t label) {
    return backward_impl(spec, params, x, label, false).input;
}

Gradients backward_from_logits_grad(const ModelSpec& spec, const Parameters& params,
                                    const Tensor& x, const Tensor& grad_logits) {
    validate_spec(spec);
    check_sample_shape(spec, x);
    if (grad_logits.numel() != spec.num_classes)
        throw ShapeError("grad_logits length " + std::to_string(grad_logits.numel()) +
                         " != num_classes " + std::to_string(spec.num_classes));
    Ctx c = run_forward(spec, params, x);
    Gradients out;
    out.logits = c.acts.back();
    require_finite(out.logits, "logits");
    out.params = zero_parameters(spec);
    out.input = reverse_pass(c, grad_logits, &out.params);
    return out;
}

std::vector<Tensor> logit_input_gradients(const ModelSpec& spec, const Parameters& params,
                                          const Tensor& x, Tensor* logits_out) {
    validate_spec(spec);
    check_sample_shape(spec, x);
    Ctx c = run_forward(spec, params, x);
    require_finite(c.acts.back(), "logits");
    if (logits_out) *logits_out = c.acts.back();
    std::vector<Tensor> grads;
    grads.reserve(spec.num_classes);
    for (std::size_t k = 0; k < spec.num_classes; ++k) {
        Tensor seed({spec.num_classes});
        seed.data[k] = 1.0f;
        grads.push_back(reverse_pass(c, std::move(seed), nullptr));
    }
    return grads;
}

Gradients fd_gradients(const ModelSpec& spec, const Parameters& params, const Tensor& x,
                       std::size_t label, double step) {
    if (step <= 0.0) throw PreconditionError("finite-difference step must be positive");
    auto loss_at = [&](const Parameters& p, const Tensor& xx) {
        return cross_entropy(forward(spec, p, xx), label).loss;
    };
    Gradients fd;
    fd.params = zero_parameters(spec);
    fd.input = Tensor(x.shape);
    Tensor xp = x;
    for (std::size_t i = 0; i < x.numel(); ++i) {
        float orig = xp.data[i];
        xp.data[i] = static_cast<float>(orig + step);
        double up = loss_at(params, xp);
        xp.data[i] = static_cast<float>(orig - step);
        double dn = loss_at(params, xp);
        xp.data[i] = orig;
        fd.input.data[i] = static_cast<float>((up - dn) / (2.0 * step));
    }
    Parameters pp = params;
    for (auto& [idx, lp] : pp.by_layer) {
        for (Tensor* t : {&lp.weight, &lp.bias}) {
            Tensor& gt = (t == &lp.weight) ? fd.params.by_layer[idx].weight
                                           : fd.params.by_layer[idx].bias;
            for (std::size_t i = 0; i < t->numel(); ++i) {
                float orig = t->data[i];
                t->data[i] = static_cast<float>(orig + step);
                double up = loss_at(pp, x);
                t->data[i] = static_cast<float>(orig - step);
                double dn = loss_at(pp, x);
                t->data[i] = orig;
                gt.data[i] = static_cast<float>((up - dn) / (2.0 * step));
            }
        }
    }
    fd.loss = loss_at(params, x);
    return fd;
}

namespace {

double block_rel_err(const Tensor& a, const Tensor& f) {
    // normalize by the block's gradient scale; tiny-magnitude entries are then
    // judged on an absolute footing rather than blowing up the ratio
    double scale = 1e-6;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        scale = std::max(scale, static_cast<double>(std::fabs(a.data[i])));
        scale = std::max(scale, static_cast<double>(std::fabs(f.data[i])));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i)
        worst = std::max(worst,
                         std::fabs(static_cast<double>(a.data[i]) - f.data[i]) / scale);
    return worst;
}

}  // namespace

GradCheckReport compare_gradients(const Gradients& analytic, const Gradients& fd, double tol) {
    GradCheckReport rep;
    auto add = [&](const std::string& name, const Tensor& a, const Tensor& f) {
        GradCheckBlock b;
        b.name = name;
        b.max_rel_err = block_rel_err(a, f);
        b.pass = b.max_rel_err < tol;
        rep.all_pass = rep.all_pass && b.pass;
        rep.blocks.push_back(std::move(b));
    };
    add("input", analytic.input, fd.input);
    for (const auto& [idx, lp] : analytic.params.by_layer) {
        const auto& flp = fd.params.by_layer.at(idx);
        add("layer" + std::to_string(idx) + ".weight", lp.weight, flp.weight);
        add("layer" + std::to_string(idx) + ".bias", lp.bias, flp.bias);
    }
    return rep;
}

GradCheckReport gradient_check(const ModelSpec& spec, const Parameters& params, const Tensor& x,
                               std::size_t label, double step, double tol) {
    if (step <= 0.0) throw PreconditionError("gradient_check step must be positive");
    Gradients analytic = backward(spec, params, x, label);
    Gradients fd = fd_gradients(spec, params, x, label, step);
    return compare_gradients(analytic, fd, tol);
}

}  // namespace advtrust::nn
