#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "advtrust/tensor.hpp"

namespace advtrust::nn {

enum class LayerKind { Dense, Conv2d, Relu, MaxPool2d, Flatten };

const char* layer_kind_name(LayerKind k);

/// One layer descriptor. Only the fields of the active kind are meaningful.
struct LayerDesc {
    LayerKind kind = LayerKind::Relu;
    // dense
    std::size_t in = 0, out = 0;
    // conv2d
    std::size_t in_ch = 0, out_ch = 0, kernel = 0, stride = 1, pad = 0;
    // maxpool2d
    std::size_t pool = 0;

    static LayerDesc dense(std::size_t in, std::size_t out) {
        LayerDesc d;
        d.kind = LayerKind::Dense;
        d.in = in;
        d.out = out;
        return d;
    }
    static LayerDesc conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
                            std::size_t stride = 1, std::size_t pad = 0) {
        LayerDesc d;
        d.kind = LayerKind::Conv2d;
        d.in_ch = in_ch;
        d.out_ch = out_ch;
        d.kernel = kernel;
        d.stride = stride;
        d.pad = pad;
        return d;
    }
    static LayerDesc relu() {
        LayerDesc d;
        d.kind = LayerKind::Relu;
        return d;
    }
    static LayerDesc maxpool2d(std::size_t k) {
        LayerDesc d;
        d.kind = LayerKind::MaxPool2d;
        d.pool = k;
        return d;
    }
    static LayerDesc flatten() {
        LayerDesc d;
        d.kind = LayerKind::Flatten;
        return d;
    }

    bool parameterized() const { return kind == LayerKind::Dense || kind == LayerKind::Conv2d; }
};

/// Feed-forward classifier definition. Input samples are (channels, height,
/// width); the final layer must emit exactly num_classes logits.
struct ModelSpec {
    std::vector<LayerDesc> layers;
    std::array<std::size_t, 3> input_shape{1, 1, 1};  // (C, H, W)
    std::size_t num_classes = 0;
};

struct LayerParams {
    Tensor weight;
    Tensor bias;
};

/// Trainable weights, keyed by layer index into ModelSpec::layers.
struct Parameters {
    std::map<std::size_t, LayerParams> by_layer;

    bool operator==(const Parameters& o) const;
};

/// Walks the layer list and checks that adjacent shapes compose and the final
/// layer emits num_classes logits. Throws ShapeError otherwise. Returns the
/// per-layer input shapes (spatial (C,H,W) collapses to a flat size after
/// Flatten / Dense).
std::vector<std::vector<std::size_t>> validate_spec(const ModelSpec& spec);

/// Allocates parameter tensors matching the descriptors, initialized with
/// Xavier-uniform fan scaling from the given seed.
Parameters init_parameters(const ModelSpec& spec, std::uint64_t seed);

/// Allocates zero-valued parameter tensors matching the descriptors (gradient
/// accumulators, zero nets in tests).
Parameters zero_parameters(const ModelSpec& spec);

/// Logits for one sample (shape = input_shape) or a batch (leading extent B).
Tensor forward(const ModelSpec& spec, const Parameters& params, const Tensor& x);

/// Argmax over softmax of the logits; ties resolve to the lowest class index.
std::size_t predict(const ModelSpec& spec, const Parameters& params, const Tensor& x);

std::vector<std::size_t> predict_batch(const ModelSpec& spec, const Parameters& params,
                                       const Tensor& batch);

std::size_t argmax_class(const Tensor& logits);

/// Numerically stabilized softmax (log-sum-exp shift).
std::vector<float> softmax(const Tensor& logits);

struct LossGrad {
    double loss = 0.0;
    Tensor grad_logits;
};

/// Cross entropy -log softmax(logits)[label] with its gradient w.r.t. logits.
LossGrad cross_entropy(const Tensor& logits, std::size_t label);

struct Gradients {
    Tensor input;        // dL/dx, same shape as the sample
    Parameters params;   // dL/dθ, same keys/shapes as the model parameters
    double loss = 0.0;
    Tensor logits;
};

/// Exact reverse-mode gradients of cross_entropy(forward(x), label) w.r.t. the
/// input and every parameter tensor. Single-sample only.
Gradients backward(const ModelSpec& spec, const Parameters& params, const Tensor& x,
                   std::size_t label);

/// Reverse pass seeded with an arbitrary dL/dlogits (losses other than cross
/// entropy, e.g. distillation). loss/logits fields of the result: logits are
/// filled, loss is left 0.
Gradients backward_from_logits_grad(const ModelSpec& spec, const Parameters& params,
                                    const Tensor& x, const Tensor& grad_logits);

/// Gradient of the loss w.r.t. the input only (parameter gradients skipped).
Tensor input_gradient(const ModelSpec& spec, const Parameters& params, const Tensor& x,
                      std::size_t label);

/// Gradients of every logit w.r.t. the input (one reverse pass per class).
/// Optionally returns the logits evaluated at x.
std::vector<Tensor> logit_input_gradients(const ModelSpec& spec, const Parameters& params,
                                          const Tensor& x, Tensor* logits_out = nullptr);

struct GradCheckBlock {
    std::string name;
    double max_rel_err = 0.0;
    bool pass = false;
};

struct GradCheckReport {
    std::vector<GradCheckBlock> blocks;
    bool all_pass = true;
};

/// Central-difference comparison helpers. `fd_gradients` evaluates the loss at
/// +/- step around every coordinate; `compare_gradients` reduces the
/// element-wise relative error per parameter block.
Gradients fd_gradients(const ModelSpec& spec, const Parameters& params, const Tensor& x,
                       std::size_t label, double step);

GradCheckReport compare_gradients(const Gradients& analytic, const Gradients& fd, double tol);

/// Compares backward() against central finite differences; report-only.
GradCheckReport gradient_check(const ModelSpec& spec, const Parameters& params, const Tensor& x,
                               std::size_t label, double step, double tol);

}  // namespace advtrust::nn
