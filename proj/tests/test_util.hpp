#pragma once

// Shared builders for test models and inputs.

#include <vector>

#include "advtrust/nn.hpp"
#include "advtrust/rng.hpp"

namespace testutil {

using advtrust::Rng;
using advtrust::Tensor;
namespace nn = advtrust::nn;

inline nn::ModelSpec mlp_spec(std::size_t inputs, std::vector<std::size_t> hidden,
                              std::size_t classes) {
    nn::ModelSpec spec;
    spec.input_shape = {1, 1, inputs};
    spec.num_classes = classes;
    spec.layers.push_back(nn::LayerDesc::flatten());
    std::size_t prev = inputs;
    for (std::size_t h : hidden) {
        spec.layers.push_back(nn::LayerDesc::dense(prev, h));
        spec.layers.push_back(nn::LayerDesc::relu());
        prev = h;
    }
    spec.layers.push_back(nn::LayerDesc::dense(prev, classes));
    return spec;
}

/// Linear head over a (c,h,w) image: flatten then dense to the classes.
inline nn::ModelSpec image_linear_spec(std::size_t c, std::size_t h, std::size_t w,
                                       std::size_t classes) {
    nn::ModelSpec spec;
    spec.input_shape = {c, h, w};
    spec.num_classes = classes;
    spec.layers.push_back(nn::LayerDesc::flatten());
    spec.layers.push_back(nn::LayerDesc::dense(c * h * w, classes));
    return spec;
}

inline nn::ModelSpec small_conv_spec(std::size_t side = 8, std::size_t channels = 1,
                                     std::size_t classes = 3) {
    nn::ModelSpec spec;
    spec.input_shape = {channels, side, side};
    spec.num_classes = classes;
    spec.layers.push_back(nn::LayerDesc::conv2d(channels, 4, 3, 1, 1));
    spec.layers.push_back(nn::LayerDesc::relu());
    spec.layers.push_back(nn::LayerDesc::maxpool2d(2));
    spec.layers.push_back(nn::LayerDesc::flatten());
    spec.layers.push_back(nn::LayerDesc::dense(4 * (side / 2) * (side / 2), classes));
    return spec;
}

inline Tensor random_input(const nn::ModelSpec& spec, Rng& rng, float lo = 0.0f, float hi = 1.0f) {
    Tensor x({spec.input_shape[0], spec.input_shape[1], spec.input_shape[2]});
    for (float& v : x.data) v = rng.uniform(lo, hi);
    return x;
}

/// Linear binary classifier on n inputs: logits (w.x + b, 0).
inline void linear_binary(const std::vector<float>& w, float b, nn::ModelSpec& spec,
                          nn::Parameters& params) {
    spec = nn::ModelSpec{};
    spec.input_shape = {1, 1, w.size()};
    spec.num_classes = 2;
    spec.layers.push_back(nn::LayerDesc::flatten());
    spec.layers.push_back(nn::LayerDesc::dense(w.size(), 2));
    params = nn::zero_parameters(spec);
    auto& lp = params.by_layer.at(1);
    for (std::size_t i = 0; i < w.size(); ++i) lp.weight.data[i] = w[i];  // class-0 row
    lp.bias.data[0] = b;
    // class-1 row stays zero
}

}  // namespace testutil
