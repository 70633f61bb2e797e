#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "advtrust/nn.hpp"
#include "advtrust/rng.hpp"
#include "ref_net.hpp"
#include "test_util.hpp"

using namespace advtrust;
using namespace testutil;

TEST_CASE("forward: identity dense maps input to logits") {
    auto spec = mlp_spec(2, {}, 2);
    auto params = nn::zero_parameters(spec);
    auto& lp = params.by_layer.at(1);
    lp.weight.data = {1.0f, 0.0f, 0.0f, 1.0f};
    Tensor x({1, 1, 2}, {3.0f, -1.0f});
    Tensor logits = nn::forward(spec, params, x);
    CHECK(logits.data[0] == doctest::Approx(3.0));
    CHECK(logits.data[1] == doctest::Approx(-1.0));
    CHECK(nn::predict(spec, params, x) == 0);
}

TEST_CASE("forward: batch carries the leading extent and matches per-sample") {
    Rng rng(11);
    auto spec = small_conv_spec();
    auto params = nn::init_parameters(spec, 5);
    const std::size_t B = 4;
    Tensor batch({B, 1, 8, 8});
    for (float& v : batch.data) v = rng.uniform();
    Tensor out = nn::forward(spec, params, batch);
    REQUIRE(out.shape == std::vector<std::size_t>{B, 3});
    for (std::size_t b = 0; b < B; ++b) {
        Tensor x({1, 8, 8});
        std::copy(batch.data.begin() + b * 64, batch.data.begin() + (b + 1) * 64, x.data.begin());
        Tensor single = nn::forward(spec, params, x);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(std::fabs(out.data[b * 3 + k] - single.data[k]) < 1e-6);
    }
}

TEST_CASE("forward: random 2-layer net matches the straight-line reference") {
    Rng rng(21);
    auto spec = mlp_spec(6, {5}, 3);
    auto params = nn::init_parameters(spec, 31);
    for (int t = 0; t < 10; ++t) {
        Tensor x = random_input(spec, rng, -1.0f, 1.0f);
        Tensor logits = nn::forward(spec, params, x);
        std::vector<double> in(x.data.begin(), x.data.end());
        auto ref = refnet::ref_logits(spec, params, in);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(std::fabs(logits.data[k] - ref[k]) < 1e-6);
    }
}

TEST_CASE("forward: shape mismatch raises") {
    auto spec = mlp_spec(4, {}, 2);
    auto params = nn::init_parameters(spec, 1);
    Tensor bad({1, 1, 3});
    CHECK_THROWS_AS(nn::forward(spec, params, bad), ShapeError);
}

TEST_CASE("forward: two identical calls produce bitwise-identical logits") {
    Rng rng(77);
    auto spec = small_conv_spec();
    auto params = nn::init_parameters(spec, 7);
    Tensor x = random_input(spec, rng);
    Tensor a = nn::forward(spec, params, x);
    Tensor b = nn::forward(spec, params, x);
    CHECK(a.data == b.data);
}

TEST_CASE("predict: argmax and tie-breaking") {
    CHECK(nn::argmax_class(Tensor({3}, {0.1f, 2.0f, -1.0f})) == 1);
    CHECK(nn::argmax_class(Tensor({2}, {1.0f, 1.0f})) == 0);
}

TEST_CASE("predict: softmax argmax is shift invariant") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        Tensor logits({5});
        for (float& v : logits.data) v = rng.uniform(-4.0f, 4.0f);
        std::size_t base = nn::argmax_class(logits);
        float c = rng.uniform(-100.0f, 100.0f);
        Tensor shifted = logits;
        for (float& v : shifted.data) v += c;
        CHECK(nn::argmax_class(shifted) == base);
    }
}

TEST_CASE("cross_entropy: symmetric two-class case gives ln 2") {
    auto r = nn::cross_entropy(Tensor({2}, {0.0f, 0.0f}), 0);
    CHECK(r.loss == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("cross_entropy: huge logit gap stays finite") {
    auto r = nn::cross_entropy(Tensor({2}, {1000.0f, 0.0f}), 0);
    CHECK(std::isfinite(r.loss));
    CHECK(r.loss < 1e-6);
    CHECK(r.loss >= 0.0);
}

TEST_CASE("cross_entropy: label out of range raises") {
    CHECK_THROWS_AS(nn::cross_entropy(Tensor({2}, {0.0f, 0.0f}), 2), LabelError);
}

TEST_CASE("cross_entropy: gradient matches central differences") {
    Rng rng(9);
    for (int t = 0; t < 20; ++t) {
        std::size_t p = 2 + rng.index(5);
        Tensor logits({p});
        for (float& v : logits.data) v = rng.uniform(-3.0f, 3.0f);
        std::size_t label = rng.index(p);
        auto r = nn::cross_entropy(logits, label);
        const double h = 1e-3;
        for (std::size_t i = 0; i < p; ++i) {
            std::vector<double> z(logits.data.begin(), logits.data.end());
            z[i] += h;
            double up = refnet::ref_cross_entropy(z, label);
            z[i] -= 2 * h;
            double dn = refnet::ref_cross_entropy(z, label);
            double fd = (up - dn) / (2 * h);
            double denom = std::max({1e-4, std::fabs(fd), std::fabs((double)r.grad_logits.data[i])});
            CHECK(std::fabs(r.grad_logits.data[i] - fd) / denom < 1e-3);
        }
    }
}

TEST_CASE("backward: zero-weight dense gives zero input gradient") {
    auto spec = mlp_spec(3, {}, 2);
    auto params = nn::zero_parameters(spec);
    Tensor x({1, 1, 3}, {0.3f, 0.7f, 0.1f});
    auto g = nn::backward(spec, params, x, 0);
    for (float v : g.input.data) CHECK(v == 0.0f);
}

TEST_CASE("backward: logistic input gradient matches the closed form") {
    // mirrored logits (x, -x): CE(label=1) has d/dx = 2 sigma(2x)
    nn::ModelSpec spec;
    nn::Parameters params;
    linear_binary({1.0f}, 0.0f, spec, params);
    auto& lp = params.by_layer.at(1);
    lp.weight.data = {1.0f, -1.0f};
    Tensor x({1, 1, 1}, {0.5f});
    auto g = nn::backward(spec, params, x, 1);
    double expected = 2.0 / (1.0 + std::exp(-1.0));  // 2 sigma(1)
    CHECK(g.input.data[0] == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("backward: conv+dense gradients match the double-precision oracle") {
    Rng rng(40);
    auto spec = small_conv_spec();
    auto params = nn::init_parameters(spec, 41);
    const double h = 1e-3;
    for (int t = 0; t < 3; ++t) {
        Tensor x = random_input(spec, rng);
        std::size_t label = rng.index(3);
        auto g = nn::backward(spec, params, x, label);
        auto fd_in = refnet::ref_fd_input_grad(spec, params, x, label, h);
        CHECK(refnet::block_error(g.input.data, fd_in) < 1e-3);
        for (const auto& [li, lp] : g.params.by_layer) {
            auto fd_w = refnet::ref_fd_param_grad(spec, params, x, label, li, false, h);
            auto fd_b = refnet::ref_fd_param_grad(spec, params, x, label, li, true, h);
            CHECK(refnet::block_error(lp.weight.data, fd_w) < 1e-3);
            CHECK(refnet::block_error(lp.bias.data, fd_b) < 1e-3);
        }
    }
}

TEST_CASE("gradient_check: healthy net passes, corrupted gradients are flagged") {
    Rng rng(50);
    auto spec = mlp_spec(4, {6}, 3);
    auto params = nn::init_parameters(spec, 51);
    Tensor x = random_input(spec, rng);
    auto report = nn::gradient_check(spec, params, x, 1, 1e-3, 1e-3);
    CHECK(report.all_pass);

    // negative control: flip the sign of one analytic block and re-compare
    auto analytic = nn::backward(spec, params, x, 1);
    auto fd = nn::fd_gradients(spec, params, x, 1, 1e-3);
    for (float& v : analytic.params.by_layer.at(1).weight.data) v = -v;
    auto bad = nn::compare_gradients(analytic, fd, 1e-3);
    CHECK_FALSE(bad.all_pass);
    bool flagged = false;
    for (const auto& b : bad.blocks)
        if (b.name == "layer1.weight" && !b.pass) flagged = true;
    CHECK(flagged);
}

TEST_CASE("gradient_check: zero step is rejected") {
    auto spec = mlp_spec(2, {}, 2);
    auto params = nn::init_parameters(spec, 1);
    Tensor x({1, 1, 2}, {0.1f, 0.2f});
    CHECK_THROWS_AS(nn::gradient_check(spec, params, x, 0, 0.0, 1e-3), PreconditionError);
}

TEST_CASE("validate_spec: rejects non-composing layers") {
    nn::ModelSpec spec;
    spec.input_shape = {1, 1, 4};
    spec.num_classes = 2;
    spec.layers.push_back(nn::LayerDesc::flatten());
    spec.layers.push_back(nn::LayerDesc::dense(3, 2));  // wrong fan-in
    CHECK_THROWS_AS(nn::validate_spec(spec), ShapeError);

    nn::ModelSpec spec2;
    spec2.input_shape = {1, 1, 4};
    spec2.num_classes = 3;
    spec2.layers.push_back(nn::LayerDesc::flatten());
    spec2.layers.push_back(nn::LayerDesc::dense(4, 2));  // wrong logit count
    CHECK_THROWS_AS(nn::validate_spec(spec2), ShapeError);
}
