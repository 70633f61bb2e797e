#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "advtrust/data.hpp"
#include "advtrust/nn.hpp"
#include "advtrust/rng.hpp"
#include "advtrust/spectral.hpp"
#include "test_util.hpp"

using namespace advtrust;
using namespace testutil;

namespace {

Tensor random_image(Rng& rng, std::size_t c, std::size_t h, std::size_t w) {
    Tensor t({c, h, w});
    for (float& v : t.data) v = rng.uniform();
    return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i)
        m = std::max(m, std::fabs(static_cast<double>(a.data[i]) - b.data[i]));
    return m;
}

double energy(const Tensor& t) {
    double s = 0.0;
    for (float v : t.data) s += static_cast<double>(v) * v;
    return s;
}

/// logit1 = image mean - threshold, logit0 = 0: a DC-only decision.
void mean_threshold_model(std::size_t side, float threshold, nn::ModelSpec& spec,
                          nn::Parameters& params) {
    std::size_t n = side * side;
    spec = image_linear_spec(1, side, side, 2);
    params = nn::zero_parameters(spec);
    auto& lp = params.by_layer.at(1);
    for (std::size_t j = 0; j < n; ++j) lp.weight.data[n + j] = 1.0f / static_cast<float>(n);
    lp.bias.data[1] = -threshold;
}

/// logit1 reads the (kmax, kmax) DCT coefficient minus a small margin,
/// logit0 = 0: removing the top band decides class 0 with a real gap.
void top_band_probe_model(std::size_t side, nn::ModelSpec& spec, nn::Parameters& params,
                          std::vector<float>& basis_out) {
    std::size_t n = side * side;
    spec = image_linear_spec(1, side, side, 2);
    params = nn::zero_parameters(spec);
    auto& lp = params.by_layer.at(1);
    double a = std::sqrt(2.0 / static_cast<double>(side));
    std::vector<double> row(side);
    for (std::size_t j = 0; j < side; ++j)
        row[j] = a * std::cos(M_PI * (2.0 * j + 1.0) * (side - 1) / (2.0 * side));
    basis_out.resize(n);
    for (std::size_t y = 0; y < side; ++y)
        for (std::size_t x = 0; x < side; ++x) {
            basis_out[y * side + x] = static_cast<float>(row[y] * row[x]);
            lp.weight.data[n + y * side + x] = basis_out[y * side + x];
        }
    lp.bias.data[1] = -0.01f;
}

}  // namespace

TEST_CASE("dct2: constant image concentrates in the DC coefficient") {
    const std::size_t H = 8, W = 8;
    const float c = 0.37f;
    Tensor img({2, H, W});
    for (float& v : img.data) v = c;
    auto f = spectral::dct2(img);
    double expected_dc = c * std::sqrt(static_cast<double>(H * W));
    for (std::size_t ch = 0; ch < 2; ++ch) {
        for (std::size_t u = 0; u < H; ++u)
            for (std::size_t v = 0; v < W; ++v) {
                double got = f.coeffs.data[(ch * H + u) * W + v];
                if (u == 0 && v == 0)
                    CHECK(std::fabs(got - expected_dc) < 1e-5);
                else
                    CHECK(std::fabs(got) < 1e-5);
            }
    }
}

TEST_CASE("dct2/idct2: round-trip and Parseval on random images") {
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        std::size_t h = 4 + rng.index(13), w = 4 + rng.index(13);
        Tensor img = random_image(rng, 1 + rng.index(2), h, w);
        auto f = spectral::dct2(img);
        Tensor back = spectral::idct2(f);
        CHECK(max_abs_diff(img, back) < 1e-4);
        double e1 = energy(img), e2 = energy(f.coeffs);
        CHECK(std::fabs(e1 - e2) / std::max(e1, 1e-12) < 1e-4);
    }
}

TEST_CASE("dct2: degenerate extents are rejected") {
    Tensor img({1, 1, 8});
    CHECK_THROWS_AS(spectral::dct2(img), ShapeError);
}

TEST_CASE("lowpass_keep: k_max is the identity") {
    Rng rng(17);
    Tensor img = random_image(rng, 3, 12, 12);
    Tensor out = spectral::lowpass_keep(img, spectral::max_band(img));
    CHECK(max_abs_diff(img, out) < 1e-4);
}

TEST_CASE("lowpass_keep: constant image passes through the DC-only filter") {
    Tensor img({1, 8, 8});
    for (float& v : img.data) v = 0.6f;
    Tensor out = spectral::lowpass_keep(img, 0);
    CHECK(max_abs_diff(img, out) < 1e-5);
}

TEST_CASE("lowpass_keep: a pure top-band pattern dies at k=0") {
    const std::size_t side = 8;
    spectral::FrequencyImage f{Tensor({1, side, side})};
    f.coeffs.data[(side - 1) * side + (side - 1)] = 3.0f;  // single (kmax,kmax) coefficient
    Tensor img = spectral::idct2(f);
    Tensor out = spectral::lowpass_keep(img, 0);
    for (float v : out.data) CHECK(std::fabs(v) < 1e-4);
}

TEST_CASE("lowpass_keep: band filtering is idempotent under composition") {
    Rng rng(19);
    Tensor img = random_image(rng, 1, 10, 10);
    for (int t = 0; t < 10; ++t) {
        std::size_t k1 = rng.index(10), k2 = rng.index(10);
        Tensor a = spectral::lowpass_keep(spectral::lowpass_keep(img, k1), k2);
        Tensor b = spectral::lowpass_keep(img, std::min(k1, k2));
        CHECK(max_abs_diff(a, b) < 1e-4);
    }
}

TEST_CASE("lowpass_keep: out-of-range band is rejected") {
    Tensor img({1, 8, 8});
    CHECK_THROWS_AS(spectral::lowpass_keep(img, 8), BandError);
}

TEST_CASE("flipping_frequency: DC-mean classifier never flips") {
    const std::size_t side = 8;
    nn::ModelSpec spec;
    nn::Parameters params;
    mean_threshold_model(side, 0.5f, spec, params);
    Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        Tensor img = random_image(rng, 1, side, side);
        // keep the mean away from the threshold so rounding cannot flip it
        double m = 0.0;
        for (float v : img.data) m += v;
        m /= img.numel();
        if (std::fabs(m - 0.5) < 0.02) continue;
        CHECK(spectral::flipping_frequency(spec, params, img) == 0);
    }
}

TEST_CASE("flipping_frequency: top-band probe flips at k_max") {
    const std::size_t side = 8;
    nn::ModelSpec spec;
    nn::Parameters params;
    std::vector<float> basis;
    top_band_probe_model(side, spec, params, basis);
    Rng rng(29);
    for (int t = 0; t < 20; ++t) {
        // image = 0.5 + alpha * top-band basis: the probe logit equals alpha
        float alpha = 0.5f + rng.uniform();
        Tensor img({1, side, side});
        for (std::size_t i = 0; i < img.numel(); ++i) img.data[i] = 0.5f + alpha * basis[i];
        REQUIRE(nn::predict(spec, params, img) == 1);  // decided by the top band
        CHECK(spectral::flipping_frequency(spec, params, img) == side - 1);
    }
}

TEST_CASE("flipping_frequency: constant logits never flip") {
    auto spec = image_linear_spec(1, 8, 8, 2);
    auto params = nn::zero_parameters(spec);
    Rng rng(31);
    Tensor img = random_image(rng, 1, 8, 8);
    CHECK(spectral::flipping_frequency(spec, params, img) == 0);
}

TEST_CASE("flipping_frequency: bounded and deterministic") {
    Rng rng(37);
    auto spec = small_conv_spec(8, 1, 3);
    auto params = nn::init_parameters(spec, 43);
    for (int t = 0; t < 10; ++t) {
        Tensor img = random_image(rng, 1, 8, 8);
        std::size_t f1 = spectral::flipping_frequency(spec, params, img);
        std::size_t f2 = spectral::flipping_frequency(spec, params, img);
        CHECK(f1 == f2);
        CHECK(f1 <= spectral::max_band(img));
    }
}

TEST_CASE("avg_hf_band_requirement: DC classifier averages to zero") {
    const std::size_t side = 8;
    nn::ModelSpec spec;
    nn::Parameters params;
    mean_threshold_model(side, 0.5f, spec, params);
    data::SynthConfig cfg;
    cfg.classes = 2;
    cfg.per_class = 10;
    cfg.side = side;
    cfg.seed = 3;
    auto ds = data::synth_shapes(cfg);
    CHECK(spectral::avg_hf_band_requirement(spec, params, ds) == 0.0);
}

TEST_CASE("avg_hf_band_requirement: single sample equals its own F") {
    auto spec = small_conv_spec(8, 1, 3);
    auto params = nn::init_parameters(spec, 101);
    auto ds = data::synth_shapes(2, 1, 8, 5);
    data::Dataset one;
    one.num_classes = 2;
    one.samples.push_back(ds.samples[0]);
    one.rebuild_index();
    double avg = spectral::avg_hf_band_requirement(spec, params, one);
    CHECK(avg == static_cast<double>(
                     spectral::flipping_frequency(spec, params, ds.samples[0].image)));
}

TEST_CASE("avg_hf_band_requirement: empty set is rejected") {
    auto spec = small_conv_spec(8, 1, 3);
    auto params = nn::init_parameters(spec, 1);
    data::Dataset empty;
    empty.num_classes = 2;
    CHECK_THROWS_AS(spectral::avg_hf_band_requirement(spec, params, empty), PreconditionError);
}

TEST_CASE("band_sweep_accuracy: keeping every band reproduces clean accuracy") {
    const std::size_t side = 8;
    nn::ModelSpec spec;
    nn::Parameters params;
    mean_threshold_model(side, 0.5f, spec, params);
    // labels chosen by the model itself, so clean accuracy is exactly 1 with
    // comfortable margins
    Rng rng(41);
    data::Dataset ds;
    ds.num_classes = 2;
    for (int t = 0; t < 12; ++t) {
        data::Sample s;
        s.image = random_image(rng, 1, side, side);
        double m = 0.0;
        for (float v : s.image.data) m += v;
        m /= s.image.numel();
        if (std::fabs(m - 0.5) < 0.05) continue;
        s.label = m > 0.5 ? 1 : 0;
        ds.samples.push_back(std::move(s));
    }
    ds.rebuild_index();
    auto series = spectral::band_sweep_accuracy(spec, params, ds);
    REQUIRE(series.size() == side);
    CHECK(series.back().band == 0);
    CHECK(series.back().accuracy == 1.0);

    // with the DC removed, the mean collapses to ~0 and everything lands in
    // class 0: accuracy equals the class-0 fraction
    double class0 = 0.0;
    for (const auto& s : ds.samples)
        if (s.label == 0) class0 += 1.0;
    class0 /= ds.size();
    CHECK(series.front().band == side - 1);
    CHECK(series.front().accuracy == doctest::Approx(class0));
}
