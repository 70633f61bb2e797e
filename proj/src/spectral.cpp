#include "advtrust/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "advtrust/parallel.hpp"

namespace advtrust::spectral {

namespace {

/// Orthonormal DCT-II basis for size N: basis[k][n] = a_k cos(pi (2n+1) k / 2N)
/// with a_0 = sqrt(1/N) and a_k = sqrt(2/N).
const std::vector<double>& dct_basis(std::size_t n) {
    static std::map<std::size_t, std::vector<double>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> b(n * n);
    double a0 = std::sqrt(1.0 / static_cast<double>(n));
    double ak = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
            b[k * n + j] = (k == 0 ? a0 : ak) *
                           std::cos(M_PI * (2.0 * j + 1.0) * k / (2.0 * n));
    return cache.emplace(n, std::move(b)).first->second;
}

void check_image(const Tensor& image) {
    if (image.rank() != 3)
        throw ShapeError("spectral ops expect (C,H,W) images, got " + shape_str(image.shape));
    if (image.shape[1] < 2 || image.shape[2] < 2)
        throw ShapeError("spatial extents must be >= 2, got " + shape_str(image.shape));
}

/// out = rowsB ? (B * M) : (B^T * M), all H x H / H x W shaped appropriately.
void apply_rows(const std::vector<double>& basis, bool transpose, const std::vector<double>& in,
                std::vector<double>& out, std::size_t h, std::size_t w) {
    for (std::size_t k = 0; k < h; ++k)
        for (std::size_t c = 0; c < w; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < h; ++j)
                acc += (transpose ? basis[j * h + k] : basis[k * h + j]) * in[j * w + c];
            out[k * w + c] = acc;
        }
}

void apply_cols(const std::vector<double>& basis, bool transpose, const std::vector<double>& in,
                std::vector<double>& out, std::size_t h, std::size_t w) {
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t k = 0; k < w; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < w; ++j)
                acc += (transpose ? basis[j * w + k] : basis[k * w + j]) * in[r * w + j];
            out[r * w + k] = acc;
        }
}

Tensor transform(const Tensor& image, bool inverse) {
    check_image(image);
    const std::size_t C = image.shape[0], H = image.shape[1], W = image.shape[2];
    const auto& bh = dct_basis(H);
    const auto& bw = dct_basis(W);
    Tensor out(image.shape);
    std::vector<double> tmp(H * W), buf(H * W), res(H * W);
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t i = 0; i < H * W; ++i) tmp[i] = image.data[c * H * W + i];
        // forward: coeffs = B_H * x * B_W^T; inverse: x = B_H^T * coeffs * B_W
        apply_rows(bh, inverse, tmp, buf, H, W);
        apply_cols(bw, inverse, buf, res, H, W);
        for (std::size_t i = 0; i < H * W; ++i)
            out.data[c * H * W + i] = static_cast<float>(res[i]);
    }
    return out;
}

}  // namespace

std::size_t max_band(const Tensor& image) {
    check_image(image);
    return std::max(image.shape[1], image.shape[2]) - 1;
}

FrequencyImage dct2(const Tensor& image) { return FrequencyImage{transform(image, false)}; }

Tensor idct2(const FrequencyImage& f) { return transform(f.coeffs, true); }

Tensor lowpass_keep(const Tensor& image, std::size_t k) {
    std::size_t kmax = max_band(image);
    if (k > kmax)
        throw BandError("band " + std::to_string(k) + " out of range [0," + std::to_string(kmax) +
                        "]");
    FrequencyImage f = dct2(image);
    const std::size_t C = image.shape[0], H = image.shape[1], W = image.shape[2];
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t u = 0; u < H; ++u)
            for (std::size_t v = 0; v < W; ++v)
                if (band_of(u, v) > k) f.coeffs.data[(c * H + u) * W + v] = 0.0f;
    return idct2(f);
}

Tensor highpass_keep(const Tensor& image, std::size_t j) {
    std::size_t kmax = max_band(image);
    if (j > kmax)
        throw BandError("band " + std::to_string(j) + " out of range [0," + std::to_string(kmax) +
                        "]");
    FrequencyImage f = dct2(image);
    const std::size_t C = image.shape[0], H = image.shape[1], W = image.shape[2];
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t u = 0; u < H; ++u)
            for (std::size_t v = 0; v < W; ++v)
                if (band_of(u, v) < j) f.coeffs.data[(c * H + u) * W + v] = 0.0f;
    return idct2(f);
}

std::size_t flipping_frequency(const nn::ModelSpec& spec, const nn::Parameters& params,
                               const Tensor& x) {
    std::size_t kmax = max_band(x);
    std::size_t p0 = nn::predict(spec, params, x);
    for (std::size_t k = kmax; k-- > 0;) {
        if (nn::predict(spec, params, lowpass_keep(x, k)) != p0) return k + 1;
    }
    return 0;
}

double avg_hf_band_requirement(const nn::ModelSpec& spec, const nn::Parameters& params,
                               const data::Dataset& ds, bool only_correctly_predicted,
                               std::size_t threads) {
    if (ds.samples.empty()) throw PreconditionError("avg_hf_band_requirement: empty sample set");
    std::vector<double> freqs(ds.samples.size(), -1.0);
    parallel_for(ds.samples.size(), threads, [&](std::size_t i) {
        const data::Sample& s = ds.samples[i];
        if (only_correctly_predicted && nn::predict(spec, params, s.image) != s.label) return;
        freqs[i] = static_cast<double>(flipping_frequency(spec, params, s.image));
    });
    double sum = 0.0;
    std::size_t n = 0;
    for (double f : freqs)
        if (f >= 0.0) {
            sum += f;
            ++n;
        }
    if (n == 0) throw PreconditionError("avg_hf_band_requirement: no samples left after filtering");
    return sum / static_cast<double>(n);
}

std::vector<BandSweepPoint> band_sweep_accuracy(const nn::ModelSpec& spec,
                                                const nn::Parameters& params,
                                                const data::Dataset& ds, std::size_t threads) {
    if (ds.samples.empty()) throw PreconditionError("band_sweep_accuracy: empty dataset");
    std::size_t kmax = max_band(ds.samples[0].image);
    std::vector<BandSweepPoint> series;
    series.reserve(kmax + 1);
    for (std::size_t j = kmax + 1; j-- > 0;) {
        std::vector<std::uint8_t> correct(ds.samples.size(), 0);
        parallel_for(ds.samples.size(), threads, [&](std::size_t i) {
            Tensor rec = highpass_keep(ds.samples[i].image, j);
            correct[i] = nn::predict(spec, params, rec) == ds.samples[i].label ? 1 : 0;
        });
        std::size_t hits = 0;
        for (std::uint8_t c : correct) hits += c;
        series.push_back({j, static_cast<double>(hits) / static_cast<double>(ds.samples.size()),
                          ds.samples.size()});
    }
    return series;
}

}  // namespace advtrust::spectral
