#pragma once

#include <cstddef>
#include <vector>

#include "advtrust/data.hpp"
#include "advtrust/nn.hpp"
#include "advtrust/tensor.hpp"

namespace advtrust::spectral {

/// Per-channel 2-D DCT-II coefficient grid, same extents as the spatial image.
/// Coefficient (u,v) belongs to frequency band max(u,v); band 0 is the DC term.
struct FrequencyImage {
    Tensor coeffs;
};

/// Square-ring band rule: coefficient (u,v) belongs to band max(u,v).
constexpr std::size_t band_of(std::size_t u, std::size_t v) { return u > v ? u : v; }

/// Highest band index for an image of the given spatial extents.
std::size_t max_band(const Tensor& image);

/// Orthonormal separable DCT-II per channel (rows then columns).
FrequencyImage dct2(const Tensor& image);

/// Exact inverse of dct2.
Tensor idct2(const FrequencyImage& f);

/// Zeroes every coefficient with band max(u,v) > k, then reconstructs.
Tensor lowpass_keep(const Tensor& image, std::size_t k);

/// Zeroes every coefficient with band max(u,v) < j, then reconstructs
/// (high-frequency accumulation used by the band sweep).
Tensor highpass_keep(const Tensor& image, std::size_t j);

/// Highest band the model demonstrably needs: scanning k from max_band-1 down
/// to 0, F = k+1 at the first k where the prediction on lowpass_keep(x,k)
/// differs from the full-spectrum prediction; 0 if it never changes.
std::size_t flipping_frequency(const nn::ModelSpec& spec, const nn::Parameters& params,
                               const Tensor& x);

/// Arithmetic mean of flipping_frequency over the samples. With
/// only_correctly_predicted set, samples whose clean prediction differs from
/// their label are skipped.
double avg_hf_band_requirement(const nn::ModelSpec& spec, const nn::Parameters& params,
                               const data::Dataset& ds, bool only_correctly_predicted = false,
                               std::size_t threads = 1);

struct BandSweepPoint {
    std::size_t band = 0;   // j: lowest band retained
    double accuracy = 0.0;  // on reconstructions from bands >= j
    std::size_t n = 0;
};

/// Accuracy as high-frequency content is accumulated: for j = max_band down to
/// 0 evaluates the model on images rebuilt from bands >= j only.
std::vector<BandSweepPoint> band_sweep_accuracy(const nn::ModelSpec& spec,
                                                const nn::Parameters& params,
                                                const data::Dataset& ds, std::size_t threads = 1);

}  // namespace advtrust::spectral
