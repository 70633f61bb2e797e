#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "advtrust/attacks.hpp"
#include "advtrust/data.hpp"
#include "advtrust/nn.hpp"

namespace advtrust::vulnerability {

/// Per-sample vulnerability factors: raw DDB and flipping frequency plus
/// their normalized forms and the combined trust score.
struct VulnerabilityProfile {
    std::size_t sample_id = 0;
    std::size_t label = 0;
    std::size_t predicted = 0;  // clean model prediction
    double d_f = 0.0;           // raw DDB estimate
    bool censored = false;
    std::size_t flip_freq = 0;  // raw flipping frequency F (band index)
    double d_hat = 0.0;         // normalized DDB in [0,1]
    double f_hat = 0.0;         // reversed normalized flipping frequency in [0,1]
    double trust = 0.0;         // combined score T in [0,1)
};

/// Min/max of the raw factors over a calibration set, frozen for test time.
struct NormalizationStats {
    double min_ddb = 0.0;
    double max_ddb = 0.0;
    double min_f = 0.0;
    double max_f = 0.0;
    bool ddb_degenerate = false;  // max == min
    bool f_degenerate = false;
};

constexpr double kTrustEpsilon = 1e-5;

NormalizationStats fit_normalization(const std::vector<VulnerabilityProfile>& profiles);

/// (d_f - min) / (max - min), clamped to [0,1]; 0.5 when the stats are
/// degenerate.
double normalize_ddb(double d_f, const NormalizationStats& stats);

/// 1 - (F - min) / (max - min), clamped to [0,1]; 0.5 when degenerate.
double normalize_flipfreq(double f, const NormalizationStats& stats);

/// Harmonic mean 2 d F / (d + F + eps) with eps = 1e-5.
double trust_score(double d_hat, double f_hat);

enum class Cluster : std::uint8_t { NonTrust = 0, Trust = 1 };

struct TrustPartition {
    double centroid_non_trust = 0.0;
    double centroid_trust = 0.0;
    std::vector<Cluster> assignment;  // parallel to the input scores
};

/// Two-cluster K-means on 1-D scores. The split is the global optimum of the
/// within-cluster sum of squares (clusters are contiguous in sorted order, so
/// an exact split search suffices); the larger-centroid cluster is "trust".
TrustPartition kmeans2(const std::vector<double>& scores);

/// Eq. 4: percentage of non-trust samples the model actually misclassifies.
double flagging_accuracy(const TrustPartition& partition,
                         const std::vector<std::size_t>& predictions,
                         const std::vector<std::size_t>& labels);

/// Test-time scoring path: estimate_ddb + flipping_frequency for one sample,
/// normalized against the frozen stats.
VulnerabilityProfile score_sample(const nn::ModelSpec& spec, const nn::Parameters& params,
                                  const Tensor& x, const attacks::AttackConfig& attack_cfg,
                                  const NormalizationStats& stats);

/// Raw factors only (no normalization); used to build calibration profiles.
VulnerabilityProfile raw_profile(const nn::ModelSpec& spec, const nn::Parameters& params,
                                 const Tensor& x, const attacks::AttackConfig& attack_cfg);

/// Profiles for a whole dataset; ids follow the dataset ordering.
std::vector<VulnerabilityProfile> profile_dataset(const nn::ModelSpec& spec,
                                                  const nn::Parameters& params,
                                                  const data::Dataset& ds,
                                                  const attacks::AttackConfig& attack_cfg,
                                                  const NormalizationStats* stats,
                                                  std::size_t threads = 1);

void apply_normalization(std::vector<VulnerabilityProfile>& profiles,
                         const NormalizationStats& stats);

std::string stats_to_json(const NormalizationStats& s);
NormalizationStats stats_from_json(const std::string& text);

}  // namespace advtrust::vulnerability
