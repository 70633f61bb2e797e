#include "advtrust/vulnerability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "advtrust/parallel.hpp"
#include "advtrust/spectral.hpp"

namespace advtrust::vulnerability {

NormalizationStats fit_normalization(const std::vector<VulnerabilityProfile>& profiles) {
    if (profiles.empty()) throw PreconditionError("fit_normalization: empty profile set");
    if (profiles.size() < 2) throw PreconditionError("fit_normalization: need at least 2 profiles");
    NormalizationStats s;
    s.min_ddb = s.max_ddb = profiles[0].d_f;
    s.min_f = s.max_f = static_cast<double>(profiles[0].flip_freq);
    for (const auto& p : profiles) {
        s.min_ddb = std::min(s.min_ddb, p.d_f);
        s.max_ddb = std::max(s.max_ddb, p.d_f);
        s.min_f = std::min(s.min_f, static_cast<double>(p.flip_freq));
        s.max_f = std::max(s.max_f, static_cast<double>(p.flip_freq));
    }
    s.ddb_degenerate = s.max_ddb == s.min_ddb;
    s.f_degenerate = s.max_f == s.min_f;
    return s;
}

double normalize_ddb(double d_f, const NormalizationStats& stats) {
    if (stats.ddb_degenerate) return 0.5;
    return std::clamp((d_f - stats.min_ddb) / (stats.max_ddb - stats.min_ddb), 0.0, 1.0);
}

double normalize_flipfreq(double f, const NormalizationStats& stats) {
    if (stats.f_degenerate) return 0.5;
    return std::clamp(1.0 - (f - stats.min_f) / (stats.max_f - stats.min_f), 0.0, 1.0);
}

double trust_score(double d_hat, double f_hat) {
    return 2.0 * d_hat * f_hat / (d_hat + f_hat + kTrustEpsilon);
}

TrustPartition kmeans2(const std::vector<double>& scores) {
    if (scores.size() < 2) throw PreconditionError("kmeans2: need at least 2 scores");
    double lo = scores[0], hi = scores[0];
    for (double s : scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (lo == hi) throw DegeneratePartitionError("all scores identical");

    // In 1-D both K-means clusters are contiguous in sorted order, so the
    // optimal assignment is an exact split search over the sorted scores.
    std::vector<std::size_t> idx(scores.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::size_t n = scores.size();
    std::vector<double> prefix(n + 1, 0.0), prefix2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double v = scores[idx[i]];
        prefix[i + 1] = prefix[i] + v;
        prefix2[i + 1] = prefix2[i] + v * v;
    }
    auto wcss = [&](std::size_t a, std::size_t b) {  // [a, b)
        double cnt = static_cast<double>(b - a);
        double sum = prefix[b] - prefix[a];
        return (prefix2[b] - prefix2[a]) - sum * sum / cnt;
    };
    std::size_t best_split = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 1; s < n; ++s) {
        double c = wcss(0, s) + wcss(s, n);
        if (c < best) {
            best = c;
            best_split = s;
        }
    }
    double mean_lo = (prefix[best_split] - prefix[0]) / static_cast<double>(best_split);
    double mean_hi = (prefix[n] - prefix[best_split]) / static_cast<double>(n - best_split);

    TrustPartition part;
    part.centroid_non_trust = mean_lo;
    part.centroid_trust = mean_hi;
    part.assignment.assign(n, Cluster::NonTrust);
    for (std::size_t i = best_split; i < n; ++i) part.assignment[idx[i]] = Cluster::Trust;
    return part;
}

double flagging_accuracy(const TrustPartition& partition,
                         const std::vector<std::size_t>& predictions,
                         const std::vector<std::size_t>& labels) {
    if (partition.assignment.size() != predictions.size() ||
        predictions.size() != labels.size())
        throw PreconditionError("flagging_accuracy: size mismatch");
    std::size_t flagged = 0, incorrect = 0;
    for (std::size_t i = 0; i < partition.assignment.size(); ++i) {
        if (partition.assignment[i] != Cluster::NonTrust) continue;
        ++flagged;
        if (predictions[i] != labels[i]) ++incorrect;
    }
    if (flagged == 0)
        throw UndefinedMetricError("flagging accuracy undefined: non-trust cluster is empty");
    return 100.0 * static_cast<double>(incorrect) / static_cast<double>(flagged);
}

VulnerabilityProfile raw_profile(const nn::ModelSpec& spec, const nn::Parameters& params,
                                 const Tensor& x, const attacks::AttackConfig& attack_cfg) {
    VulnerabilityProfile p;
    attacks::DdbEstimate e = attacks::estimate_ddb(spec, params, x, attack_cfg);
    p.d_f = e.value;
    p.censored = e.censored;
    p.predicted = e.original_pred;
    p.flip_freq = spectral::flipping_frequency(spec, params, x);
    return p;
}

VulnerabilityProfile score_sample(const nn::ModelSpec& spec, const nn::Parameters& params,
                                  const Tensor& x, const attacks::AttackConfig& attack_cfg,
                                  const NormalizationStats& stats) {
    VulnerabilityProfile p = raw_profile(spec, params, x, attack_cfg);
    p.d_hat = normalize_ddb(p.d_f, stats);
    p.f_hat = normalize_flipfreq(static_cast<double>(p.flip_freq), stats);
    p.trust = trust_score(p.d_hat, p.f_hat);
    return p;
}

std::vector<VulnerabilityProfile> profile_dataset(const nn::ModelSpec& spec,
                                                  const nn::Parameters& params,
                                                  const data::Dataset& ds,
                                                  const attacks::AttackConfig& attack_cfg,
                                                  const NormalizationStats* stats,
                                                  std::size_t threads) {
    if (ds.samples.empty()) throw PreconditionError("profile_dataset: empty dataset");
    std::vector<VulnerabilityProfile> profiles(ds.size());
    parallel_for(ds.size(), threads, [&](std::size_t i) {
        VulnerabilityProfile p =
            stats ? score_sample(spec, params, ds.samples[i].image, attack_cfg, *stats)
                  : raw_profile(spec, params, ds.samples[i].image, attack_cfg);
        p.sample_id = i;
        p.label = ds.samples[i].label;
        profiles[i] = p;
    });
    return profiles;
}

void apply_normalization(std::vector<VulnerabilityProfile>& profiles,
                         const NormalizationStats& stats) {
    for (auto& p : profiles) {
        p.d_hat = normalize_ddb(p.d_f, stats);
        p.f_hat = normalize_flipfreq(static_cast<double>(p.flip_freq), stats);
        p.trust = trust_score(p.d_hat, p.f_hat);
    }
}

std::string stats_to_json(const NormalizationStats& s) {
    nlohmann::ordered_json j;
    j["min_ddb"] = s.min_ddb;
    j["max_ddb"] = s.max_ddb;
    j["min_f"] = s.min_f;
    j["max_f"] = s.max_f;
    j["ddb_degenerate"] = s.ddb_degenerate;
    j["f_degenerate"] = s.f_degenerate;
    return j.dump(2) + "\n";
}

NormalizationStats stats_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    NormalizationStats s;
    s.min_ddb = j.at("min_ddb").get<double>();
    s.max_ddb = j.at("max_ddb").get<double>();
    s.min_f = j.at("min_f").get<double>();
    s.max_f = j.at("max_f").get<double>();
    s.ddb_degenerate = j.at("ddb_degenerate").get<bool>();
    s.f_degenerate = j.at("f_degenerate").get<bool>();
    return s;
}

}  // namespace advtrust::vulnerability
