#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "advtrust/rng.hpp"
#include "advtrust/vulnerability.hpp"
#include "test_util.hpp"

using namespace advtrust;
namespace vul = advtrust::vulnerability;

namespace {

std::vector<vul::VulnerabilityProfile> profiles_from(const std::vector<double>& d,
                                                     const std::vector<std::size_t>& f) {
    std::vector<vul::VulnerabilityProfile> ps(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        ps[i].sample_id = i;
        ps[i].d_f = d[i];
        ps[i].flip_freq = f[i];
    }
    return ps;
}

/// Exhaustive oracle: minimal within-cluster sum of squares over every
/// contiguous 2-partition of the sorted scores, computed with plain loops.
double brute_force_wcss(std::vector<double> scores) {
    std::sort(scores.begin(), scores.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 1; s < scores.size(); ++s) {
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < s; ++i) m1 += scores[i];
        for (std::size_t i = s; i < scores.size(); ++i) m2 += scores[i];
        m1 /= static_cast<double>(s);
        m2 /= static_cast<double>(scores.size() - s);
        double cost = 0.0;
        for (std::size_t i = 0; i < s; ++i) cost += (scores[i] - m1) * (scores[i] - m1);
        for (std::size_t i = s; i < scores.size(); ++i) cost += (scores[i] - m2) * (scores[i] - m2);
        best = std::min(best, cost);
    }
    return best;
}

double partition_wcss(const std::vector<double>& scores, const vul::TrustPartition& p) {
    double sum[2] = {0, 0};
    std::size_t cnt[2] = {0, 0};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        int c = p.assignment[i] == vul::Cluster::Trust ? 1 : 0;
        sum[c] += scores[i];
        cnt[c]++;
    }
    double mean[2] = {cnt[0] ? sum[0] / cnt[0] : 0.0, cnt[1] ? sum[1] / cnt[1] : 0.0};
    double cost = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        int c = p.assignment[i] == vul::Cluster::Trust ? 1 : 0;
        cost += (scores[i] - mean[c]) * (scores[i] - mean[c]);
    }
    return cost;
}

}  // namespace

TEST_CASE("fit_normalization: min/max extraction and degeneracy flags") {
    auto ps = profiles_from({2, 4, 6}, {0, 16, 32});
    auto s = vul::fit_normalization(ps);
    CHECK(s.min_ddb == 2.0);
    CHECK(s.max_ddb == 6.0);
    CHECK(s.min_f == 0.0);
    CHECK(s.max_f == 32.0);
    CHECK_FALSE(s.ddb_degenerate);
    CHECK_FALSE(s.f_degenerate);

    auto flat = profiles_from({3, 3, 3}, {1, 5, 9});
    auto s2 = vul::fit_normalization(flat);
    CHECK(s2.ddb_degenerate);
    CHECK_FALSE(s2.f_degenerate);

    CHECK_THROWS_AS(vul::fit_normalization({}), PreconditionError);
}

TEST_CASE("normalize_ddb: endpoints, midpoint, clamping, degenerate rule") {
    auto s = vul::fit_normalization(profiles_from({2, 6}, {0, 1}));
    CHECK(vul::normalize_ddb(2, s) == 0.0);
    CHECK(vul::normalize_ddb(6, s) == 1.0);
    CHECK(vul::normalize_ddb(4, s) == 0.5);
    CHECK(vul::normalize_ddb(10, s) == 1.0);
    CHECK(vul::normalize_ddb(-3, s) == 0.0);
    auto deg = vul::fit_normalization(profiles_from({3, 3}, {0, 1}));
    CHECK(vul::normalize_ddb(7, deg) == 0.5);
}

TEST_CASE("normalize_flipfreq: reversal endpoints and degenerate rule") {
    auto s = vul::fit_normalization(profiles_from({0, 1}, {0, 32}));
    CHECK(vul::normalize_flipfreq(0, s) == 1.0);
    CHECK(vul::normalize_flipfreq(32, s) == 0.0);
    CHECK(vul::normalize_flipfreq(16, s) == 0.5);
    auto deg = vul::fit_normalization(profiles_from({0, 1}, {5, 5}));
    CHECK(vul::normalize_flipfreq(5, deg) == 0.5);
}

TEST_CASE("normalization: Eq.1 preserves and Eq.2 reverses the raw ordering") {
    Rng rng(3);
    auto s = vul::fit_normalization(profiles_from({0, 10}, {0, 20}));
    for (int t = 0; t < 100; ++t) {
        double a = rng.uniform_double() * 10.0, b = rng.uniform_double() * 10.0;
        if (a < b) CHECK(vul::normalize_ddb(a, s) < vul::normalize_ddb(b, s));
        double fa = rng.uniform_double() * 20.0, fb = rng.uniform_double() * 20.0;
        if (fa < fb) CHECK(vul::normalize_flipfreq(fa, s) > vul::normalize_flipfreq(fb, s));
    }
}

TEST_CASE("trust_score: harmonic-mean endpoints") {
    CHECK(vul::trust_score(0.0, 0.0) == 0.0);
    CHECK(vul::trust_score(1.0, 0.0) == 0.0);
    CHECK(vul::trust_score(0.0, 1.0) == 0.0);
    double t = vul::trust_score(1.0, 1.0);
    CHECK(std::fabs(t - 2.0 / (2.0 + 1e-5)) < 1e-12);
    CHECK(t == doctest::Approx(0.9999950).epsilon(1e-7));
}

TEST_CASE("trust_score: range, dominance and monotonicity on a grid") {
    const int N = 50;
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            double d = static_cast<double>(i) / N, f = static_cast<double>(j) / N;
            double t = vul::trust_score(d, f);
            CHECK(t >= 0.0);
            CHECK(t < 2.0 / (2.0 + vul::kTrustEpsilon) + 1e-15);
            CHECK(t <= 0.5 * (d + f) + 1e-12);  // harmonic <= arithmetic mean
            if (i > 0) CHECK(vul::trust_score(d - 1.0 / N, f) <= t + 1e-15);
            if (j > 0) CHECK(vul::trust_score(d, f - 1.0 / N) <= t + 1e-15);
            if (d == 0.0 || f == 0.0) CHECK(t == 0.0);
        }
    }
}

TEST_CASE("kmeans2: separated quadruple splits at the gap") {
    std::vector<double> scores{0.1, 0.2, 0.8, 0.9};
    auto p = vul::kmeans2(scores);
    CHECK(p.assignment[0] == vul::Cluster::NonTrust);
    CHECK(p.assignment[1] == vul::Cluster::NonTrust);
    CHECK(p.assignment[2] == vul::Cluster::Trust);
    CHECK(p.assignment[3] == vul::Cluster::Trust);
    CHECK(p.centroid_non_trust == doctest::Approx(0.15));
    CHECK(p.centroid_trust == doctest::Approx(0.85));
}

TEST_CASE("kmeans2: two points become singleton clusters") {
    auto p = vul::kmeans2({0.0, 1.0});
    CHECK(p.assignment[0] == vul::Cluster::NonTrust);
    CHECK(p.assignment[1] == vul::Cluster::Trust);
}

TEST_CASE("kmeans2: identical scores are a degenerate partition") {
    CHECK_THROWS_AS(vul::kmeans2({0.5, 0.5, 0.5}), DegeneratePartitionError);
    CHECK_THROWS_AS(vul::kmeans2({0.5}), PreconditionError);
}

TEST_CASE("kmeans2: matches the brute-force optimum on random score sets") {
    Rng rng(91);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 2 + rng.index(63);
        std::vector<double> scores(n);
        for (double& s : scores) s = rng.uniform_double();
        auto p = vul::kmeans2(scores);
        double got = partition_wcss(scores, p);
        double want = brute_force_wcss(scores);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
        CHECK(p.centroid_trust > p.centroid_non_trust);
        double mean_trust = 0.0, mean_non = 0.0;
        std::size_t nt = 0, nn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (p.assignment[i] == vul::Cluster::Trust) {
                mean_trust += scores[i];
                ++nt;
            } else {
                mean_non += scores[i];
                ++nn;
            }
        }
        REQUIRE(nt > 0);
        REQUIRE(nn > 0);
        CHECK(mean_trust / nt >= mean_non / nn);
    }
}

TEST_CASE("flagging_accuracy: counted fixtures") {
    vul::TrustPartition p;
    p.assignment = {vul::Cluster::NonTrust, vul::Cluster::NonTrust, vul::Cluster::NonTrust,
                    vul::Cluster::NonTrust, vul::Cluster::Trust};
    std::vector<std::size_t> preds{0, 0, 0, 1, 1};
    std::vector<std::size_t> labels{1, 1, 1, 1, 1};  // 3 of 4 non-trust wrong
    CHECK(vul::flagging_accuracy(p, preds, labels) == 75.0);

    std::vector<std::size_t> all_right{1, 1, 1, 1, 1};
    CHECK(vul::flagging_accuracy(p, all_right, labels) == 0.0);
}

TEST_CASE("flagging_accuracy: empty non-trust cluster is undefined") {
    vul::TrustPartition p;
    p.assignment = {vul::Cluster::Trust, vul::Cluster::Trust};
    std::vector<std::size_t> v{0, 1};
    CHECK_THROWS_AS(vul::flagging_accuracy(p, v, v), UndefinedMetricError);
}

TEST_CASE("score_sample: calibration extremes push T to its ceiling") {
    // raw factors at (max ddb, min F) compose through Eqs. 1-3 to ~0.99999
    auto stats = vul::fit_normalization(profiles_from({0.5, 2.5}, {0, 12}));
    double d_hat = vul::normalize_ddb(2.5, stats);
    double f_hat = vul::normalize_flipfreq(0, stats);
    CHECK(d_hat == 1.0);
    CHECK(f_hat == 1.0);
    CHECK(vul::trust_score(d_hat, f_hat) == doctest::Approx(0.99999).epsilon(1e-5));
}

TEST_CASE("score_sample: censored flag propagates and scoring is deterministic") {
    // mean-threshold model on a 4x4 image (spectral scoring needs 2-D extents)
    nn::ModelSpec spec = testutil::image_linear_spec(1, 4, 4, 2);
    nn::Parameters params = nn::zero_parameters(spec);
    auto& lp = params.by_layer.at(1);
    for (std::size_t j = 0; j < 16; ++j) lp.weight.data[16 + j] = 1.0f / 16.0f;
    lp.bias.data[1] = -0.45f;

    Tensor x({1, 4, 4});
    for (float& v : x.data) v = 0.9f;  // mean far above the threshold

    auto stats = vul::fit_normalization(profiles_from({0.1, 2.0}, {0, 3}));
    auto cfg = attacks::AttackConfig::pgd(0.01f, 0.005f, 5);  // far too small to flip
    auto p1 = vul::score_sample(spec, params, x, cfg, stats);
    CHECK(p1.censored);
    CHECK(p1.trust >= 0.0);
    auto p2 = vul::score_sample(spec, params, x, cfg, stats);
    CHECK(p1.d_f == p2.d_f);
    CHECK(p1.flip_freq == p2.flip_freq);
    CHECK(p1.trust == p2.trust);
}

TEST_CASE("profile invariants: T recomputes from its stored factors") {
    Rng rng(97);
    auto stats = vul::fit_normalization(profiles_from({0.0, 4.0}, {0, 15}));
    for (int t = 0; t < 200; ++t) {
        vul::VulnerabilityProfile p;
        p.d_f = rng.uniform_double() * 5.0 - 0.5;
        p.flip_freq = rng.index(16);
        p.d_hat = vul::normalize_ddb(p.d_f, stats);
        p.f_hat = vul::normalize_flipfreq(static_cast<double>(p.flip_freq), stats);
        p.trust = vul::trust_score(p.d_hat, p.f_hat);
        CHECK(p.d_hat >= 0.0);
        CHECK(p.d_hat <= 1.0);
        CHECK(p.f_hat >= 0.0);
        CHECK(p.f_hat <= 1.0);
        CHECK(std::fabs(p.trust - vul::trust_score(p.d_hat, p.f_hat)) < 1e-9);
        if (p.d_hat == 0.0 || p.f_hat == 0.0) CHECK(p.trust == 0.0);
    }
}

TEST_CASE("stats JSON: round-trip") {
    auto s = vul::fit_normalization(profiles_from({0.25, 1.75, 0.5}, {2, 9, 2}));
    auto text = vul::stats_to_json(s);
    auto back = vul::stats_from_json(text);
    CHECK(back.min_ddb == s.min_ddb);
    CHECK(back.max_ddb == s.max_ddb);
    CHECK(back.min_f == s.min_f);
    CHECK(back.max_f == s.max_f);
    CHECK(back.ddb_degenerate == s.ddb_degenerate);
    CHECK(back.f_degenerate == s.f_degenerate);
}
