#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "advtrust/data.hpp"
#include "advtrust/nn.hpp"
#include "advtrust/tensor.hpp"

namespace advtrust::attacks {

enum class AttackKind { Pgd, DeepFool };

const char* attack_kind_name(AttackKind k);

struct AttackConfig {
    AttackKind kind = AttackKind::Pgd;
    // pgd
    float epsilon = 8.0f / 255.0f;    // L-inf budget
    float step_size = 2.0f / 255.0f;
    // deepfool
    float overshoot = 0.02f;
    std::size_t max_steps = 20;
    float pixel_lo = 0.0f;
    float pixel_hi = 1.0f;
    // off by default: scoring wants the deterministic start at x itself
    bool random_start = false;
    std::uint64_t random_start_seed = 0;

    static AttackConfig pgd(float epsilon, float step_size, std::size_t max_steps = 20) {
        AttackConfig c;
        c.kind = AttackKind::Pgd;
        c.epsilon = epsilon;
        c.step_size = step_size;
        c.max_steps = max_steps;
        return c;
    }
    static AttackConfig deepfool(float overshoot = 0.02f, std::size_t max_steps = 50) {
        AttackConfig c;
        c.kind = AttackKind::DeepFool;
        c.overshoot = overshoot;
        c.max_steps = max_steps;
        return c;
    }

    void validate() const;
};

struct AttackResult {
    Tensor adversarial;           // x-hat
    bool success = false;
    std::size_t steps = 0;        // iterations until first flip; max_steps+1 on failure
    double delta = 0.0;           // L2 norm of (x-hat - x), the DDB estimate
    std::size_t original_pred = 0;
    std::size_t adversarial_pred = 0;
};

/// Called with each attack iterate; used for trajectory invariants in tests.
using IterateObserver = std::function<void(const Tensor& x_t, std::size_t step)>;

/// Projected gradient descent in the L-inf ball: ascend the sign of the
/// cross-entropy gradient w.r.t. the reference label (the model's own clean
/// prediction unless a label is given), projecting into the epsilon ball and
/// the pixel bounds after every step. Stops at the first prediction flip.
AttackResult pgd_attack(const nn::ModelSpec& spec, const nn::Parameters& params, const Tensor& x,
                        std::optional<std::size_t> label, const AttackConfig& cfg,
                        const IterateObserver& observer = nullptr);

/// Multiclass DeepFool: each iteration linearizes the margins of every
/// non-predicted class and moves by the minimal-norm step to the nearest
/// linearized boundary; the final perturbation is scaled by (1 + overshoot).
AttackResult deepfool_attack(const nn::ModelSpec& spec, const nn::Parameters& params,
                             const Tensor& x, const AttackConfig& cfg,
                             const IterateObserver& observer = nullptr);

AttackResult run_attack(const nn::ModelSpec& spec, const nn::Parameters& params, const Tensor& x,
                        const AttackConfig& cfg);

struct DdbEstimate {
    double value = 0.0;
    bool censored = false;     // attack failed; value is the budget ceiling
    std::size_t steps = 0;
    bool success = false;
    std::size_t original_pred = 0;
};

/// Runs the configured attack; on success the L2 displacement, on failure the
/// budget ceiling with the censored flag set (epsilon * sqrt(n) for PGD, the
/// pixel-box diameter for DeepFool).
DdbEstimate estimate_ddb(const nn::ModelSpec& spec, const nn::Parameters& params, const Tensor& x,
                         const AttackConfig& cfg);

struct StepsProfileRow {
    std::size_t sample_id = 0;
    std::size_t label = 0;
    double d_f = 0.0;
    bool censored = false;
    std::size_t steps = 0;
    bool success = false;
};

struct StepsProfile {
    std::vector<StepsProfileRow> rows;
    AttackKind kind = AttackKind::Pgd;
    double rank_correlation = 0.0;  // Spearman between d_f and steps
};

/// One (d_f, steps) row per dataset sample plus the rank correlation between
/// the two columns.
StepsProfile steps_profile(const nn::ModelSpec& spec, const nn::Parameters& params,
                           const data::Dataset& ds, const AttackConfig& cfg,
                           std::size_t threads = 1);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace advtrust::attacks
