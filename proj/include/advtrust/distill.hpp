#pragma once

#include <cstdint>
#include <vector>

#include "advtrust/data.hpp"
#include "advtrust/nn.hpp"
#include "advtrust/vulnerability.hpp"

namespace advtrust::distill {

enum class Strategy { Random, ClosestDdb, TrustTopK };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct DistillConfig {
    double temperature = 8.0;  // tau
    double lambda = 0.2;       // CE weight; the KD term is weighted (1 - lambda)
    std::size_t budget = 10;   // samples per class
    Strategy strategy = Strategy::TrustTopK;
    std::uint64_t seed = 0;
    std::size_t epochs = 30;
    std::size_t batch_size = 16;
    float learning_rate = 0.1f;

    void validate() const;
};

struct TransferSet {
    std::vector<std::size_t> ids;  // ascending; exactly budget per class
};

/// Picks the per-class transfer set: seeded uniform (random), the budget
/// smallest raw d_f (closest_ddb) or the budget largest T (trust_topk), ties
/// broken by ascending sample id.
TransferSet select_transfer_set(const std::vector<vulnerability::VulnerabilityProfile>& profiles,
                                const data::Dataset& ds, const DistillConfig& cfg);

struct KdLoss {
    double loss = 0.0;
    double kd_term = 0.0;  // tau^2-scaled KL component, unweighted
    double ce_term = 0.0;  // cross entropy component, unweighted
    Tensor grad_student;   // dL/d(student logits)
};

/// Eq.-style distillation loss:
///   (1-lambda) * tau^2 * KL(softmax(teacher/tau) || softmax(student/tau))
///   + lambda * CE(student logits, label)
KdLoss kd_loss(const Tensor& student_logits, const Tensor& teacher_logits, std::size_t label,
               double temperature, double lambda);

struct DistillEpoch {
    std::size_t epoch = 0;
    double kd_loss = 0.0;
    double ce_loss = 0.0;
    double total = 0.0;
    double val_acc = 0.0;
};

struct DistillResult {
    nn::Parameters student_params;
    TransferSet transfer;
    std::vector<DistillEpoch> log;
};

/// Trains the student on the selected transfer set against the frozen
/// teacher. Held-out accuracy is evaluated on val_ds after each epoch.
DistillResult distill(const nn::ModelSpec& teacher_spec, const nn::Parameters& teacher_params,
                      const nn::ModelSpec& student_spec, const data::Dataset& ds,
                      const std::vector<vulnerability::VulnerabilityProfile>& profiles,
                      const data::Dataset& val_ds, const DistillConfig& cfg);

}  // namespace advtrust::distill
