#include "advtrust/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "advtrust/rng.hpp"
#include "advtrust/training.hpp"

namespace advtrust::distill {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Random: return "random";
        case Strategy::ClosestDdb: return "closest_ddb";
        case Strategy::TrustTopK: return "trust_topk";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "random") return Strategy::Random;
    if (name == "closest_ddb") return Strategy::ClosestDdb;
    if (name == "trust_topk") return Strategy::TrustTopK;
    throw ConfigError("unknown selection strategy '" + name + "'");
}

void DistillConfig::validate() const {
    if (temperature <= 0.0) throw ConfigError("distill temperature must be positive");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("distill lambda must be in [0,1]");
    if (budget < 1) throw ConfigError("distill budget must be >= 1");
    if (epochs < 1) throw ConfigError("distill epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("distill batch_size must be >= 1");
    if (learning_rate <= 0.0f) throw ConfigError("distill learning_rate must be positive");
}

TransferSet select_transfer_set(const std::vector<vulnerability::VulnerabilityProfile>& profiles,
                                const data::Dataset& ds, const DistillConfig& cfg) {
    cfg.validate();
    if (profiles.size() != ds.size())
        throw PreconditionError("profiles do not cover the dataset");
    if (cfg.budget * ds.num_classes > ds.size())
        throw BudgetError("budget " + std::to_string(cfg.budget) + " per class exceeds dataset");

    TransferSet ts;
    Rng rng(cfg.seed ^ 0xd15717ULL);
    for (std::size_t c = 0; c < ds.num_classes; ++c) {
        std::vector<std::size_t> ids = ds.per_class[c];  // ascending
        if (ids.size() < cfg.budget)
            throw BudgetError("class " + std::to_string(c) + " has " +
                              std::to_string(ids.size()) + " samples, budget is " +
                              std::to_string(cfg.budget));
        switch (cfg.strategy) {
            case Strategy::Random:
                rng.shuffle(ids);
                ids.resize(cfg.budget);
                break;
            case Strategy::ClosestDdb:
                std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
                    if (profiles[a].d_f != profiles[b].d_f) return profiles[a].d_f < profiles[b].d_f;
                    return a < b;
                });
                ids.resize(cfg.budget);
                break;
            case Strategy::TrustTopK:
                std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
                    if (profiles[a].trust != profiles[b].trust)
                        return profiles[a].trust > profiles[b].trust;
                    return a < b;
                });
                ids.resize(cfg.budget);
                break;
        }
        std::sort(ids.begin(), ids.end());
        ts.ids.insert(ts.ids.end(), ids.begin(), ids.end());
    }
    std::sort(ts.ids.begin(), ts.ids.end());
    return ts;
}

KdLoss kd_loss(const Tensor& student_logits, const Tensor& teacher_logits, std::size_t label,
               double temperature, double lambda) {
    if (temperature <= 0.0) throw ConfigError("kd_loss temperature must be positive");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("kd_loss lambda must be in [0,1]");
    if (student_logits.numel() != teacher_logits.numel())
        throw ShapeError("student/teacher logit lengths differ");
    const std::size_t p = student_logits.numel();
    if (label >= p) throw LabelError("kd_loss label out of range");

    auto log_softmax = [p](const Tensor& z, double tau, std::vector<double>& out) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < p; ++i) m = std::max(m, static_cast<double>(z.data[i]) / tau);
        double sum = 0.0;
        for (std::size_t i = 0; i < p; ++i) sum += std::exp(static_cast<double>(z.data[i]) / tau - m);
        double lse = m + std::log(sum);
        out.resize(p);
        for (std::size_t i = 0; i < p; ++i) out[i] = static_cast<double>(z.data[i]) / tau - lse;
    };

    std::vector<double> log_pt, log_qs;  // teacher and student softened log-probs
    log_softmax(teacher_logits, temperature, log_pt);
    log_softmax(student_logits, temperature, log_qs);

    double kl = 0.0;
    for (std::size_t i = 0; i < p; ++i) kl += std::exp(log_pt[i]) * (log_pt[i] - log_qs[i]);
    double kd_term = temperature * temperature * kl;

    nn::LossGrad ce = nn::cross_entropy(student_logits, label);

    KdLoss r;
    r.kd_term = kd_term;
    r.ce_term = ce.loss;
    r.loss = (1.0 - lambda) * kd_term + lambda * ce.loss;
    r.grad_student = Tensor({p});
    for (std::size_t i = 0; i < p; ++i) {
        double g_kd = temperature * (std::exp(log_qs[i]) - std::exp(log_pt[i]));
        r.grad_student.data[i] = static_cast<float>(
            (1.0 - lambda) * g_kd + lambda * static_cast<double>(ce.grad_logits.data[i]));
    }
    return r;
}

DistillResult distill(const nn::ModelSpec& teacher_spec, const nn::Parameters& teacher_params,
                      const nn::ModelSpec& student_spec, const data::Dataset& ds,
                      const std::vector<vulnerability::VulnerabilityProfile>& profiles,
                      const data::Dataset& val_ds, const DistillConfig& cfg) {
    cfg.validate();
    DistillResult out;
    out.transfer = select_transfer_set(profiles, ds, cfg);
    out.student_params = nn::init_parameters(student_spec, cfg.seed);

    // teacher logits are fixed, compute them once per transfer sample
    std::vector<Tensor> teacher_logits(out.transfer.ids.size());
    for (std::size_t i = 0; i < out.transfer.ids.size(); ++i)
        teacher_logits[i] =
            nn::forward(teacher_spec, teacher_params, ds.samples[out.transfer.ids[i]].image);

    Rng shuffle_rng(cfg.seed ^ 0x5deece66dULL);
    std::vector<std::size_t> order(out.transfer.ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double kd_sum = 0.0, ce_sum = 0.0, total_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(order.size(), start + cfg.batch_size);
            nn::Parameters grads = nn::zero_parameters(student_spec);
            for (std::size_t i = start; i < end; ++i) {
                std::size_t t = order[i];
                const data::Sample& s = ds.samples[out.transfer.ids[t]];
                Tensor logits = nn::forward(student_spec, out.student_params, s.image);
                KdLoss l = kd_loss(logits, teacher_logits[t], s.label, cfg.temperature, cfg.lambda);
                kd_sum += l.kd_term;
                ce_sum += l.ce_term;
                total_sum += l.loss;
                nn::Gradients g = nn::backward_from_logits_grad(student_spec, out.student_params,
                                                                s.image, l.grad_student);
                for (auto& [idx, lp] : grads.by_layer) {
                    const nn::LayerParams& src = g.params.by_layer.at(idx);
                    for (std::size_t j = 0; j < lp.weight.numel(); ++j)
                        lp.weight.data[j] += src.weight.data[j];
                    for (std::size_t j = 0; j < lp.bias.numel(); ++j)
                        lp.bias.data[j] += src.bias.data[j];
                }
            }
            float inv = 1.0f / static_cast<float>(end - start);
            for (auto& [idx, lp] : grads.by_layer) {
                nn::LayerParams& theta = out.student_params.by_layer.at(idx);
                for (std::size_t j = 0; j < lp.weight.numel(); ++j) {
                    lp.weight.data[j] *= inv;
                    theta.weight.data[j] -= cfg.learning_rate * lp.weight.data[j];
                }
                for (std::size_t j = 0; j < lp.bias.numel(); ++j) {
                    lp.bias.data[j] *= inv;
                    theta.bias.data[j] -= cfg.learning_rate * lp.bias.data[j];
                }
            }
        }
        double n = static_cast<double>(order.size());
        if (!std::isfinite(total_sum))
            throw TrainingDivergedError("distillation loss is non-finite", epoch);
        DistillEpoch e;
        e.epoch = epoch;
        e.kd_loss = kd_sum / n;
        e.ce_loss = ce_sum / n;
        e.total = total_sum / n;
        e.val_acc = training::accuracy(student_spec, out.student_params, val_ds);
        out.log.push_back(e);
    }
    return out;
}

}  // namespace advtrust::distill
