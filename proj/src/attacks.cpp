#include "advtrust/attacks.hpp"

#include <algorithm>
#include <cmath>

#include "advtrust/parallel.hpp"
#include "advtrust/rng.hpp"

namespace advtrust::attacks {

const char* attack_kind_name(AttackKind k) {
    switch (k) {
        case AttackKind::Pgd: return "pgd";
        case AttackKind::DeepFool: return "deepfool";
    }
    return "?";
}

void AttackConfig::validate() const {
    if (max_steps < 1) throw ConfigError("attack max_steps must be >= 1");
    if (pixel_lo >= pixel_hi) throw ConfigError("attack pixel bounds must satisfy lo < hi");
    if (kind == AttackKind::Pgd) {
        if (epsilon <= 0.0f) throw ConfigError("pgd epsilon must be positive");
        if (step_size <= 0.0f) throw ConfigError("pgd step_size must be positive");
    } else {
        if (overshoot < 0.0f) throw ConfigError("deepfool overshoot must be >= 0");
    }
}

namespace {

void check_pixel_range(const Tensor& x, const AttackConfig& cfg) {
    for (float v : x.data)
        if (v < cfg.pixel_lo - 1e-6f || v > cfg.pixel_hi + 1e-6f)
            throw PreconditionError("sample pixel " + std::to_string(v) +
                                    " outside attack bounds");
}

}  // namespace

AttackResult pgd_attack(const nn::ModelSpec& spec, const nn::Parameters& params, const Tensor& x,
                        std::optional<std::size_t> label, const AttackConfig& cfg,
                        const IterateObserver& observer) {
    if (cfg.kind != AttackKind::Pgd) throw ConfigError("pgd_attack requires kind=pgd");
    cfg.validate();
    check_pixel_range(x, cfg);

    AttackResult res;
    res.original_pred = nn::predict(spec, params, x);
    std::size_t y_ref = label.value_or(res.original_pred);
    if (y_ref >= spec.num_classes) throw LabelError("attack label out of range");

    Tensor xt = x;
    if (cfg.random_start) {
        Rng rng(cfg.random_start_seed);
        for (std::size_t i = 0; i < xt.numel(); ++i)
            xt.data[i] = std::clamp(x.data[i] + rng.uniform(-cfg.epsilon, cfg.epsilon),
                                    cfg.pixel_lo, cfg.pixel_hi);
    }
    res.adversarial = x;
    res.adversarial_pred = res.original_pred;
    res.steps = cfg.max_steps + 1;  // failure sentinel
    for (std::size_t t = 1; t <= cfg.max_steps; ++t) {
        Tensor g = nn::input_gradient(spec, params, xt, y_ref);
        for (std::size_t i = 0; i < xt.numel(); ++i) {
            float gi = g.data[i];
            float moved = xt.data[i] + cfg.step_size * (gi > 0.0f ? 1.0f : (gi < 0.0f ? -1.0f : 0.0f));
            // project into the L-inf ball around x, then the pixel box
            moved = std::clamp(moved, x.data[i] - cfg.epsilon, x.data[i] + cfg.epsilon);
            xt.data[i] = std::clamp(moved, cfg.pixel_lo, cfg.pixel_hi);
        }
        if (observer) observer(xt, t);
        std::size_t pred = nn::predict(spec, params, xt);
        if (pred != res.original_pred) {
            res.success = true;
            res.steps = t;
            res.adversarial = xt;
            res.adversarial_pred = pred;
            break;
        }
    }
    if (!res.success) {
        res.adversarial = xt;
        res.adversarial_pred = nn::predict(spec, params, xt);
    }
    res.delta = l2_distance(res.adversarial, x);
    return res;
}

AttackResult deepfool_attack(const nn::ModelSpec& spec, const nn::Parameters& params,
                             const Tensor& x, const AttackConfig& cfg,
                             const IterateObserver& observer) {
    if (cfg.kind != AttackKind::DeepFool) throw ConfigError("deepfool_attack requires kind=deepfool");
    cfg.validate();

    AttackResult res;
    res.original_pred = nn::predict(spec, params, x);
    const std::size_t l0 = res.original_pred;
    const double eta = static_cast<double>(cfg.overshoot);

    Tensor xt = x;
    res.steps = cfg.max_steps + 1;
    auto overshoot_point = [&](const Tensor& cur) {
        Tensor xh = x;
        for (std::size_t i = 0; i < x.numel(); ++i)
            xh.data[i] = static_cast<float>(
                x.data[i] + (1.0 + eta) * (static_cast<double>(cur.data[i]) - x.data[i]));
        return xh;
    };

    for (std::size_t t = 1; t <= cfg.max_steps; ++t) {
        Tensor logits;
        std::vector<Tensor> grads = nn::logit_input_gradients(spec, params, xt, &logits);
        for (const Tensor& g : grads) require_finite(g, "deepfool gradient");

        // nearest linearized boundary over all non-reference classes
        double best_ratio = 0.0;
        std::size_t best_k = spec.num_classes;
        double best_wnorm2 = 0.0;
        for (std::size_t k = 0; k < spec.num_classes; ++k) {
            if (k == l0) continue;
            double wnorm2 = 0.0;
            for (std::size_t i = 0; i < x.numel(); ++i) {
                double w = static_cast<double>(grads[k].data[i]) - grads[l0].data[i];
                wnorm2 += w * w;
            }
            if (wnorm2 < 1e-24) continue;  // parallel margins give no direction
            double fk = std::fabs(static_cast<double>(logits.data[k]) - logits.data[l0]);
            double ratio = fk / std::sqrt(wnorm2);
            if (best_k == spec.num_classes || ratio < best_ratio) {
                best_ratio = ratio;
                best_k = k;
                best_wnorm2 = wnorm2;
            }
        }
        if (best_k == spec.num_classes) break;  // no usable direction

        // minimal-norm step to the chosen boundary; the small additive margin
        // pushes past it instead of landing exactly on it
        double fk = std::fabs(static_cast<double>(logits.data[best_k]) - logits.data[l0]);
        double scale = (fk + 1e-4) / best_wnorm2;
        for (std::size_t i = 0; i < x.numel(); ++i) {
            double w = static_cast<double>(grads[best_k].data[i]) - grads[l0].data[i];
            xt.data[i] = static_cast<float>(xt.data[i] + scale * w);
        }
        if (observer) observer(xt, t);

        Tensor xh = overshoot_point(xt);
        std::size_t pred = nn::predict(spec, params, xh);
        if (pred != l0) {
            res.success = true;
            res.steps = t;
            res.adversarial = xh;
            res.adversarial_pred = pred;
            break;
        }
    }
    if (!res.success) {
        res.adversarial = overshoot_point(xt);
        res.adversarial_pred = nn::predict(spec, params, res.adversarial);
    }
    res.delta = l2_distance(res.adversarial, x);
    return res;
}

AttackResult run_attack(const nn::ModelSpec& spec, const nn::Parameters& params, const Tensor& x,
                        const AttackConfig& cfg) {
    return cfg.kind == AttackKind::Pgd ? pgd_attack(spec, params, x, std::nullopt, cfg)
                                       : deepfool_attack(spec, params, x, cfg);
}

DdbEstimate estimate_ddb(const nn::ModelSpec& spec, const nn::Parameters& params, const Tensor& x,
                         const AttackConfig& cfg) {
    AttackResult r = run_attack(spec, params, x, cfg);
    DdbEstimate e;
    e.steps = r.steps;
    e.success = r.success;
    e.original_pred = r.original_pred;
    if (r.success) {
        e.value = r.delta;
        return e;
    }
    e.censored = true;
    double n = static_cast<double>(x.numel());
    if (cfg.kind == AttackKind::Pgd) {
        e.value = static_cast<double>(cfg.epsilon) * std::sqrt(n);
    } else {
        e.value = static_cast<double>(cfg.pixel_hi - cfg.pixel_lo) * std::sqrt(n);
    }
    return e;
}

StepsProfile steps_profile(const nn::ModelSpec& spec, const nn::Parameters& params,
                           const data::Dataset& ds, const AttackConfig& cfg, std::size_t threads) {
    if (ds.samples.empty()) throw PreconditionError("steps_profile: empty dataset");
    StepsProfile p;
    p.kind = cfg.kind;
    p.rows.resize(ds.samples.size());
    parallel_for(ds.samples.size(), threads, [&](std::size_t i) {
        DdbEstimate e = estimate_ddb(spec, params, ds.samples[i].image, cfg);
        p.rows[i] = {i, ds.samples[i].label, e.value, e.censored, e.steps, e.success};
    });
    std::vector<double> d(p.rows.size()), s(p.rows.size());
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        d[i] = p.rows[i].d_f;
        s[i] = static_cast<double>(p.rows[i].steps);
    }
    p.rank_correlation = spearman(d, s);
    return p;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw PreconditionError("spearman requires two equal nonempty vectors");
    if (a.size() == 1) return 1.0;
    std::vector<double> ra = average_ranks(a), rb = average_ranks(b);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(ra.size());
    mb /= static_cast<double>(rb.size());
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

}  // namespace advtrust::attacks
