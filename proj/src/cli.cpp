#include "advtrust/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <json.hpp>

#include "advtrust/csv.hpp"
#include "advtrust/spectral.hpp"
#include "advtrust/vulnerability.hpp"

namespace advtrust::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

nn::LayerDesc parse_layer(const json& j, std::size_t i) {
    if (!j.is_object()) throw ConfigError("model.layers[" + std::to_string(i) + "] must be an object");
    std::string kind = j.at("kind").get<std::string>();
    nn::LayerDesc L;
    if (kind == "dense") {
        reject_unknown_keys(j, {"kind", "in", "out"}, "dense layer");
        L = nn::LayerDesc::dense(j.at("in").get<std::size_t>(), j.at("out").get<std::size_t>());
    } else if (kind == "conv2d") {
        reject_unknown_keys(j, {"kind", "in_ch", "out_ch", "kernel", "stride", "pad"}, "conv2d layer");
        L = nn::LayerDesc::conv2d(j.at("in_ch").get<std::size_t>(), j.at("out_ch").get<std::size_t>(),
                                  j.at("kernel").get<std::size_t>(), j.value("stride", std::size_t{1}),
                                  j.value("pad", std::size_t{0}));
    } else if (kind == "relu") {
        reject_unknown_keys(j, {"kind"}, "relu layer");
        L = nn::LayerDesc::relu();
    } else if (kind == "maxpool2d") {
        reject_unknown_keys(j, {"kind", "k"}, "maxpool2d layer");
        L = nn::LayerDesc::maxpool2d(j.at("k").get<std::size_t>());
    } else if (kind == "flatten") {
        reject_unknown_keys(j, {"kind"}, "flatten layer");
        L = nn::LayerDesc::flatten();
    } else {
        throw ConfigError("unknown layer kind '" + kind + "'");
    }
    return L;
}

nn::ModelSpec parse_model_spec(const json& block, const char* layers_key) {
    nn::ModelSpec spec;
    auto shape = block.at("input_shape");
    if (!shape.is_array() || shape.size() != 3)
        throw ConfigError("model.input_shape must be [channels, height, width]");
    for (std::size_t i = 0; i < 3; ++i) spec.input_shape[i] = shape[i].get<std::size_t>();
    spec.num_classes = block.at("num_classes").get<std::size_t>();
    const json& layers = block.at(layers_key);
    if (!layers.is_array() || layers.empty())
        throw ConfigError(std::string("model.") + layers_key + " must be a nonempty array");
    for (std::size_t i = 0; i < layers.size(); ++i) spec.layers.push_back(parse_layer(layers[i], i));
    try {
        nn::validate_spec(spec);
    } catch (const ShapeError& e) {
        throw ConfigError(std::string("model does not compose: ") + e.what());
    }
    return spec;
}

attacks::AttackKind parse_attack_kind(const std::string& s) {
    if (s == "pgd") return attacks::AttackKind::Pgd;
    if (s == "deepfool") return attacks::AttackKind::DeepFool;
    throw ConfigError("unknown attack kind '" + s + "'");
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    reject_unknown_keys(
        j, {"seed", "output_dir", "dataset", "model", "train", "attack", "spectral", "trust",
            "distill"},
        "config root");

    ExperimentConfig cfg;
    cfg.config_hash = fnv1a_hex(j.dump());
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.output_dir = j.value("output_dir", std::string("out"));

    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        reject_unknown_keys(d,
                            {"kind", "dir", "classes", "per_class", "side", "lf_strength",
                             "hf_strength", "noise", "fractions"},
                            "dataset block");
        cfg.dataset_kind = d.value("kind", std::string("synth"));
        if (cfg.dataset_kind != "synth" && cfg.dataset_kind != "cifar10")
            throw ConfigError("dataset.kind must be synth or cifar10");
        cfg.dataset_dir = d.value("dir", std::string());
        cfg.synth.classes = d.value("classes", std::size_t{3});
        cfg.synth.per_class = d.value("per_class", std::size_t{100});
        cfg.synth.side = d.value("side", std::size_t{16});
        cfg.synth.lf_strength = d.value("lf_strength", 1.0f);
        cfg.synth.hf_strength = d.value("hf_strength", 1.0f);
        cfg.synth.noise = d.value("noise", 0.02f);
        if (d.contains("fractions")) {
            const json& f = d.at("fractions");
            reject_unknown_keys(f, {"train", "calibration", "test"}, "dataset.fractions");
            cfg.frac_train = f.at("train").get<double>();
            cfg.frac_calibration = f.at("calibration").get<double>();
            cfg.frac_test = f.at("test").get<double>();
        }
    }

    if (j.contains("model")) {
        const json& m = j.at("model");
        reject_unknown_keys(m, {"path", "input_shape", "num_classes", "layers", "student_layers"},
                            "model block");
        cfg.model_path = m.value("path", std::string("model.advt"));
        if (m.contains("layers")) cfg.model = parse_model_spec(m, "layers");
        if (m.contains("student_layers")) {
            cfg.student = parse_model_spec(m, "student_layers");
            cfg.has_student = true;
        }
    }

    if (j.contains("train")) {
        const json& t = j.at("train");
        reject_unknown_keys(
            t, {"epochs", "batch_size", "learning_rate", "optimizer", "momentum", "adversarial"},
            "train block");
        cfg.train.epochs = t.value("epochs", std::size_t{10});
        cfg.train.batch_size = t.value("batch_size", std::size_t{32});
        cfg.train.learning_rate = t.value("learning_rate", 0.1f);
        std::string opt = t.value("optimizer", std::string("sgd"));
        if (opt == "sgd")
            cfg.train.optimizer = training::Optimizer::Sgd;
        else if (opt == "sgd-momentum")
            cfg.train.optimizer = training::Optimizer::SgdMomentum;
        else
            throw ConfigError("train.optimizer must be sgd or sgd-momentum");
        cfg.train.momentum = t.value("momentum", 0.9f);
        if (t.contains("adversarial")) {
            const json& a = t.at("adversarial");
            if (a.is_boolean()) {
                // true: adversarial mode using the global attack block
                cfg.train_adversarial = a.get<bool>();
            } else if (a.is_object()) {
                reject_unknown_keys(a, {"epsilon", "step_size", "max_steps"},
                                    "train.adversarial block");
                attacks::AttackConfig tc = attacks::AttackConfig::pgd(
                    a.value("epsilon", 8.0f / 255.0f), a.value("step_size", 2.0f / 255.0f),
                    a.value("max_steps", std::size_t{10}));
                cfg.train_adversarial = true;
                cfg.train.adversarial = tc;
            } else {
                throw ConfigError("train.adversarial must be a bool or an object");
            }
        }
    }

    if (j.contains("attack")) {
        const json& a = j.at("attack");
        reject_unknown_keys(a, {"kind", "kinds", "epsilon", "step_size", "max_steps", "overshoot"},
                            "attack block");
        cfg.attack.kind = parse_attack_kind(a.value("kind", std::string("pgd")));
        cfg.attack.epsilon = a.value("epsilon", 8.0f / 255.0f);
        cfg.attack.step_size = a.value("step_size", 2.0f / 255.0f);
        cfg.attack.max_steps =
            a.value("max_steps", cfg.attack.kind == attacks::AttackKind::Pgd ? std::size_t{20}
                                                                             : std::size_t{50});
        cfg.attack.overshoot = a.value("overshoot", 0.02f);
        if (a.contains("kinds")) {
            for (const auto& k : a.at("kinds"))
                cfg.attack_kinds.push_back(parse_attack_kind(k.get<std::string>()));
        }
    }
    if (cfg.attack_kinds.empty()) cfg.attack_kinds.push_back(cfg.attack.kind);

    if (j.contains("spectral")) {
        const json& s = j.at("spectral");
        reject_unknown_keys(s, {"only_correct"}, "spectral block");
        cfg.spectral_only_correct = s.value("only_correct", false);
    }

    if (j.contains("trust")) {
        reject_unknown_keys(j.at("trust"), {}, "trust block");
    }

    if (j.contains("distill")) {
        const json& d = j.at("distill");
        reject_unknown_keys(d,
                            {"temperature", "lambda", "budgets", "strategies", "epochs",
                             "batch_size", "learning_rate"},
                            "distill block");
        cfg.distill_cfg.temperature = d.value("temperature", 8.0);
        cfg.distill_cfg.lambda = d.value("lambda", 0.2);
        cfg.distill_cfg.epochs = d.value("epochs", std::size_t{30});
        cfg.distill_cfg.batch_size = d.value("batch_size", std::size_t{16});
        cfg.distill_cfg.learning_rate = d.value("learning_rate", 0.1f);
        if (d.contains("budgets")) {
            cfg.distill_budgets.clear();
            for (const auto& b : d.at("budgets")) cfg.distill_budgets.push_back(b.get<std::size_t>());
            if (cfg.distill_budgets.empty()) throw ConfigError("distill.budgets must be nonempty");
        }
        if (d.contains("strategies")) {
            cfg.distill_strategies.clear();
            for (const auto& s : d.at("strategies"))
                cfg.distill_strategies.push_back(distill::strategy_from_name(s.get<std::string>()));
            if (cfg.distill_strategies.empty())
                throw ConfigError("distill.strategies must be nonempty");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

namespace {

struct Pipeline {
    ExperimentConfig cfg;
    fs::path out_dir;
    std::size_t threads = 1;
    std::vector<std::string> outputs;

    explicit Pipeline(const ExperimentConfig& c, const RunOptions& opt) : cfg(c) {
        if (opt.seed_override) cfg.seed = *opt.seed_override;
        if (opt.out_override) cfg.output_dir = *opt.out_override;
        threads = std::max<std::size_t>(1, opt.threads);
        out_dir = cfg.output_dir;
        fs::create_directories(out_dir);
    }

    std::string path(const std::string& name) {
        outputs.push_back(name);
        return (out_dir / name).string();
    }

    data::Dataset load_dataset() const {
        if (cfg.dataset_kind == "cifar10") {
            if (cfg.dataset_dir.empty()) throw ConfigError("dataset.dir required for cifar10");
            return data::load_cifar10(cfg.dataset_dir);
        }
        data::SynthConfig s = cfg.synth;
        s.seed = cfg.seed;
        return data::synth_shapes(s);
    }

    data::SplitResult load_splits() const {
        return data::split(load_dataset(), cfg.frac_train, cfg.frac_calibration, cfg.frac_test,
                           cfg.seed + 1);
    }

    training::LoadedModel load_trained_model() const {
        if (!fs::exists(cfg.model_path))
            throw FileError("trained model not found at " + cfg.model_path);
        return training::load_model(cfg.model_path);
    }

    void write_manifest(const std::string& command) {
        ordered_json m;
        m["command"] = command;
        m["config_hash"] = cfg.config_hash;
        m["seed"] = cfg.seed;
        m["outputs"] = outputs;
        AtomicFileWriter w((out_dir / "manifest.json").string());
        w << m.dump(2) << "\n";
        w.commit();
    }
};

attacks::AttackConfig attack_for_kind(const ExperimentConfig& cfg, attacks::AttackKind kind) {
    attacks::AttackConfig a = cfg.attack;
    a.kind = kind;
    if (kind == attacks::AttackKind::DeepFool && cfg.attack.kind != attacks::AttackKind::DeepFool)
        a.max_steps = 50;
    return a;
}

void write_profiles_csv(Pipeline& pl, const std::string& name,
                        const std::vector<vulnerability::VulnerabilityProfile>& profiles,
                        const vulnerability::TrustPartition& partition) {
    AtomicFileWriter w(pl.path(name));
    w << "sample_id,class,d_f,censored,F,d_hat,F_hat,T,cluster";
    w.row_end();
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& p = profiles[i];
        w << std::to_string(p.sample_id) << "," << std::to_string(p.label) << ","
          << fmt_double(p.d_f) << "," << (p.censored ? "1" : "0") << ","
          << std::to_string(p.flip_freq) << "," << fmt_double(p.d_hat) << ","
          << fmt_double(p.f_hat) << "," << fmt_double(p.trust) << ","
          << (partition.assignment[i] == vulnerability::Cluster::Trust ? "trust" : "non_trust");
        w.row_end();
    }
    w.commit();
}

}  // namespace

void cmd_train(const ExperimentConfig& cfg0, const RunOptions& opt, bool adversarial) {
    Pipeline pl(cfg0, opt);
    if (pl.cfg.model.layers.empty()) throw ConfigError("train requires model.layers");
    data::SplitResult splits = pl.load_splits();
    if (splits.train.samples.empty()) throw PreconditionError("train split is empty");

    training::TrainConfig tc = pl.cfg.train;
    tc.seed = pl.cfg.seed + 2;
    bool adv = adversarial || pl.cfg.train_adversarial;
    if (adv && !tc.adversarial) tc.adversarial = pl.cfg.attack;

    training::TrainResult r = adv ? training::adversarial_train(pl.cfg.model, splits.train, tc)
                                  : training::train(pl.cfg.model, splits.train, tc);

    training::save_model(pl.cfg.model, r.params, pl.cfg.model_path);

    {
        AtomicFileWriter w(pl.path("dataset_manifest.json"));
        w << data::manifest_json(splits.train);
        w.commit();
    }

    AtomicFileWriter w(pl.path("training_log.csv"));
    w << "epoch,train_loss,train_acc,adversarial";
    w.row_end();
    for (const auto& e : r.log) {
        w << std::to_string(e.epoch) << "," << fmt_double(e.train_loss) << ","
          << fmt_double(e.train_acc) << "," << (e.adversarial ? "1" : "0");
        w.row_end();
    }
    w.commit();
    pl.write_manifest(adv ? "adv-train" : "train");
}

void cmd_ddb_vs_steps(const ExperimentConfig& cfg0, const RunOptions& opt) {
    Pipeline pl(cfg0, opt);
    training::LoadedModel m = pl.load_trained_model();
    data::SplitResult splits = pl.load_splits();
    if (splits.test.samples.empty()) throw PreconditionError("test split is empty");

    AtomicFileWriter summary(pl.path("ddb_vs_steps_summary.csv"));
    summary << "attack_kind,spearman_rho,n_samples";
    summary.row_end();
    for (attacks::AttackKind kind : pl.cfg.attack_kinds) {
        attacks::AttackConfig acfg = attack_for_kind(pl.cfg, kind);
        attacks::StepsProfile prof =
            attacks::steps_profile(m.spec, m.params, splits.test, acfg, pl.threads);
        AtomicFileWriter w(
            pl.path(std::string("ddb_vs_steps_") + attacks::attack_kind_name(kind) + ".csv"));
        w << "sample_id,class,d_f,censored,steps,success,attack_kind";
        w.row_end();
        for (const auto& row : prof.rows) {
            w << std::to_string(row.sample_id) << "," << std::to_string(row.label) << ","
              << fmt_double(row.d_f) << "," << (row.censored ? "1" : "0") << ","
              << std::to_string(row.steps) << "," << (row.success ? "1" : "0") << ","
              << attacks::attack_kind_name(kind);
            w.row_end();
        }
        w.commit();
        summary << attacks::attack_kind_name(kind) << "," << fmt_double(prof.rank_correlation)
                << "," << std::to_string(prof.rows.size());
        summary.row_end();
    }
    summary.commit();
    pl.write_manifest("ddb-vs-steps");
}

void cmd_band_sweep(const ExperimentConfig& cfg0, const RunOptions& opt) {
    Pipeline pl(cfg0, opt);
    training::LoadedModel m = pl.load_trained_model();
    data::SplitResult splits = pl.load_splits();
    if (splits.test.samples.empty()) throw PreconditionError("test split is empty");

    auto series = spectral::band_sweep_accuracy(m.spec, m.params, splits.test, pl.threads);
    AtomicFileWriter w(pl.path("band_sweep.csv"));
    w << "band_index,cumulative_direction,accuracy,n_samples";
    w.row_end();
    for (const auto& pt : series) {
        w << std::to_string(pt.band) << ",high_to_low," << fmt_double(pt.accuracy) << ","
          << std::to_string(pt.n);
        w.row_end();
    }
    w.commit();

    // per-class average flipping frequency (the band each class's predictions
    // demonstrably need)
    AtomicFileWriter hf(pl.path("hf_band_requirement.csv"));
    hf << "class,avg_hf_band_req,n_samples";
    hf.row_end();
    for (std::size_t c = 0; c < splits.test.num_classes; ++c) {
        data::Dataset sub;
        sub.num_classes = splits.test.num_classes;
        for (std::size_t id : splits.test.per_class[c]) sub.samples.push_back(splits.test.samples[id]);
        if (sub.samples.empty()) continue;
        sub.rebuild_index();
        double avg = spectral::avg_hf_band_requirement(m.spec, m.params, sub,
                                                       pl.cfg.spectral_only_correct, pl.threads);
        hf << std::to_string(c) << "," << fmt_double(avg) << "," << std::to_string(sub.size());
        hf.row_end();
    }
    hf.commit();
    pl.write_manifest("band-sweep");
}

void cmd_score(const ExperimentConfig& cfg0, const RunOptions& opt) {
    Pipeline pl(cfg0, opt);
    training::LoadedModel m = pl.load_trained_model();
    data::SplitResult splits = pl.load_splits();
    if (splits.calibration.samples.empty()) throw PreconditionError("calibration split is empty");
    if (splits.test.samples.empty()) throw PreconditionError("test split is empty");

    // fit the normalization on the calibration split and freeze it
    auto calib = vulnerability::profile_dataset(m.spec, m.params, splits.calibration, pl.cfg.attack,
                                                nullptr, pl.threads);
    vulnerability::NormalizationStats stats = vulnerability::fit_normalization(calib);
    {
        AtomicFileWriter w(pl.path("normalization_stats.json"));
        w << vulnerability::stats_to_json(stats);
        w.commit();
    }

    auto profiles = vulnerability::profile_dataset(m.spec, m.params, splits.test, pl.cfg.attack,
                                                   &stats, pl.threads);

    std::vector<std::size_t> predictions(profiles.size()), labels(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        predictions[i] = profiles[i].predicted;
        labels[i] = profiles[i].label;
    }

    // Table-2 protocol: cluster each 1-D score on its own and flag with it
    struct MetricRun {
        const char* name;
        std::vector<double> scores;
    };
    std::vector<MetricRun> metrics{{"d_hat", {}}, {"f_hat", {}}, {"T", {}}};
    for (const auto& p : profiles) {
        metrics[0].scores.push_back(p.d_hat);
        metrics[1].scores.push_back(p.f_hat);
        metrics[2].scores.push_back(p.trust);
    }

    vulnerability::TrustPartition trust_partition;
    AtomicFileWriter fw(pl.path("flagging_accuracy.csv"));
    fw << "score,status,flagging_accuracy,n_non_trust,centroid_non_trust,centroid_trust";
    fw.row_end();
    for (auto& mrun : metrics) {
        // a factor that is constant on this split cannot be clustered; the row
        // records that instead of zeroing the metric. T itself must partition.
        try {
            vulnerability::TrustPartition part = vulnerability::kmeans2(mrun.scores);
            double acc = vulnerability::flagging_accuracy(part, predictions, labels);
            std::size_t flagged = 0;
            for (auto c : part.assignment)
                if (c == vulnerability::Cluster::NonTrust) ++flagged;
            fw << mrun.name << ",ok," << fmt_double(acc) << "," << std::to_string(flagged) << ","
               << fmt_double(part.centroid_non_trust) << "," << fmt_double(part.centroid_trust);
            fw.row_end();
            if (std::string(mrun.name) == "T") trust_partition = std::move(part);
        } catch (const DegeneratePartitionError&) {
            if (std::string(mrun.name) == "T") throw;
            fw << mrun.name << ",degenerate,,,,";
            fw.row_end();
        } catch (const UndefinedMetricError&) {
            fw << mrun.name << ",undefined,,,,";
            fw.row_end();
        }
    }
    fw.commit();

    write_profiles_csv(pl, "profiles.csv", profiles, trust_partition);
    pl.write_manifest("score");
}

void cmd_distill(const ExperimentConfig& cfg0, const RunOptions& opt) {
    Pipeline pl(cfg0, opt);
    training::LoadedModel teacher = pl.load_trained_model();
    data::SplitResult splits = pl.load_splits();
    if (splits.train.samples.empty()) throw PreconditionError("train split is empty");
    if (splits.test.samples.empty()) throw PreconditionError("test split is empty");
    if (!pl.cfg.has_student) throw ConfigError("distill requires model.student_layers");

    // rank the training pool by trust w.r.t. the teacher; normalization is fit
    // on the same pool (Eq. 1/2 are dataset-relative there)
    auto pool = vulnerability::profile_dataset(teacher.spec, teacher.params, splits.train,
                                               pl.cfg.attack, nullptr, pl.threads);
    vulnerability::NormalizationStats stats = vulnerability::fit_normalization(pool);
    vulnerability::apply_normalization(pool, stats);

    AtomicFileWriter cmp(pl.path("distill_comparison.csv"));
    cmp << "strategy,budget,student_acc,final_kd_loss,final_ce_loss";
    cmp.row_end();
    for (distill::Strategy strat : pl.cfg.distill_strategies) {
        for (std::size_t budget : pl.cfg.distill_budgets) {
            distill::DistillConfig dc = pl.cfg.distill_cfg;
            dc.strategy = strat;
            dc.budget = budget;
            dc.seed = pl.cfg.seed + 3;  // same student init across strategies
            distill::DistillResult r = distill::distill(teacher.spec, teacher.params, pl.cfg.student,
                                                        splits.train, pool, splits.test, dc);
            std::string tag =
                std::string(distill::strategy_name(strat)) + "_b" + std::to_string(budget);
            {
                ordered_json tj;
                tj["strategy"] = distill::strategy_name(strat);
                tj["budget"] = budget;
                tj["ids"] = r.transfer.ids;
                AtomicFileWriter w(pl.path("transfer_" + tag + ".json"));
                w << tj.dump(2) << "\n";
                w.commit();
            }
            {
                AtomicFileWriter w(pl.path("distill_log_" + tag + ".csv"));
                w << "epoch,kd_loss,ce_loss,total,val_acc";
                w.row_end();
                for (const auto& e : r.log) {
                    w << std::to_string(e.epoch) << "," << fmt_double(e.kd_loss) << ","
                      << fmt_double(e.ce_loss) << "," << fmt_double(e.total) << ","
                      << fmt_double(e.val_acc);
                    w.row_end();
                }
                w.commit();
            }
            training::save_model(pl.cfg.student, r.student_params,
                                 (pl.out_dir / ("student_" + tag + ".advt")).string());
            pl.outputs.push_back("student_" + tag + ".advt");
            const auto& last = r.log.back();
            cmp << distill::strategy_name(strat) << "," << std::to_string(budget) << ","
                << fmt_double(last.val_acc) << "," << fmt_double(last.kd_loss) << ","
                << fmt_double(last.ce_loss);
            cmp.row_end();
        }
    }
    cmp.commit();
    pl.write_manifest("distill");
}

int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt) {
    try {
        ExperimentConfig cfg = load_config(config_path);
        if (command == "train")
            cmd_train(cfg, opt, false);
        else if (command == "adv-train")
            cmd_train(cfg, opt, true);
        else if (command == "ddb-vs-steps")
            cmd_ddb_vs_steps(cfg, opt);
        else if (command == "band-sweep")
            cmd_band_sweep(cfg, opt);
        else if (command == "score")
            cmd_score(cfg, opt);
        else if (command == "distill")
            cmd_distill(cfg, opt);
        else
            throw ConfigError("unknown command '" + command + "'");
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace advtrust::cli
