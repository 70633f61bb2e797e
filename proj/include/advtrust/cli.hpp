#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advtrust/attacks.hpp"
#include "advtrust/data.hpp"
#include "advtrust/distill.hpp"
#include "advtrust/nn.hpp"
#include "advtrust/training.hpp"

namespace advtrust::cli {

/// One JSON document driving a whole experiment. Unknown keys are rejected;
/// block contents are validated by their owning modules.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::string output_dir = "out";

    // dataset block
    std::string dataset_kind = "synth";  // synth | cifar10
    std::string dataset_dir;
    data::SynthConfig synth;
    double frac_train = 0.7, frac_calibration = 0.15, frac_test = 0.15;

    // model block
    std::string model_path = "model.advt";
    nn::ModelSpec model;
    nn::ModelSpec student;           // distill only
    bool has_student = false;

    // train block
    training::TrainConfig train;
    bool train_adversarial = false;

    // attack block
    attacks::AttackConfig attack;
    std::vector<attacks::AttackKind> attack_kinds;  // ddb-vs-steps report list

    // spectral block
    bool spectral_only_correct = false;

    // distill block
    distill::DistillConfig distill_cfg;
    std::vector<std::size_t> distill_budgets{10};
    std::vector<distill::Strategy> distill_strategies{
        distill::Strategy::Random, distill::Strategy::ClosestDdb, distill::Strategy::TrustTopK};

    std::string config_hash;  // FNV-1a over the canonical config dump
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct RunOptions {
    std::size_t threads = 1;
    std::optional<std::string> out_override;
    std::optional<std::uint64_t> seed_override;  // ADVTRUST_SEED
};

void cmd_train(const ExperimentConfig& cfg, const RunOptions& opt, bool adversarial);
void cmd_ddb_vs_steps(const ExperimentConfig& cfg, const RunOptions& opt);
void cmd_band_sweep(const ExperimentConfig& cfg, const RunOptions& opt);
void cmd_score(const ExperimentConfig& cfg, const RunOptions& opt);
void cmd_distill(const ExperimentConfig& cfg, const RunOptions& opt);

/// Dispatches a subcommand name; returns the process exit code
/// (0 success, 2 config error, 3 runtime error).
int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt);

}  // namespace advtrust::cli
