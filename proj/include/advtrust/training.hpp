#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advtrust/attacks.hpp"
#include "advtrust/data.hpp"
#include "advtrust/nn.hpp"

namespace advtrust::training {

enum class Optimizer { Sgd, SgdMomentum };

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    float learning_rate = 0.1f;
    Optimizer optimizer = Optimizer::Sgd;
    float momentum = 0.9f;
    std::uint64_t seed = 0;
    std::optional<attacks::AttackConfig> adversarial;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;       // 1-based
    double train_loss = 0.0;     // mean loss over all samples seen this epoch
    double train_acc = 0.0;      // clean accuracy after the epoch
    std::size_t samples_seen = 0;
    bool adversarial = false;
};

struct TrainResult {
    nn::Parameters params;
    std::vector<EpochStats> log;
};

/// Minimizes cross entropy with (momentum-)SGD. Reproducible from the seed.
TrainResult train(const nn::ModelSpec& spec, const data::Dataset& ds, const TrainConfig& cfg);

/// PGD adversarial training: every step consumes the clean batch plus its
/// adversarial counterparts regenerated from the current weights, both with
/// the original labels. cfg.adversarial must be set; epsilon = 0 degenerates
/// to doubling each batch with clean copies.
TrainResult adversarial_train(const nn::ModelSpec& spec, const data::Dataset& ds,
                              const TrainConfig& cfg);

/// Continues training from existing parameters (distillation reuses this).
TrainResult train_from(const nn::ModelSpec& spec, nn::Parameters params, const data::Dataset& ds,
                       const TrainConfig& cfg);

double accuracy(const nn::ModelSpec& spec, const nn::Parameters& params, const data::Dataset& ds);

/// Model file: magic "ADVT", u32 version, spec descriptors, little-endian f32
/// parameter payload, trailing CRC-32.
void save_model(const nn::ModelSpec& spec, const nn::Parameters& params, const std::string& path);

struct LoadedModel {
    nn::ModelSpec spec;
    nn::Parameters params;
};

LoadedModel load_model(const std::string& path);

void save_model_bytes(const nn::ModelSpec& spec, const nn::Parameters& params,
                      std::vector<std::uint8_t>& out);
LoadedModel load_model_bytes(const std::vector<std::uint8_t>& bytes);

}  // namespace advtrust::training
