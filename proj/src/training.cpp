#include "advtrust/training.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "advtrust/rng.hpp"

namespace advtrust::training {

void TrainConfig::validate() const {
    if (epochs < 1) throw PreconditionError("epochs must be >= 1");
    if (batch_size < 1) throw PreconditionError("batch_size must be >= 1");
    if (learning_rate <= 0.0f) throw PreconditionError("learning_rate must be positive");
    if (momentum < 0.0f || momentum >= 1.0f) throw PreconditionError("momentum must be in [0,1)");
    if (adversarial && adversarial->epsilon != 0.0f) adversarial->validate();
}

double accuracy(const nn::ModelSpec& spec, const nn::Parameters& params, const data::Dataset& ds) {
    if (ds.samples.empty()) throw PreconditionError("accuracy: empty dataset");
    std::size_t hits = 0;
    for (const auto& s : ds.samples)
        if (nn::predict(spec, params, s.image) == s.label) ++hits;
    return static_cast<double>(hits) / static_cast<double>(ds.size());
}

namespace {

struct BatchSample {
    const Tensor* image;
    Tensor owned;  // holds adversarial copies
    std::size_t label;
    const Tensor& img() const { return image ? *image : owned; }
};

void apply_update(nn::Parameters& params, nn::Parameters& velocity, const nn::Parameters& grads,
                  const TrainConfig& cfg) {
    for (auto& [idx, lp] : params.by_layer) {
        const nn::LayerParams& g = grads.by_layer.at(idx);
        nn::LayerParams& v = velocity.by_layer.at(idx);
        auto step = [&](Tensor& theta, Tensor& vel, const Tensor& grad) {
            for (std::size_t i = 0; i < theta.numel(); ++i) {
                float gi = grad.data[i];
                if (cfg.optimizer == Optimizer::SgdMomentum) {
                    vel.data[i] = cfg.momentum * vel.data[i] + gi;
                    gi = vel.data[i];
                }
                theta.data[i] -= cfg.learning_rate * gi;
            }
        };
        step(lp.weight, v.weight, g.weight);
        step(lp.bias, v.bias, g.bias);
    }
}

TrainResult run_training(const nn::ModelSpec& spec, nn::Parameters params, const data::Dataset& ds,
                         const TrainConfig& cfg, bool adversarial_mode) {
    cfg.validate();
    if (ds.samples.empty()) throw PreconditionError("train: empty dataset");
    for (const auto& s : ds.samples)
        if (s.label >= spec.num_classes)
            throw LabelError("dataset label " + std::to_string(s.label) + " >= num_classes");
    if (adversarial_mode && !cfg.adversarial)
        throw ConfigError("adversarial_train requires cfg.adversarial");
    if (adversarial_mode && cfg.adversarial->kind != attacks::AttackKind::Pgd)
        throw ConfigError("adversarial training uses the PGD attack");

    nn::Parameters velocity = nn::zero_parameters(spec);
    Rng shuffle_rng(cfg.seed ^ 0x5deece66dULL);

    TrainResult out;
    out.params = std::move(params);
    std::vector<std::size_t> order(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t end = std::min(order.size(), start + cfg.batch_size);
            std::vector<BatchSample> batch;
            batch.reserve((end - start) * (adversarial_mode ? 2 : 1));
            for (std::size_t i = start; i < end; ++i) {
                const data::Sample& s = ds.samples[order[i]];
                batch.push_back({&s.image, {}, s.label});
            }
            if (adversarial_mode) {
                const attacks::AttackConfig& acfg = *cfg.adversarial;
                for (std::size_t i = start; i < end; ++i) {
                    const data::Sample& s = ds.samples[order[i]];
                    BatchSample adv{nullptr, {}, s.label};
                    if (acfg.epsilon == 0.0f) {
                        adv.owned = s.image;  // zero budget: clean copy
                    } else {
                        try {
                            adv.owned = attacks::pgd_attack(spec, out.params, s.image, s.label, acfg)
                                            .adversarial;
                        } catch (const NumericError& e) {
                            throw TrainingDivergedError(e.what(), epoch);
                        }
                    }
                    batch.push_back(std::move(adv));
                }
            }
            nn::Parameters grads = nn::zero_parameters(spec);
            for (const BatchSample& bs : batch) {
                nn::Gradients g;
                try {
                    g = nn::backward(spec, out.params, bs.img(), bs.label);
                } catch (const NumericError& e) {
                    throw TrainingDivergedError(e.what(), epoch);
                }
                loss_sum += g.loss;
                for (auto& [idx, lp] : grads.by_layer) {
                    const nn::LayerParams& src = g.params.by_layer.at(idx);
                    for (std::size_t j = 0; j < lp.weight.numel(); ++j)
                        lp.weight.data[j] += src.weight.data[j];
                    for (std::size_t j = 0; j < lp.bias.numel(); ++j)
                        lp.bias.data[j] += src.bias.data[j];
                }
            }
            float inv = 1.0f / static_cast<float>(batch.size());
            for (auto& [idx, lp] : grads.by_layer) {
                for (float& v : lp.weight.data) v *= inv;
                for (float& v : lp.bias.data) v *= inv;
            }
            apply_update(out.params, velocity, grads, cfg);
            seen += batch.size();
        }
        double mean_loss = loss_sum / static_cast<double>(seen);
        if (!std::isfinite(mean_loss))
            throw TrainingDivergedError("mean train loss is non-finite", epoch);
        EpochStats st;
        st.epoch = epoch;
        st.train_loss = mean_loss;
        st.train_acc = accuracy(spec, out.params, ds);
        st.samples_seen = seen;
        st.adversarial = adversarial_mode;
        out.log.push_back(st);
    }
    return out;
}

}  // namespace

TrainResult train(const nn::ModelSpec& spec, const data::Dataset& ds, const TrainConfig& cfg) {
    return run_training(spec, nn::init_parameters(spec, cfg.seed), ds, cfg, false);
}

TrainResult adversarial_train(const nn::ModelSpec& spec, const data::Dataset& ds,
                              const TrainConfig& cfg) {
    return run_training(spec, nn::init_parameters(spec, cfg.seed), ds, cfg, true);
}

TrainResult train_from(const nn::ModelSpec& spec, nn::Parameters params, const data::Dataset& ds,
                       const TrainConfig& cfg) {
    return run_training(spec, std::move(params), ds, cfg, false);
}

// ---------------------------------------------------------------------------
// model persistence

namespace {

constexpr char kMagic[4] = {'A', 'D', 'V', 'T'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t crc32(const std::uint8_t* data, std::size_t n) {
    static std::uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            table[i] = c;
        }
        init = true;
    }
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i) c = table[(c ^ data[i]) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t& off) {
    if (off + 4 > b.size()) throw FormatError("truncated field", off);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
    off += 4;
    return v;
}

void put_tensor(std::vector<std::uint8_t>& out, const Tensor& t) {
    out.push_back(static_cast<std::uint8_t>(t.rank()));
    for (std::size_t e : t.shape) put_u32(out, static_cast<std::uint32_t>(e));
    for (float v : t.data) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(out, bits);
    }
}

Tensor get_tensor(const std::vector<std::uint8_t>& b, std::size_t& off) {
    if (off >= b.size()) throw FormatError("truncated tensor header", off);
    std::uint8_t rank = b[off++];
    if (rank == 0) throw FormatError("rank-0 parameter tensor", off - 1);
    std::vector<std::size_t> shape(rank);
    for (std::size_t i = 0; i < rank; ++i) shape[i] = get_u32(b, off);
    std::size_t n = Tensor::numel_of(shape);
    Tensor t(shape);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = get_u32(b, off);
        std::memcpy(&t.data[i], &bits, 4);
    }
    return t;
}

}  // namespace

void save_model_bytes(const nn::ModelSpec& spec, const nn::Parameters& params,
                      std::vector<std::uint8_t>& out) {
    nn::validate_spec(spec);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kVersion);
    for (std::size_t e : spec.input_shape) put_u32(out, static_cast<std::uint32_t>(e));
    put_u32(out, static_cast<std::uint32_t>(spec.num_classes));
    put_u32(out, static_cast<std::uint32_t>(spec.layers.size()));
    for (const auto& L : spec.layers) {
        out.push_back(static_cast<std::uint8_t>(L.kind));
        switch (L.kind) {
            case nn::LayerKind::Dense:
                put_u32(out, static_cast<std::uint32_t>(L.in));
                put_u32(out, static_cast<std::uint32_t>(L.out));
                break;
            case nn::LayerKind::Conv2d:
                put_u32(out, static_cast<std::uint32_t>(L.in_ch));
                put_u32(out, static_cast<std::uint32_t>(L.out_ch));
                put_u32(out, static_cast<std::uint32_t>(L.kernel));
                put_u32(out, static_cast<std::uint32_t>(L.stride));
                put_u32(out, static_cast<std::uint32_t>(L.pad));
                break;
            case nn::LayerKind::MaxPool2d:
                put_u32(out, static_cast<std::uint32_t>(L.pool));
                break;
            default:
                break;
        }
    }
    put_u32(out, static_cast<std::uint32_t>(params.by_layer.size()));
    for (const auto& [idx, lp] : params.by_layer) {
        put_u32(out, static_cast<std::uint32_t>(idx));
        put_tensor(out, lp.weight);
        put_tensor(out, lp.bias);
    }
    put_u32(out, crc32(out.data(), out.size()));
}

LoadedModel load_model_bytes(const std::vector<std::uint8_t>& b) {
    if (b.size() < 12) throw FormatError("file shorter than header", b.size());
    if (std::memcmp(b.data(), kMagic, 4) != 0) throw FormatError("bad magic", 0);
    std::size_t off = 4;
    std::uint32_t version = get_u32(b, off);
    if (version != kVersion)
        throw VersionError("model format version " + std::to_string(version) + ", expected " +
                           std::to_string(kVersion));
    std::uint32_t stored_crc = 0;
    {
        std::size_t tail = b.size() - 4;
        stored_crc = get_u32(b, tail);
    }
    if (crc32(b.data(), b.size() - 4) != stored_crc)
        throw FormatError("checksum mismatch", b.size() - 4);
    LoadedModel m;
    for (std::size_t i = 0; i < 3; ++i) m.spec.input_shape[i] = get_u32(b, off);
    m.spec.num_classes = get_u32(b, off);
    std::uint32_t n_layers = get_u32(b, off);
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        if (off >= b.size()) throw FormatError("truncated layer list", off);
        auto kind = static_cast<nn::LayerKind>(b[off++]);
        nn::LayerDesc L;
        L.kind = kind;
        switch (kind) {
            case nn::LayerKind::Dense:
                L.in = get_u32(b, off);
                L.out = get_u32(b, off);
                break;
            case nn::LayerKind::Conv2d:
                L.in_ch = get_u32(b, off);
                L.out_ch = get_u32(b, off);
                L.kernel = get_u32(b, off);
                L.stride = get_u32(b, off);
                L.pad = get_u32(b, off);
                break;
            case nn::LayerKind::MaxPool2d:
                L.pool = get_u32(b, off);
                break;
            case nn::LayerKind::Relu:
            case nn::LayerKind::Flatten:
                break;
            default:
                throw FormatError("unknown layer kind " + std::to_string(b[off - 1]), off - 1);
        }
        m.spec.layers.push_back(L);
    }
    std::uint32_t n_entries = get_u32(b, off);
    for (std::uint32_t i = 0; i < n_entries; ++i) {
        std::uint32_t idx = get_u32(b, off);
        nn::LayerParams lp;
        lp.weight = get_tensor(b, off);
        lp.bias = get_tensor(b, off);
        m.params.by_layer[idx] = std::move(lp);
    }
    if (off != b.size() - 4) throw FormatError("trailing bytes before checksum", off);
    nn::validate_spec(m.spec);
    return m;
}

void save_model(const nn::ModelSpec& spec, const nn::Parameters& params, const std::string& path) {
    std::vector<std::uint8_t> bytes;
    save_model_bytes(spec, params, bytes);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FileError("cannot write " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

LoadedModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FileError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return load_model_bytes(bytes);
}

}  // namespace advtrust::training
