#include "advtrust/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "advtrust/rng.hpp"

namespace advtrust::data {

namespace fs = std::filesystem;

const char* split_tag_name(SplitTag t) {
    switch (t) {
        case SplitTag::Train: return "train";
        case SplitTag::Calibration: return "calibration";
        case SplitTag::Test: return "test";
    }
    return "?";
}

void Dataset::rebuild_index() {
    per_class.assign(num_classes, {});
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].label >= num_classes)
            throw LabelError("sample " + std::to_string(i) + " has label " +
                             std::to_string(samples[i].label) + " >= " +
                             std::to_string(num_classes));
        per_class[samples[i].label].push_back(i);
    }
}

namespace {

constexpr std::size_t kCifarRecord = 3073;
constexpr std::size_t kCifarPixels = 3072;

void parse_cifar_file(const std::string& path, Dataset& ds) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FileError("cannot open " + path);
    f.seekg(0, std::ios::end);
    std::size_t size = static_cast<std::size_t>(f.tellg());
    f.seekg(0);
    if (size == 0 || size % kCifarRecord != 0)
        throw FormatError(path + ": size " + std::to_string(size) +
                              " is not a multiple of the 3073-byte record",
                          size - size % kCifarRecord);
    std::size_t records = size / kCifarRecord;
    std::vector<std::uint8_t> rec(kCifarRecord);
    for (std::size_t r = 0; r < records; ++r) {
        if (!f.read(reinterpret_cast<char*>(rec.data()), kCifarRecord))
            throw FormatError(path + ": truncated record " + std::to_string(r), r * kCifarRecord);
        if (rec[0] >= 10)
            throw FormatError(path + ": record " + std::to_string(r) + " has label byte " +
                                  std::to_string(rec[0]),
                              r * kCifarRecord);
        Sample s;
        s.label = rec[0];
        s.image = Tensor({3, 32, 32});
        for (std::size_t i = 0; i < kCifarPixels; ++i)
            s.image.data[i] = static_cast<float>(rec[1 + i]) / 255.0f;
        ds.samples.push_back(std::move(s));
    }
}

}  // namespace

Dataset load_cifar10(const std::string& dir) {
    if (!fs::is_directory(dir)) throw FileError(dir + " is not a directory");
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".bin")
            files.push_back(e.path().string());
    if (files.empty()) throw FileError("no .bin batch files in " + dir);
    std::sort(files.begin(), files.end());
    Dataset ds;
    ds.num_classes = 10;
    for (const auto& f : files) parse_cifar_file(f, ds);
    ds.rebuild_index();
    return ds;
}

Dataset synth_shapes(const SynthConfig& cfg) {
    if (cfg.classes < 2) throw PreconditionError("synth_shapes needs at least 2 classes");
    if (cfg.side < 8) throw PreconditionError("synth_shapes needs side >= 8");
    if (cfg.per_class == 0) throw PreconditionError("synth_shapes needs per_class >= 1");
    Dataset ds;
    ds.num_classes = cfg.classes;
    Rng rng(cfg.seed);
    const double S = static_cast<double>(cfg.side);
    const double sigma = S / 4.0;
    for (std::size_t c = 0; c < cfg.classes; ++c) {
        // class separation in the base intensity scales with the LF cue, so
        // lf_strength = 0 leaves only the checkerboard phase to discriminate
        double spread = static_cast<double>(c) / static_cast<double>(cfg.classes - 1) - 0.5;
        double base = 0.5 + 0.5 * cfg.lf_strength * spread;
        double ang = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(cfg.classes);
        double bx = S / 2.0 + (S / 4.0) * std::cos(ang);
        double by = S / 2.0 + (S / 4.0) * std::sin(ang);
        // per-class Nyquist-rate pattern: checkerboard or single-axis stripes
        std::size_t hf_kind = c % 3;
        for (std::size_t n = 0; n < cfg.per_class; ++n) {
            Sample s;
            s.label = c;
            s.image = Tensor({1, cfg.side, cfg.side});
            double jx = bx + rng.uniform(-1.0f, 1.0f);
            double jy = by + rng.uniform(-1.0f, 1.0f);
            for (std::size_t y = 0; y < cfg.side; ++y) {
                for (std::size_t x = 0; x < cfg.side; ++x) {
                    double d2 = (x - jx) * (x - jx) + (y - jy) * (y - jy);
                    double blob = 0.2 * cfg.lf_strength * std::exp(-d2 / (2.0 * sigma * sigma));
                    std::size_t stripe = hf_kind == 0 ? (x + y) : (hf_kind == 1 ? x : y);
                    double checker = 0.1 * cfg.hf_strength * (stripe % 2 == 0 ? 1.0 : -1.0);
                    double v = base + blob + checker + cfg.noise * rng.uniform(-1.0f, 1.0f);
                    s.image.data[y * cfg.side + x] =
                        static_cast<float>(std::clamp(v, 0.0, 1.0));
                }
            }
            ds.samples.push_back(std::move(s));
        }
    }
    ds.rebuild_index();
    return ds;
}

Dataset synth_shapes(std::size_t classes, std::size_t per_class, std::size_t side,
                     std::uint64_t seed) {
    SynthConfig cfg;
    cfg.classes = classes;
    cfg.per_class = per_class;
    cfg.side = side;
    cfg.seed = seed;
    return synth_shapes(cfg);
}

SplitResult split(const Dataset& ds, double train_frac, double calibration_frac, double test_frac,
                  std::uint64_t seed) {
    if (train_frac <= 0 || calibration_frac <= 0 || test_frac <= 0)
        throw PreconditionError("split fractions must be positive");
    if (std::fabs(train_frac + calibration_frac + test_frac - 1.0) > 1e-9)
        throw PreconditionError("split fractions must sum to 1");
    const double fracs[3] = {train_frac, calibration_frac, test_frac};
    SplitResult out;
    Dataset* parts[3] = {&out.train, &out.calibration, &out.test};
    out.train.tag = SplitTag::Train;
    out.calibration.tag = SplitTag::Calibration;
    out.test.tag = SplitTag::Test;
    for (Dataset* p : parts) p->num_classes = ds.num_classes;

    Rng rng(seed);
    for (std::size_t c = 0; c < ds.num_classes; ++c) {
        std::vector<std::size_t> ids = ds.per_class[c];
        rng.shuffle(ids);
        std::size_t n = ids.size();
        std::size_t counts[3];
        double rem[3];
        std::size_t assigned = 0;
        for (int j = 0; j < 3; ++j) {
            double exact = fracs[j] * static_cast<double>(n);
            counts[j] = static_cast<std::size_t>(exact);
            rem[j] = exact - static_cast<double>(counts[j]);
            assigned += counts[j];
        }
        // distribute leftovers by largest fractional remainder
        while (assigned < n) {
            int best = 0;
            for (int j = 1; j < 3; ++j)
                if (rem[j] > rem[best]) best = j;
            counts[best]++;
            rem[best] = -1.0;
            assigned++;
        }
        std::size_t pos = 0;
        for (int j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < counts[j]; ++k)
                parts[j]->samples.push_back(ds.samples[ids[pos++]]);
    }
    for (Dataset* p : parts) p->rebuild_index();
    return out;
}

namespace {

constexpr char kMagic[4] = {'A', 'T', 'N', 'S'};
constexpr std::uint8_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t& off) {
    if (off + 4 > b.size()) throw FormatError("truncated u32", off);
    std::uint32_t v = static_cast<std::uint32_t>(b[off]) |
                      (static_cast<std::uint32_t>(b[off + 1]) << 8) |
                      (static_cast<std::uint32_t>(b[off + 2]) << 16) |
                      (static_cast<std::uint32_t>(b[off + 3]) << 24);
    off += 4;
    return v;
}

}  // namespace

void save_tensor_bytes(const Tensor& t, std::vector<std::uint8_t>& out) {
    if (t.rank() == 0) throw FormatError("rank-0 tensor not representable", 0);
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(t.rank()));
    for (std::size_t e : t.shape) put_u32(out, static_cast<std::uint32_t>(e));
    for (float v : t.data) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(out, bits);
    }
}

Tensor load_tensor_bytes(const std::vector<std::uint8_t>& b) {
    std::size_t off = 0;
    if (b.size() < 6) throw FormatError("file shorter than header", b.size());
    if (std::memcmp(b.data(), kMagic, 4) != 0) throw FormatError("bad magic", 0);
    off = 4;
    if (b[off] != kVersion)
        throw VersionError("tensor format version " + std::to_string(b[off]) + ", expected " +
                           std::to_string(kVersion));
    ++off;
    std::uint8_t rank = b[off++];
    if (rank == 0) throw FormatError("rank-0 tensor", off - 1);
    std::vector<std::size_t> shape(rank);
    for (std::size_t i = 0; i < rank; ++i) shape[i] = get_u32(b, off);
    std::size_t n = Tensor::numel_of(shape);
    if (off + 4 * n > b.size())
        throw FormatError("payload shorter than extents imply", b.size());
    Tensor t(shape);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = get_u32(b, off);
        std::memcpy(&t.data[i], &bits, 4);
    }
    return t;
}

void save_tensor(const Tensor& t, const std::string& path) {
    std::vector<std::uint8_t> bytes;
    save_tensor_bytes(t, bytes);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FileError("cannot write " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Tensor load_tensor(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FileError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return load_tensor_bytes(bytes);
}

std::string manifest_json(const Dataset& ds) {
    nlohmann::ordered_json j;
    j["split"] = split_tag_name(ds.tag);
    j["num_classes"] = ds.num_classes;
    j["n_samples"] = ds.size();
    std::vector<std::size_t> counts;
    for (const auto& cls : ds.per_class) counts.push_back(cls.size());
    j["per_class_counts"] = counts;
    if (!ds.samples.empty()) j["image_shape"] = ds.samples[0].image.shape;
    return j.dump(2) + "\n";
}

Tensor stack_images(const Dataset& ds, const std::vector<std::size_t>& ids) {
    if (ids.empty()) throw PreconditionError("stack_images: empty id list");
    const Tensor& first = ds.samples[ids[0]].image;
    std::vector<std::size_t> shape{ids.size()};
    shape.insert(shape.end(), first.shape.begin(), first.shape.end());
    Tensor out(shape);
    std::size_t n = first.numel();
    for (std::size_t i = 0; i < ids.size(); ++i)
        std::copy(ds.samples[ids[i]].image.data.begin(), ds.samples[ids[i]].image.data.end(),
                  out.data.begin() + i * n);
    return out;
}

}  // namespace advtrust::data
