#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advtrust/tensor.hpp"

namespace advtrust::data {

enum class SplitTag { Train, Calibration, Test };

const char* split_tag_name(SplitTag t);

struct Sample {
    Tensor image;  // pixel values in [0,1]
    std::size_t label = 0;
};

struct Dataset {
    std::vector<Sample> samples;
    std::size_t num_classes = 0;
    SplitTag tag = SplitTag::Train;

    /// per_class[c] lists the indices of samples labeled c, ascending.
    std::vector<std::vector<std::size_t>> per_class;

    void rebuild_index();
    std::size_t size() const { return samples.size(); }
};

/// Parses every CIFAR-10 binary batch file (*.bin) under dir: 3073-byte
/// records, one label byte followed by 3072 channel-major pixel bytes,
/// scaled to [0,1].
Dataset load_cifar10(const std::string& dir);

struct SynthConfig {
    std::size_t classes = 3;
    std::size_t per_class = 100;
    std::size_t side = 16;
    std::uint64_t seed = 0;
    // cue strengths: the low-frequency cue is a class-positioned smooth blob
    // on a class-dependent base intensity; the high-frequency cue is a fine
    // checkerboard whose phase encodes the class parity
    float lf_strength = 1.0f;
    float hf_strength = 1.0f;
    float noise = 0.02f;
};

/// Class-conditional synthetic images with plantable low/high frequency cues.
Dataset synth_shapes(const SynthConfig& cfg);
Dataset synth_shapes(std::size_t classes, std::size_t per_class, std::size_t side,
                     std::uint64_t seed);

struct SplitResult {
    Dataset train;
    Dataset calibration;
    Dataset test;
};

/// Seeded stratified split; per-class allocation stays within one sample of
/// the exact proportion.
SplitResult split(const Dataset& ds, double train_frac, double calibration_frac,
                  double test_frac, std::uint64_t seed);

/// Portable tensor format: magic "ATNS", version byte, rank byte, extents as
/// u32 little-endian, payload as f32 little-endian.
void save_tensor(const Tensor& t, const std::string& path);
Tensor load_tensor(const std::string& path);

void save_tensor_bytes(const Tensor& t, std::vector<std::uint8_t>& out);
Tensor load_tensor_bytes(const std::vector<std::uint8_t>& bytes);

/// Stacks dataset samples into a (B,C,H,W) batch tensor.
Tensor stack_images(const Dataset& ds, const std::vector<std::size_t>& ids);

/// JSON summary of a dataset: split tag, class count, per-class sizes, image
/// extents.
std::string manifest_json(const Dataset& ds);

}  // namespace advtrust::data
