#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "swaprank/rankernet.hpp"

namespace swaprank {

// Versioned, line-oriented text checkpoint:
//
//   swaprank-checkpoint
//   format_version 1
//   layer_dims 16 64 64 1
//   config <key> <value>            (one line per TrainConfig field)
//   adam_step <t>
//   <array> <layer> <length> v...   (weights, bias, adam_m_weights, adam_m_bias,
//                                    adam_v_weights, adam_v_bias; row-major)
//   checksum fnv1a64 <hex>          (over every byte before this line)
//
// Numbers use the shortest round-trip decimal form, so save/load is bit-exact.
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    RankerModel model;
    AdamState adam;
    TrainConfig config;
};

std::string checkpoint_to_string(const RankerModel& model, const AdamState& adam, const TrainConfig& cfg);

// Throws VersionError, ChecksumError, ShapeError or FormatError.
Checkpoint checkpoint_from_string(const std::string& text, const std::string& source = "<checkpoint>");

void save_checkpoint(const std::filesystem::path& path, const RankerModel& model, const AdamState& adam,
                     const TrainConfig& cfg);
Checkpoint load_checkpoint(const std::filesystem::path& path);
// As above, and throws ShapeError unless the stored layer_dims equal `expected_dims`.
Checkpoint load_checkpoint(const std::filesystem::path& path, std::span<const std::size_t> expected_dims);

}  // namespace swaprank
