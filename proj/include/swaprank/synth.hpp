#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "swaprank/labelgen.hpp"
#include "swaprank/rankernet.hpp"

namespace swaprank {

// Planted-order benchmark. Every swap has a latent quality q ~ U(0, 1); its
// attribute losses are c_k * |1.1 - q + noise_sigma * nu_k| (strictly decreasing
// in q when noise_sigma == 0) and its feature vector is
//   a * q + b + noise_sigma * (attribute_leak * B nu + eta)
// with fixed random a, b, B and fresh N(0, 1) draws nu, eta per swap. The
// leaked term makes single-attribute labels systematically misleading: a ranker
// fitted to one attribute learns that attribute's noise direction.
struct SyntheticBenchmarkSpec {
    std::size_t n_targets = 200;
    std::size_t swaps_per_target = 10;
    std::size_t feature_dim = 16;
    double noise_sigma = 0.05;
    std::uint64_t seed = 0;
    std::size_t expression_dim = kDefaultExpressionDim;
    std::size_t identity_dim = 16;  // 0 leaves identity embeddings out
    // Share of the per-attribute loss noise that is visible in the features.
    double attribute_leak = 1.0;

    void validate() const;  // throws ConfigError
};

struct SyntheticDataset {
    std::vector<TargetGroup> groups;
    std::map<std::string, std::vector<double>> features;  // swap image_id -> feature vector
    std::map<std::string, double> quality;                // swap image_id -> latent q
    std::size_t feature_dim = 0;

    // Human-opinion stand-in on the 1..5 MOS scale: 1 + 4q.
    double mos(const std::string& image_id) const { return 1.0 + 4.0 * quality.at(image_id); }
};

SyntheticDataset synth_benchmark(const SyntheticBenchmarkSpec& spec);

// Resolves labels to feature views. Throws InputError for images without features.
// The returned pairs point into `features`, which must outlive them.
std::vector<FeaturePair> pairs_from_labels(std::span<const RankLabel> labels,
                                           const std::map<std::string, std::vector<double>>& features);

}  // namespace swaprank
