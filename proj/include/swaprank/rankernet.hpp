#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swaprank/labelgen.hpp"

namespace swaprank {

// One dense layer's parameters: weights are out x in, row-major.
struct ParamBlock {
    std::vector<double> weights;
    std::vector<double> bias;

    friend bool operator==(const ParamBlock&, const ParamBlock&) = default;
};

// Scalar scoring MLP f(x; theta). Rectifier on hidden layers, identity on the
// output. Both Siamese branches evaluate this single parameter set.
class RankerModel {
public:
    RankerModel() = default;

    // Throws InputError unless dims.size() >= 2, dims.back() == 1, every dim > 0
    // and block shapes chain consistently.
    RankerModel(std::vector<std::size_t> layer_dims, std::vector<ParamBlock> blocks);

    const std::vector<std::size_t>& layer_dims() const { return dims_; }
    std::size_t input_dim() const { return dims_.front(); }
    std::size_t layer_count() const { return blocks_.size(); }
    std::size_t in_dim(std::size_t layer) const { return dims_[layer]; }
    std::size_t out_dim(std::size_t layer) const { return dims_[layer + 1]; }
    std::size_t parameter_count() const;

    const std::vector<ParamBlock>& blocks() const { return blocks_; }
    std::vector<ParamBlock>& blocks() { return blocks_; }

    // FNV-1a over every parameter's bit pattern, layer by layer.
    std::string checksum() const;

    friend bool operator==(const RankerModel&, const RankerModel&) = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<ParamBlock> blocks_;
};

// Gradients and Adam moments share the model's block layout.
using Gradient = std::vector<ParamBlock>;

struct AdamState {
    std::vector<ParamBlock> first_moment;
    std::vector<ParamBlock> second_moment;
    std::uint64_t step = 0;

    static AdamState zeros_like(const RankerModel& model);
};

struct TrainConfig {
    double epsilon = 0.5;  // ranking margin
    double learning_rate = 3e-5;
    double beta1 = 0.0;
    double beta2 = 0.99;
    double weight_decay = 3e-5;
    double adam_eps = 1e-8;
    std::size_t batch_size = 32;
    std::size_t epochs = 20;
    std::uint64_t seed = 0;
    Execution batch_execution = Execution::Serial;

    void validate() const;  // throws ConfigError
};

// A labelled pair: `better` has higher quality. Views into caller-owned storage.
struct FeaturePair {
    std::span<const double> better;
    std::span<const double> worse;
};

struct TrainReport {
    std::vector<double> epoch_loss;         // mean hinge loss over the epoch's pairs
    std::vector<double> holdout_accuracy;   // empty when no holdout pairs were given
    std::string parameter_checksum;
};

inline const std::vector<std::size_t> kDefaultHiddenDims{64, 64};

// Weights ~ N(0, 1) / sqrt(fan_in), biases zero. Throws InputError when input_dim == 0.
RankerModel init_model(std::size_t input_dim, std::span<const std::size_t> hidden_dims, std::uint64_t seed);

// Throws InputError on dimension mismatch.
double score(const RankerModel& model, std::span<const double> x);

// max(0, s_worse - s_better + epsilon). Throws ConfigError when epsilon <= 0.
double margin_rank_loss(double s_better, double s_worse, double epsilon);

Gradient zero_gradient(const RankerModel& model);

// Exact gradient of margin_rank_loss(f(better), f(worse), epsilon) w.r.t. the
// shared parameters. All zeros when the hinge is inactive.
Gradient pair_gradient(const RankerModel& model, std::span<const double> better, std::span<const double> worse,
                       double epsilon);

// Mean loss and mean gradient over pairs[indices]. The parallel kernel computes
// per-pair gradients concurrently and sums them in index order, so it is
// bit-identical to the serial one.
struct BatchResult {
    Gradient gradient;
    double mean_loss = 0.0;
};
BatchResult batch_gradient(const RankerModel& model, std::span<const FeaturePair> pairs,
                           std::span<const std::size_t> indices, double epsilon, Execution exec);

// Decoupled weight decay (theta *= 1 - weight_decay), then bias-corrected Adam.
void adam_step(RankerModel& model, const Gradient& grad, AdamState& state, const TrainConfig& cfg);

// Fraction of pairs with score(better) > score(worse); ties count as wrong.
double pairwise_accuracy(const RankerModel& model, std::span<const FeaturePair> pairs);

// Seeded shuffled mini-batches for cfg.epochs epochs. `state` carries optimizer
// state across calls; a fresh one is used when null.
TrainReport train(RankerModel& model, std::span<const FeaturePair> pairs, const TrainConfig& cfg,
                  std::span<const FeaturePair> holdout, AdamState* state = nullptr);

}  // namespace swaprank
