#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "swaprank/evalkit.hpp"
#include "swaprank/labelgen.hpp"
#include "swaprank/rankernet.hpp"
#include "swaprank/synth.hpp"

namespace swaprank {

// A named label-generation setting, e.g. "pose+exp" or "all".
struct AttributeSet {
    std::string name;
    LabelGenConfig labels;
};

// The attribute subsets used for ablations: each attribute alone, and all four.
std::vector<AttributeSet> single_and_full_attribute_sets();
// Attribute set from a '+'-joined list of exp, light, pose, lpips, id (or "all").
AttributeSet parse_attribute_set(const std::string& spec);

struct ExperimentOptions {
    TrainConfig train;
    std::vector<std::size_t> hidden_dims = kDefaultHiddenDims;
    SplitRatio ratio;
    std::uint64_t split_seed = 0;
    std::uint64_t model_seed = 0;
};

struct ExperimentResult {
    std::size_t train_targets = 0;
    std::size_t train_pairs = 0;
    std::size_t holdout_pairs = 0;
    TrainReport report;
    ConsistencyReport coarse;
    ConsistencyReport fine;
    CorrelationReport correlation;
};

// Splits by target, keeps `train_fraction` of the training targets (a nested
// prefix of one seeded order, so smaller fractions are subsets of larger ones),
// trains on their labels, tracks validation labels as the holdout, and scores
// every test-split swap against MOS = 1 + 4q.
ExperimentResult run_experiment(const SyntheticDataset& data, const LabelGenConfig& labels, double train_fraction,
                                const ExperimentOptions& options);

// Scores of every swap in the test split together with its MOS.
struct HeldOutScores {
    std::vector<double> predictions;
    std::vector<double> mos;
};
HeldOutScores score_split(const RankerModel& model, const SyntheticDataset& data, const SplitAssignment& split,
                          Split which);

struct SweepGrid {
    std::vector<AttributeSet> attribute_sets;
    std::vector<double> epsilons{0.5};
    std::vector<double> train_fractions{1.0};

    std::size_t size() const { return attribute_sets.size() * epsilons.size() * train_fractions.size(); }
};

struct SweepCell {
    std::size_t index = 0;
    std::string attributes;
    double epsilon = 0.0;
    double train_fraction = 0.0;
    ExperimentResult result;
};

// One run per grid cell (attribute-major, then epsilon, then fraction). Cells
// share the split and model seeds, so they differ only in the swept knob. The
// parallel path runs cells concurrently; output order is the grid order.
std::vector<SweepCell> ablation_sweep(const SyntheticDataset& data, const SweepGrid& grid,
                                      const ExperimentOptions& options, Execution exec = Execution::Parallel);

}  // namespace swaprank
