#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "swaprank/labelgen.hpp"

namespace swaprank {

// Mean of per-frame model scores. Throws InputError on an empty list.
double aggregate_frames(std::span<const double> frame_scores);

// floor(i * n_frames / k) for i in [0, k), duplicates dropped in order.
std::vector<std::size_t> sample_frame_indices(std::size_t n_frames, std::size_t k = 10);

enum class Granularity { Coarse, Fine };

const char* to_string(Granularity g);

// Largest |delta MOS| admitted at each granularity. Pairs with delta MOS == 0 are
// always dropped, so fine pairs are a subset of coarse pairs.
inline constexpr double kCoarseMosGap = 1.0;
inline constexpr double kFineMosGap = 0.1;
// Slack on the gap comparison so decimal MOS values (3.1 - 3.0) are not lost to rounding.
inline constexpr double kMosGapSlack = 1e-9;

double max_mos_gap(Granularity g);

struct ScoredPair {
    double pred_a = 0.0;
    double pred_b = 0.0;
    double mos_a = 0.0;
    double mos_b = 0.0;
};

struct ConsistencyReport {
    Granularity granularity = Granularity::Coarse;
    std::size_t pair_count = 0;
    std::size_t agreements = 0;
    double agree_percent = 0.0;
};

// Percentage of admitted pairs whose prediction order matches the MOS order.
// Prediction ties disagree. Throws InputError when no pair survives filtering.
ConsistencyReport consistency(std::span<const ScoredPair> pairs, Granularity g, Execution exec = Execution::Serial);

// All unordered pairs (i < j) of items.
std::vector<ScoredPair> all_pairs(std::span<const double> predictions, std::span<const double> mos);

// Average ranks, 1-based; ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

// Spearman rank correlation (Pearson on average ranks) and Pearson correlation.
// Both throw InputError on length mismatch or n < 2, and
// UndefinedCorrelationError on a constant input.
double srcc(std::span<const double> xs, std::span<const double> ys);
double plcc(std::span<const double> xs, std::span<const double> ys);

struct CorrelationReport {
    double srcc = 0.0;
    double plcc = 0.0;
    std::size_t n = 0;
};

CorrelationReport correlate(std::span<const double> predictions, std::span<const double> mos);

}  // namespace swaprank
