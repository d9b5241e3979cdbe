#include "swaprank/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "swaprank/error.hpp"

namespace swaprank {

double aggregate_frames(std::span<const double> frame_scores) {
    if (frame_scores.empty()) throw InputError("cannot aggregate an empty frame list");
    double sum = 0.0;
    for (double s : frame_scores) sum += s;
    return sum / static_cast<double>(frame_scores.size());
}

std::vector<std::size_t> sample_frame_indices(std::size_t n_frames, std::size_t k) {
    std::vector<std::size_t> out;
    if (n_frames == 0 || k == 0) return out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t idx = i * n_frames / k;
        if (out.empty() || out.back() != idx) out.push_back(idx);
    }
    return out;
}

const char* to_string(Granularity g) { return g == Granularity::Coarse ? "coarse" : "fine"; }

double max_mos_gap(Granularity g) { return g == Granularity::Coarse ? kCoarseMosGap : kFineMosGap; }

namespace {

// 0 = filtered out, 1 = admitted and agrees, 2 = admitted and disagrees.
inline int classify(const ScoredPair& p, double limit) {
    const double gap = p.mos_a - p.mos_b;
    if (gap == 0.0 || std::abs(gap) > limit) return 0;
    const double pred = p.pred_a - p.pred_b;
    const bool agree = (pred > 0.0 && gap > 0.0) || (pred < 0.0 && gap < 0.0);
    return agree ? 1 : 2;
}

}  // namespace

ConsistencyReport consistency(std::span<const ScoredPair> pairs, Granularity g, Execution exec) {
    const double limit = max_mos_gap(g) + kMosGapSlack;
    std::int64_t admitted = 0, agreed = 0;
    const auto n = static_cast<std::int64_t>(pairs.size());

    if (exec == Execution::Serial) {
        for (std::int64_t i = 0; i < n; ++i) {
            const int c = classify(pairs[i], limit);
            admitted += c != 0;
            agreed += c == 1;
        }
    } else {
#pragma omp parallel for reduction(+ : admitted, agreed) schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            const int c = classify(pairs[i], limit);
            admitted += c != 0;
            agreed += c == 1;
        }
    }

    if (admitted == 0) throw InputError(std::string("no ") + to_string(g) + "-grained pairs after filtering");
    ConsistencyReport r;
    r.granularity = g;
    r.pair_count = static_cast<std::size_t>(admitted);
    r.agreements = static_cast<std::size_t>(agreed);
    r.agree_percent = 100.0 * static_cast<double>(agreed) / static_cast<double>(admitted);
    return r;
}

std::vector<ScoredPair> all_pairs(std::span<const double> predictions, std::span<const double> mos) {
    if (predictions.size() != mos.size()) throw InputError("prediction and MOS lists differ in length");
    std::vector<ScoredPair> out;
    const std::size_t n = predictions.size();
    out.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.push_back({predictions[i], predictions[j], mos[i], mos[j]});
    return out;
}

std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        // Positions i..j (0-based) share rank mean((i+1)..(j+1)).
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

void check_sample(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InputError("correlation inputs differ in length");
    if (xs.size() < 2) throw InputError("correlation needs at least two points");
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw InputError("correlation input is not finite");
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("correlation of a constant sample is undefined");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double plcc(std::span<const double> xs, std::span<const double> ys) {
    check_sample(xs, ys);
    return pearson(xs, ys);
}

double srcc(std::span<const double> xs, std::span<const double> ys) {
    check_sample(xs, ys);
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    return pearson(rx, ry);
}

CorrelationReport correlate(std::span<const double> predictions, std::span<const double> mos) {
    return {srcc(predictions, mos), plcc(predictions, mos), predictions.size()};
}

}  // namespace swaprank
