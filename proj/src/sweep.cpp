#include "swaprank/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "swaprank/error.hpp"
#include "swaprank/rng.hpp"

namespace swaprank {

namespace {

LabelGenConfig only(bool exp, bool light, bool pose, bool lpips) {
    LabelGenConfig cfg;
    cfg.use_expression = exp;
    cfg.use_lighting = light;
    cfg.use_pose = pose;
    cfg.use_lpips = lpips;
    return cfg;
}

constexpr std::uint64_t kFractionSalt = 0xF4AC;

}  // namespace

std::vector<AttributeSet> single_and_full_attribute_sets() {
    return {
        {"exp", only(true, false, false, false)},
        {"light", only(false, true, false, false)},
        {"pose", only(false, false, true, false)},
        {"lpips", only(false, false, false, true)},
        {"all", only(true, true, true, true)},
    };
}

AttributeSet parse_attribute_set(const std::string& spec) {
    AttributeSet set{spec, only(false, false, false, false)};
    if (spec == "all") {
        set.labels = only(true, true, true, true);
        return set;
    }
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, '+')) {
        if (part == "exp") set.labels.use_expression = true;
        else if (part == "light") set.labels.use_lighting = true;
        else if (part == "pose") set.labels.use_pose = true;
        else if (part == "lpips") set.labels.use_lpips = true;
        else if (part == "id") set.labels.use_identity = true;
        else throw ConfigError("unknown attribute '" + part + "' in '" + spec + "'");
    }
    set.labels.validate();
    return set;
}

HeldOutScores score_split(const RankerModel& model, const SyntheticDataset& data, const SplitAssignment& split,
                          Split which) {
    HeldOutScores out;
    for (const auto& g : data.groups) {
        if (split.at(g.target.image_id) != which) continue;
        for (const auto& s : g.swaps) {
            out.predictions.push_back(score(model, data.features.at(s.image_id)));
            out.mos.push_back(data.mos(s.image_id));
        }
    }
    return out;
}

ExperimentResult run_experiment(const SyntheticDataset& data, const LabelGenConfig& labels, double train_fraction,
                                const ExperimentOptions& options) {
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw ConfigError("train fraction must be in (0, 1]");
    const SplitAssignment split = split_dataset(data.groups, options.ratio, options.split_seed);

    std::vector<std::string> train_ids;
    for (const auto& [id, s] : split.by_target)
        if (s == Split::Train) train_ids.push_back(id);
    Rng rng(Rng::mix(options.split_seed, kFractionSalt));
    rng.shuffle(train_ids);
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(train_ids.size()) - 1e-9)));
    train_ids.resize(std::min(keep, train_ids.size()));
    std::sort(train_ids.begin(), train_ids.end());

    std::vector<TargetGroup> train_groups, validation_groups;
    for (const auto& g : data.groups) {
        const auto& id = g.target.image_id;
        if (std::binary_search(train_ids.begin(), train_ids.end(), id)) train_groups.push_back(g);
        else if (split.at(id) == Split::Validation) validation_groups.push_back(g);
    }

    const auto train_labels = generate_dataset_labels(train_groups, labels);
    const auto holdout_labels = validation_groups.empty()
                                    ? std::vector<RankLabel>{}
                                    : generate_dataset_labels(validation_groups, labels);
    const auto train_pairs = pairs_from_labels(train_labels, data.features);
    const auto holdout_pairs = pairs_from_labels(holdout_labels, data.features);

    RankerModel model = init_model(data.feature_dim, options.hidden_dims, options.model_seed);

    ExperimentResult result;
    result.train_targets = train_groups.size();
    result.train_pairs = train_pairs.size();
    result.holdout_pairs = holdout_pairs.size();
    result.report = train(model, train_pairs, options.train, holdout_pairs);

    const HeldOutScores test = score_split(model, data, split, Split::Test);
    const auto pairs = all_pairs(test.predictions, test.mos);
    result.coarse = consistency(pairs, Granularity::Coarse);
    result.fine = consistency(pairs, Granularity::Fine);
    result.correlation = correlate(test.predictions, test.mos);
    return result;
}

std::vector<SweepCell> ablation_sweep(const SyntheticDataset& data, const SweepGrid& grid,
                                      const ExperimentOptions& options, Execution exec) {
    if (grid.size() == 0) throw ConfigError("empty sweep grid");
    std::vector<SweepCell> cells;
    cells.reserve(grid.size());
    for (const auto& attrs : grid.attribute_sets)
        for (double eps : grid.epsilons)
            for (double frac : grid.train_fractions)
                cells.push_back({cells.size(), attrs.name, eps, frac, {}});

    const auto run = [&](SweepCell& cell) {
        ExperimentOptions opt = options;
        opt.train.epsilon = cell.epsilon;
        const auto& attrs = grid.attribute_sets[cell.index / (grid.epsilons.size() * grid.train_fractions.size())];
        cell.result = run_experiment(data, attrs.labels, cell.train_fraction, opt);
    };

    if (exec == Execution::Serial) {
        for (auto& c : cells) run(c);
        return cells;
    }

    std::vector<std::exception_ptr> errors(cells.size());
    const auto n = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            run(cells[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return cells;
}

}  // namespace swaprank
