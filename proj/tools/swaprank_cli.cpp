// swaprank: command-line front end.
//
//   swaprank synth       --records r.jsonl --features f.jsonl [--mos m.jsonl]
//   swaprank gen-labels  --records r.jsonl --out labels.jsonl [--margins exp=0.1,pose=0.01]
//   swaprank split       --records r.jsonl --out split.json [--labels labels.jsonl]
//   swaprank train       --labels l.jsonl --features f.jsonl --out model.ckpt [--split split.json]
//   swaprank score       --model model.ckpt --features f.jsonl --out scores.jsonl
//   swaprank eval-consistency --mos m.jsonl [--scores scores.jsonl]
//   swaprank eval-corr   --mos m.jsonl [--scores scores.jsonl]
//   swaprank graph       --labels l.jsonl --target T --out g.dot [--records r.jsonl] [--reduce]
//   swaprank swap-loss   --components c.jsonl [--ratio 40:1 | --lambda1 .. --lambda3 ..]
//   swaprank sweep       [--attributes exp,light,pose,lpips,all] [--fractions 0.1,1]
//
// Every subcommand takes --seed and --config <file.toml>; explicit flags win
// over config values. Reports are JSON with a schema_version field.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "swaprank/checkpoint.hpp"
#include "swaprank/error.hpp"
#include "swaprank/evalkit.hpp"
#include "swaprank/formats.hpp"
#include "swaprank/labelgen.hpp"
#include "swaprank/rankernet.hpp"
#include "swaprank/rng.hpp"
#include "swaprank/swaploss.hpp"
#include "swaprank/sweep.hpp"
#include "swaprank/synth.hpp"

using namespace swaprank;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep))
        if (!part.empty()) out.push_back(part);
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError(what + ": '" + s + "' is not a number");
    return v;
}

std::vector<double> parse_numbers(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& p : split_list(s, ',')) out.push_back(parse_number(p, what));
    return out;
}

std::vector<std::size_t> parse_dims(const std::string& s) {
    std::vector<std::size_t> out;
    for (double d : parse_numbers(s, "--hidden")) {
        if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d)))
            throw ConfigError("--hidden: layer sizes must be positive integers");
        out.push_back(static_cast<std::size_t>(d));
    }
    return out;
}

// "exp=0.1,light=0,pose=0.02,lpips=0,id=0.05"
void apply_margins(LabelGenConfig& cfg, const std::string& spec) {
    for (const auto& item : split_list(spec, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--margins: expected key=value, got '" + item + "'");
        const auto key = item.substr(0, eq);
        const double v = parse_number(item.substr(eq + 1), "--margins " + key);
        if (key == "exp") cfg.delta_exp = v;
        else if (key == "light") cfg.delta_light = v;
        else if (key == "pose") cfg.delta_pose = v;
        else if (key == "lpips") cfg.delta_lpips = v;
        else if (key == "id") cfg.delta_id = v;
        else throw ConfigError("--margins: unknown attribute '" + key + "'");
    }
}

// "40:1", "40" or a preset label.
double parse_ratio(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) return parse_number(s, "--ratio");
    const double num = parse_number(s.substr(0, colon), "--ratio");
    const double den = parse_number(s.substr(colon + 1), "--ratio");
    if (!(den > 0)) throw ConfigError("--ratio: denominator must be > 0");
    return num / den;
}

PoseCosine parse_pose_mode(const std::string& s) {
    if (s == "lifted") return PoseCosine::Lifted;
    if (s == "raw6d") return PoseCosine::Raw6D;
    throw ConfigError("--pose-mode must be 'lifted' or 'raw6d'");
}

Execution exec_mode(bool serial) { return serial ? Execution::Serial : Execution::Parallel; }

ordered_json report_header(const std::string& command) {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = command;
    return j;
}

void emit_report(const ordered_json& report, const std::string& path) {
    if (path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        write_json(path, report);
    }
}

ordered_json label_config_json(const LabelGenConfig& c) {
    ordered_json j;
    j["use_expression"] = c.use_expression;
    j["use_lighting"] = c.use_lighting;
    j["use_pose"] = c.use_pose;
    j["use_lpips"] = c.use_lpips;
    j["use_identity"] = c.use_identity;
    j["delta_exp"] = c.delta_exp;
    j["delta_light"] = c.delta_light;
    j["delta_pose"] = c.delta_pose;
    j["delta_lpips"] = c.delta_lpips;
    j["delta_id"] = c.delta_id;
    j["pose_mode"] = c.pose_mode == PoseCosine::Lifted ? "lifted" : "raw6d";
    return j;
}

ordered_json train_config_json(const TrainConfig& c) {
    ordered_json j;
    j["epsilon"] = c.epsilon;
    j["learning_rate"] = c.learning_rate;
    j["beta1"] = c.beta1;
    j["beta2"] = c.beta2;
    j["weight_decay"] = c.weight_decay;
    j["adam_eps"] = c.adam_eps;
    j["batch_size"] = c.batch_size;
    j["epochs"] = c.epochs;
    j["seed"] = c.seed;
    return j;
}

ordered_json consistency_json(const ConsistencyReport& r) {
    ordered_json j;
    j["granularity"] = to_string(r.granularity);
    j["pair_count"] = r.pair_count;
    j["agreements"] = r.agreements;
    j["agree_percent"] = r.agree_percent;
    return j;
}

// ---- text tables ----

class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& os) const {
        std::vector<std::size_t> width(rows_[0].size(), 0);
        for (const auto& r : rows_)
            for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            for (std::size_t c = 0; c < rows_[i].size(); ++c) {
                os << (c ? "  " : "");
                const auto& cell = rows_[i][c];
                if (c == 0) os << cell << std::string(width[c] - cell.size(), ' ');
                else os << std::string(width[c] - cell.size(), ' ') << cell;
            }
            os << "\n";
            if (i == 0) {
                std::size_t total = 0;
                for (std::size_t w : width) total += w + 2;
                os << std::string(total - 2, '-') << "\n";
            }
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// ---- score tables: {"item_id", "score"} ----

std::map<std::string, double> load_scores(const std::string& path) {
    std::map<std::string, double> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path + ":" + std::to_string(i + 1) + ": ";
        try {
            const auto j = nlohmann::json::parse(lines[i]);
            if (!j.contains("item_id") || !j["item_id"].is_string())
                throw FormatError(where + "field 'item_id' is missing or not a string");
            if (!j.contains("score") || !j["score"].is_number())
                throw FormatError(where + "field 'score' is missing or not a number");
            if (!out.emplace(j["item_id"].get<std::string>(), j["score"].get<double>()).second)
                throw FormatError(where + "field 'item_id' duplicates an earlier row");
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(where + "malformed JSON: " + e.what());
        }
    }
    return out;
}

// Predictions and MOS aligned by item. Without a score table, each row's
// frame scores are averaged.
struct Aligned {
    std::vector<std::string> ids;
    std::vector<double> pred;
    std::vector<double> mos;
};

Aligned align(const std::string& mos_path, const std::string& scores_path) {
    const auto rows = load_mos(mos_path);
    std::optional<std::map<std::string, double>> scores;
    if (!scores_path.empty()) scores = load_scores(scores_path);
    Aligned a;
    for (const auto& r : rows) {
        double p = 0;
        if (scores) {
            const auto it = scores->find(r.item_id);
            if (it == scores->end()) throw InputError(scores_path + ": no score for item '" + r.item_id + "'");
            p = it->second;
        } else {
            if (r.frame_scores.empty())
                throw InputError(mos_path + ": item '" + r.item_id + "' has no frame_scores and no --scores given");
            p = aggregate_frames(r.frame_scores);
        }
        a.ids.push_back(r.item_id);
        a.pred.push_back(p);
        a.mos.push_back(r.mos);
    }
    return a;
}

// ---- subcommands ----

struct SynthArgs {
    SyntheticBenchmarkSpec spec;
    std::string records, features, mos;
};

void run_synth(const SynthArgs& a) {
    const auto data = synth_benchmark(a.spec);
    save_records(a.records, data.groups);
    FeatureTable table{data.features, data.quality, data.feature_dim};
    save_features(a.features, table);
    if (!a.mos.empty()) {
        std::vector<MosRecord> rows;
        for (const auto& [id, q] : data.quality) rows.push_back({id, data.mos(id), {}});
        save_mos(a.mos, rows);
    }
    auto r = report_header("synth");
    r["targets"] = data.groups.size();
    r["swaps"] = data.quality.size();
    r["feature_dim"] = data.feature_dim;
    r["noise_sigma"] = a.spec.noise_sigma;
    r["seed"] = a.spec.seed;
    emit_report(r, "");
}

struct LabelArgs {
    std::string records, out, report, margins, attributes = "all", pose_mode = "lifted";
    bool identity = false, serial = false, table = false;
    std::uint64_t seed = 0;
};

LabelGenConfig label_config(const LabelArgs& a) {
    LabelGenConfig cfg = parse_attribute_set(a.attributes).labels;
    cfg.use_identity = cfg.use_identity || a.identity;
    cfg.pose_mode = parse_pose_mode(a.pose_mode);
    apply_margins(cfg, a.margins);
    cfg.validate();
    return cfg;
}

void run_gen_labels(const LabelArgs& a) {
    const auto cfg = label_config(a);
    const auto groups = load_records(a.records);
    const auto labels = generate_dataset_labels(groups, cfg, exec_mode(a.serial));
    save_labels(a.out, labels);

    std::map<std::string, std::size_t> per_target;
    std::size_t by_rule[2] = {0, 0};
    for (const auto& l : labels) {
        ++per_target[l.target_id];
        ++by_rule[static_cast<int>(l.rule)];
    }
    std::size_t swaps = 0;
    for (const auto& g : groups) swaps += g.swaps.size();

    auto r = report_header("gen-labels");
    r["config"] = label_config_json(cfg);
    r["targets"] = groups.size();
    r["swaps"] = swaps;
    r["labels"] = labels.size();
    r["attribute_labels"] = by_rule[0];
    r["identity_labels"] = by_rule[1];
    emit_report(r, a.report);
    if (a.table) {
        Table t({"targets", "swaps", "labels", "attribute", "identity"});
        t.add({std::to_string(groups.size()), std::to_string(swaps), std::to_string(labels.size()),
               std::to_string(by_rule[0]), std::to_string(by_rule[1])});
        t.print(std::cout);
    }
}

struct SplitArgs {
    std::string records, out, labels, report, proportions = "7:2:1";
    std::uint64_t seed = 0;
    bool table = false;
};

void run_split(const SplitArgs& a) {
    const auto parts = split_list(a.proportions, ':');
    if (parts.size() != 3) throw ConfigError("--proportions must look like 7:2:1");
    const SplitRatio ratio{parse_number(parts[0], "--proportions"), parse_number(parts[1], "--proportions"),
                           parse_number(parts[2], "--proportions")};
    const auto groups = load_records(a.records);
    const auto split = split_dataset(groups, ratio, a.seed);
    save_split(a.out, split);

    std::map<Split, std::size_t> images, labels;
    for (const auto& g : groups) images[split.at(g.target.image_id)] += g.swaps.size();
    const bool have_labels = !a.labels.empty();
    if (have_labels)
        for (const auto& l : load_labels(a.labels)) {
            if (!split.contains(l.target_id))
                throw InputError(a.labels + ": label target '" + l.target_id + "' is not in the records");
            ++labels[split.at(l.target_id)];
        }

    auto r = report_header("split");
    r["seed"] = a.seed;
    r["proportions"] = a.proportions;
    ordered_json rows = ordered_json::array();
    Table t({"split", "targets", "images", "labels"});
    for (Split s : {Split::Train, Split::Validation, Split::Test}) {
        ordered_json row;
        row["split"] = to_string(s);
        row["targets"] = split.count(s);
        row["images"] = images[s];
        if (have_labels) row["labels"] = labels[s];
        rows.push_back(row);
        t.add({to_string(s), std::to_string(split.count(s)), std::to_string(images[s]),
               have_labels ? std::to_string(labels[s]) : "-"});
    }
    r["splits"] = rows;
    emit_report(r, a.report);
    if (a.table) t.print(std::cout);
}

struct TrainArgs {
    std::string labels, features, split, out, report, resume, hidden = "64,64";
    TrainConfig cfg;
    std::uint64_t seed = 0;
    bool serial = true, table = false;
};

void run_train(TrainArgs a) {
    a.cfg.seed = a.seed;
    a.cfg.batch_execution = exec_mode(a.serial);
    a.cfg.validate();
    const auto table = load_features(a.features);
    const auto labels = load_labels(a.labels);

    std::vector<RankLabel> train_labels, holdout_labels;
    if (a.split.empty()) {
        train_labels = labels;
    } else {
        const auto split = load_split(a.split);
        for (const auto& l : labels) {
            if (!split.contains(l.target_id))
                throw InputError(a.labels + ": label target '" + l.target_id + "' is not in " + a.split);
            const Split s = split.at(l.target_id);
            if (s == Split::Train) train_labels.push_back(l);
            else if (s == Split::Validation) holdout_labels.push_back(l);
        }
    }
    const auto pairs = pairs_from_labels(train_labels, table.features);
    const auto holdout = pairs_from_labels(holdout_labels, table.features);

    RankerModel model;
    AdamState adam;
    if (a.resume.empty()) {
        model = init_model(table.dim, parse_dims(a.hidden), a.seed);
        adam = AdamState::zeros_like(model);
    } else {
        auto ck = load_checkpoint(a.resume);
        if (ck.model.input_dim() != table.dim)
            throw ShapeError(a.resume + ": model input " + std::to_string(ck.model.input_dim()) +
                             " does not match feature dim " + std::to_string(table.dim));
        model = std::move(ck.model);
        adam = std::move(ck.adam);
    }
    const auto rep = train(model, pairs, a.cfg, holdout, &adam);
    save_checkpoint(a.out, model, adam, a.cfg);

    auto r = report_header("train");
    r["config"] = train_config_json(a.cfg);
    r["layer_dims"] = model.layer_dims();
    r["train_pairs"] = pairs.size();
    r["holdout_pairs"] = holdout.size();
    r["epoch_loss"] = rep.epoch_loss;
    r["holdout_accuracy"] = rep.holdout_accuracy;
    r["parameter_checksum"] = rep.parameter_checksum;
    emit_report(r, a.report);
    if (a.table) {
        Table t({"epoch", "loss", "holdout acc"});
        for (std::size_t e = 0; e < rep.epoch_loss.size(); ++e)
            t.add({std::to_string(e + 1), fixed(rep.epoch_loss[e], 4),
                   rep.holdout_accuracy.empty() ? "-" : fixed(100 * rep.holdout_accuracy[e])});
        t.print(std::cout);
    }
}

struct ScoreArgs {
    std::string model, features, out;
    std::uint64_t seed = 0;
};

void run_score(const ScoreArgs& a) {
    const auto ck = load_checkpoint(a.model);
    const auto table = load_features(a.features);
    if (table.dim != ck.model.input_dim() && !table.features.empty())
        throw ShapeError(a.features + ": feature dim " + std::to_string(table.dim) + " does not match model input " +
                         std::to_string(ck.model.input_dim()));
    std::string text;
    for (const auto& [id, x] : table.features) {
        ordered_json j;
        j["item_id"] = id;
        j["score"] = score(ck.model, x);
        text += j.dump() + "\n";
    }
    write_text(a.out, text);
}

struct EvalArgs {
    std::string mos, scores, report;
    std::uint64_t seed = 0;
    bool table = false, serial = false;
};

void run_eval_consistency(const EvalArgs& a) {
    const auto al = align(a.mos, a.scores);
    const auto pairs = all_pairs(al.pred, al.mos);
    auto r = report_header("eval-consistency");
    r["items"] = al.ids.size();
    Table t({"granularity", "pairs", "agree %"});
    for (Granularity g : {Granularity::Coarse, Granularity::Fine}) {
        const auto c = consistency(pairs, g, exec_mode(a.serial));
        r[to_string(g)] = consistency_json(c);
        t.add({to_string(g), std::to_string(c.pair_count), fixed(c.agree_percent)});
    }
    emit_report(r, a.report);
    if (a.table) t.print(std::cout);
}

void run_eval_corr(const EvalArgs& a) {
    const auto al = align(a.mos, a.scores);
    const auto c = correlate(al.pred, al.mos);
    auto r = report_header("eval-corr");
    r["n"] = c.n;
    r["srcc"] = c.srcc;
    r["plcc"] = c.plcc;
    emit_report(r, a.report);
    if (a.table) {
        Table t({"n", "SRCC", "PLCC"});
        t.add({std::to_string(c.n), fixed(c.srcc, 4), fixed(c.plcc, 4)});
        t.print(std::cout);
    }
}

struct GraphArgs {
    std::string labels, records, target, out;
    std::uint64_t seed = 0;
    bool reduce = false;
};

void run_graph(const GraphArgs& a) {
    std::vector<RankLabel> mine;
    for (const auto& l : load_labels(a.labels))
        if (l.target_id == a.target) mine.push_back(l);
    if (mine.empty()) throw InputError(a.labels + ": no labels for target '" + a.target + "'");
    std::map<std::string, std::string> methods;
    if (!a.records.empty())
        for (const auto& g : load_records(a.records))
            for (const auto& s : g.swaps) methods[s.image_id] = s.method;
    export_dot(build_graph(mine), methods, a.reduce, a.out);
}

struct SwapLossArgs {
    std::string components, report, ratio;
    std::optional<double> lambda1, lambda2, lambda3;
    std::uint64_t seed = 0;
    bool presets = false, table = false;
};

void run_swap_loss(const SwapLossArgs& a) {
    if (a.presets) {
        const SwapLossWeights base;
        Table t({"ratio", "lambda1", "lambda3"});
        for (const auto& p : kQualityRatioPresets) {
            const auto w = weights_for_ratio(p.ratio, base);
            t.add({p.label, fixed(w.lambda1, 4), fixed(w.lambda3, 4)});
        }
        t.print(std::cout);
        return;
    }
    if (a.components.empty()) throw ConfigError("--components is required unless --presets is given");

    SwapLossWeights w;
    if (a.lambda1) w.lambda1 = *a.lambda1;
    if (a.lambda2) w.lambda2 = *a.lambda2;
    if (!a.ratio.empty()) {
        if (a.lambda3) throw ConfigError("--ratio and --lambda3 are mutually exclusive");
        w = weights_for_ratio(parse_ratio(a.ratio), w);
    }
    if (a.lambda3) w.lambda3 = *a.lambda3;
    w.validate();

    const auto rows = load_swap_components(a.components);
    auto r = report_header("swap-loss");
    r["weights"] = {{"lambda_adv", 1.0}, {"lambda1", w.lambda1}, {"lambda2", w.lambda2}, {"lambda3", w.lambda3}};
    ordered_json out = ordered_json::array();
    double sum = 0;
    Table t({"row", "adv", "id", "rec", "quality", "total"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto b = total_loss(rows[i], w);
        const auto term = [](const SwapLossTerm& x) {
            return ordered_json{{"raw", x.raw}, {"weight", x.weight}, {"weighted", x.weighted}};
        };
        out.push_back({{"adv", term(b.adv)},
                       {"id", term(b.id)},
                       {"rec", term(b.rec)},
                       {"quality", term(b.quality)},
                       {"total", b.total}});
        sum += b.total;
        t.add({std::to_string(i + 1), fixed(b.adv.weighted, 4), fixed(b.id.weighted, 4), fixed(b.rec.weighted, 4),
               fixed(b.quality.weighted, 4), fixed(b.total, 4)});
    }
    r["rows"] = out;
    r["mean_total"] = rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
    emit_report(r, a.report);
    if (a.table) t.print(std::cout);
}

struct SweepArgs {
    SyntheticBenchmarkSpec spec;
    std::string attributes = "exp,light,pose,lpips,all", epsilons = "0.5", fractions = "1", hidden = "64,64";
    std::string report;
    TrainConfig cfg;
    std::uint64_t seed = 0;
    bool serial = false, table = false;
};

void run_sweep(SweepArgs a) {
    a.spec.seed = a.seed;
    const auto data = synth_benchmark(a.spec);
    SweepGrid grid;
    for (const auto& s : split_list(a.attributes, ',')) grid.attribute_sets.push_back(parse_attribute_set(s));
    grid.epsilons = parse_numbers(a.epsilons, "--epsilons");
    grid.train_fractions = parse_numbers(a.fractions, "--fractions");
    if (grid.size() == 0) throw ConfigError("empty sweep grid");

    ExperimentOptions opts;
    opts.train = a.cfg;
    opts.hidden_dims = parse_dims(a.hidden);
    opts.split_seed = Rng::mix(a.seed, 1);
    opts.model_seed = Rng::mix(a.seed, 2);
    opts.train.seed = Rng::mix(a.seed, 3);
    opts.train.validate();
    const auto cells = ablation_sweep(data, grid, opts, exec_mode(a.serial));

    auto r = report_header("sweep");
    r["seed"] = a.seed;
    r["noise_sigma"] = a.spec.noise_sigma;
    r["targets"] = a.spec.n_targets;
    r["train"] = train_config_json(opts.train);
    ordered_json rows = ordered_json::array();
    Table t({"attributes", "epsilon", "fraction", "pairs", "coarse %", "fine %", "SRCC", "PLCC"});
    for (const auto& c : cells) {
        const auto& res = c.result;
        ordered_json row;
        row["index"] = c.index;
        row["attributes"] = c.attributes;
        row["epsilon"] = c.epsilon;
        row["train_fraction"] = c.train_fraction;
        row["train_targets"] = res.train_targets;
        row["train_pairs"] = res.train_pairs;
        row["holdout_pairs"] = res.holdout_pairs;
        row["coarse"] = consistency_json(res.coarse);
        row["fine"] = consistency_json(res.fine);
        row["srcc"] = res.correlation.srcc;
        row["plcc"] = res.correlation.plcc;
        row["parameter_checksum"] = res.report.parameter_checksum;
        rows.push_back(row);
        t.add({c.attributes, fixed(c.epsilon), fixed(100 * c.train_fraction, 0) + "%", std::to_string(res.train_pairs),
               fixed(res.coarse.agree_percent), fixed(res.fine.agree_percent), fixed(res.correlation.srcc, 4),
               fixed(res.correlation.plcc, 4)});
    }
    r["cells"] = rows;
    emit_report(r, a.report);
    if (a.table) t.print(std::cout);
}

void add_train_options(CLI::App* app, TrainConfig& cfg) {
    app->add_option("--epsilon", cfg.epsilon, "ranking margin")->capture_default_str();
    app->add_option("--lr", cfg.learning_rate, "Adam learning rate")->capture_default_str();
    app->add_option("--beta1", cfg.beta1)->capture_default_str();
    app->add_option("--beta2", cfg.beta2)->capture_default_str();
    app->add_option("--weight-decay", cfg.weight_decay)->capture_default_str();
    app->add_option("--batch-size", cfg.batch_size)->capture_default_str();
    app->add_option("--epochs", cfg.epochs)->capture_default_str();
}

void add_synth_options(CLI::App* app, SyntheticBenchmarkSpec& s) {
    app->add_option("--targets", s.n_targets)->capture_default_str();
    app->add_option("--swaps", s.swaps_per_target, "swaps per target")->capture_default_str();
    app->add_option("--dim", s.feature_dim, "feature dimension")->capture_default_str();
    app->add_option("--noise", s.noise_sigma, "noise sigma")->capture_default_str();
    app->add_option("--leak", s.attribute_leak, "share of attribute noise visible in features")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Attribute-based pseudo-labels and pairwise quality ranking for face swaps"};
    app.set_config("--config", "", "read options from a TOML/INI file");
    app.require_subcommand(1);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "write a planted-order synthetic dataset");
    add_synth_options(c_synth, synth.spec);
    c_synth->add_option("--seed", synth.spec.seed)->capture_default_str();
    c_synth->add_option("--records", synth.records, "attribute records (JSONL)")->required();
    c_synth->add_option("--features", synth.features, "feature vectors (JSONL)")->required();
    c_synth->add_option("--mos", synth.mos, "MOS table (JSONL), MOS = 1 + 4q");

    LabelArgs lab;
    auto* c_lab = app.add_subcommand("gen-labels", "generate rank labels from attribute records");
    c_lab->add_option("--records", lab.records)->required();
    c_lab->add_option("--out", lab.out, "labels (JSONL)")->required();
    c_lab->add_option("--report", lab.report, "JSON report path (default: stdout)");
    c_lab->add_option("--margins", lab.margins, "per-attribute margins, e.g. exp=0.1,pose=0.02,id=0.05");
    c_lab->add_option("--attributes", lab.attributes, "'+'-joined subset of exp,light,pose,lpips,id or 'all'")
        ->capture_default_str();
    c_lab->add_flag("--identity", lab.identity, "also emit identity-similarity labels");
    c_lab->add_option("--pose-mode", lab.pose_mode, "lifted or raw6d")->capture_default_str();
    c_lab->add_flag("--serial", lab.serial, "single-threaded label generation");
    c_lab->add_flag("--table", lab.table);
    c_lab->add_option("--seed", lab.seed, "unused; labels are deterministic");

    SplitArgs sp;
    auto* c_split = app.add_subcommand("split", "assign target groups to train/validation/test");
    c_split->add_option("--records", sp.records)->required();
    c_split->add_option("--out", sp.out, "split assignment (JSON)")->required();
    c_split->add_option("--labels", sp.labels, "count labels per split");
    c_split->add_option("--proportions", sp.proportions)->capture_default_str();
    c_split->add_option("--report", sp.report);
    c_split->add_option("--seed", sp.seed)->capture_default_str();
    c_split->add_flag("--table", sp.table);

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "train the pairwise ranker");
    c_train->add_option("--labels", tr.labels)->required();
    c_train->add_option("--features", tr.features)->required();
    c_train->add_option("--split", tr.split, "train on the train split, report validation accuracy");
    c_train->add_option("--out", tr.out, "checkpoint path")->required();
    c_train->add_option("--resume", tr.resume, "continue from a checkpoint");
    c_train->add_option("--report", tr.report);
    c_train->add_option("--hidden", tr.hidden, "hidden layer sizes")->capture_default_str();
    c_train->add_option("--seed", tr.seed)->capture_default_str();
    c_train->add_flag("!--parallel-batches", tr.serial, "compute per-pair gradients concurrently");
    c_train->add_flag("--table", tr.table);
    add_train_options(c_train, tr.cfg);

    ScoreArgs sc;
    auto* c_score = app.add_subcommand("score", "score feature vectors with a checkpoint");
    c_score->add_option("--model", sc.model)->required();
    c_score->add_option("--features", sc.features)->required();
    c_score->add_option("--out", sc.out, "scores (JSONL: item_id, score)")->required();
    c_score->add_option("--seed", sc.seed, "unused; scoring is deterministic");

    EvalArgs ev;
    auto* c_cons = app.add_subcommand("eval-consistency", "coarse/fine pairwise agreement with MOS");
    auto* c_corr = app.add_subcommand("eval-corr", "SRCC and PLCC against MOS");
    for (auto* c : {c_cons, c_corr}) {
        c->add_option("--mos", ev.mos, "MOS table (JSONL)")->required();
        c->add_option("--scores", ev.scores, "scores (JSONL); default: mean of frame_scores");
        c->add_option("--report", ev.report);
        c->add_option("--seed", ev.seed, "unused; metrics are deterministic");
        c->add_flag("--table", ev.table);
    }
    c_cons->add_flag("--serial", ev.serial);

    GraphArgs gr;
    auto* c_graph = app.add_subcommand("graph", "export one target's label DAG as DOT");
    c_graph->add_option("--labels", gr.labels)->required();
    c_graph->add_option("--target", gr.target)->required();
    c_graph->add_option("--out", gr.out)->required();
    c_graph->add_option("--records", gr.records, "colour nodes by method");
    c_graph->add_flag("--reduce", gr.reduce, "draw the transitive reduction");
    c_graph->add_option("--seed", gr.seed, "unused");

    SwapLossArgs sl;
    auto* c_sl = app.add_subcommand("swap-loss", "quality-aware face-swapping loss breakdown");
    c_sl->add_option("--components", sl.components, "loss components (JSONL)");
    c_sl->add_option("--lambda1", sl.lambda1, "identity weight (default 20)");
    c_sl->add_option("--lambda2", sl.lambda2, "reconstruction weight (default 7)");
    c_sl->add_option("--lambda3", sl.lambda3, "quality weight (default 0.25)");
    c_sl->add_option("--ratio", sl.ratio, "lambda1:lambda3, e.g. 40:1; sets lambda3 = lambda1 / ratio");
    c_sl->add_flag("--presets", sl.presets, "list the ratio presets");
    c_sl->add_option("--report", sl.report);
    c_sl->add_option("--seed", sl.seed, "unused");
    c_sl->add_flag("--table", sl.table);

    SweepArgs sw;
    auto* c_sweep = app.add_subcommand("sweep", "ablation sweep on synthetic data");
    add_synth_options(c_sweep, sw.spec);
    add_train_options(c_sweep, sw.cfg);
    c_sweep->add_option("--attributes", sw.attributes, "comma-separated attribute sets")->capture_default_str();
    c_sweep->add_option("--epsilons", sw.epsilons)->capture_default_str();
    c_sweep->add_option("--fractions", sw.fractions, "training-set fractions")->capture_default_str();
    c_sweep->add_option("--hidden", sw.hidden)->capture_default_str();
    c_sweep->add_option("--report", sw.report);
    c_sweep->add_option("--seed", sw.seed)->capture_default_str();
    c_sweep->add_flag("--serial", sw.serial, "run cells one at a time");
    c_sweep->add_flag("--table", sw.table);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*c_synth) run_synth(synth);
        else if (*c_lab) run_gen_labels(lab);
        else if (*c_split) run_split(sp);
        else if (*c_train) run_train(tr);
        else if (*c_score) run_score(sc);
        else if (*c_cons) run_eval_consistency(ev);
        else if (*c_corr) run_eval_corr(ev);
        else if (*c_graph) run_graph(gr);
        else if (*c_sl) run_swap_loss(sl);
        else if (*c_sweep) run_sweep(sw);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
