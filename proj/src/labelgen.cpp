#include "swaprank/labelgen.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <cmath>
#include <exception>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "swaprank/error.hpp"
#include "swaprank/rng.hpp"

namespace swaprank {

const char* to_string(LabelRule rule) { return rule == LabelRule::Attribute ? "attribute" : "identity"; }

LabelRule label_rule_from_string(const std::string& s) {
    if (s == "attribute") return LabelRule::Attribute;
    if (s == "identity") return LabelRule::Identity;
    throw InputError("unknown label rule '" + s + "'");
}

void LabelGenConfig::validate() const {
    for (double d : {delta_exp, delta_light, delta_pose, delta_lpips, delta_id}) {
        if (!std::isfinite(d) || d < 0.0) throw ConfigError("dominance margins must be finite and >= 0");
    }
    if (!use_expression && !use_lighting && !use_pose && !use_lpips)
        throw ConfigError("at least one attribute must be enabled for label generation");
}

namespace {

void check_group(const TargetGroup& group) {
    std::unordered_set<std::string> seen;
    for (const auto& s : group.swaps) {
        if (!seen.insert(s.image_id).second)
            throw InputError("duplicate swap '" + s.image_id + "' in target group '" + group.target.image_id + "'");
    }
}

// A beats B when every enabled attribute is strictly better by more than its margin.
// Ties fail the strict inequality.
bool dominates(const AttributeLossBundle& a, const AttributeLossBundle& b, const LabelGenConfig& cfg) {
    if (cfg.use_expression && !(a.l_exp + cfg.delta_exp < b.l_exp)) return false;
    if (cfg.use_lighting && !(a.l_light + cfg.delta_light < b.l_light)) return false;
    if (cfg.use_pose && !(a.l_pose + cfg.delta_pose < b.l_pose)) return false;
    if (cfg.use_lpips && !(*a.l_lpips + cfg.delta_lpips < *b.l_lpips)) return false;
    return true;
}

}  // namespace

std::vector<RankLabel> generate_labels(const TargetGroup& group, const LabelGenConfig& cfg) {
    cfg.validate();
    check_group(group);

    std::vector<AttributeLossBundle> bundles;
    bundles.reserve(group.swaps.size());
    for (const auto& swap : group.swaps) {
        if (cfg.use_lpips && !swap.lpips_to_target)
            throw InputError("swap '" + swap.image_id + "' has no lpips value but the lpips condition is enabled");
        bundles.push_back(attribute_bundle(group.target, swap, cfg.pose_mode));
    }

    std::vector<RankLabel> labels;
    const std::size_t n = group.swaps.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b || !dominates(bundles[a], bundles[b], cfg)) continue;
            labels.push_back({group.target.image_id, group.swaps[a].image_id, group.swaps[b].image_id,
                              LabelRule::Attribute});
        }
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

std::vector<RankLabel> generate_id_labels(const TargetGroup& group, const LabelGenConfig& cfg) {
    if (!cfg.use_identity) throw ConfigError("identity labels requested but use_identity is off");
    if (!std::isfinite(cfg.delta_id) || cfg.delta_id < 0.0) throw ConfigError("delta_id must be finite and >= 0");
    check_group(group);
    if (!group.target.identity)
        throw InputError("target '" + group.target.image_id + "' has no identity embedding");

    std::vector<double> dist;
    dist.reserve(group.swaps.size());
    for (const auto& swap : group.swaps) {
        if (!swap.identity) throw InputError("swap '" + swap.image_id + "' has no identity embedding");
        dist.push_back(identity_distance(*swap.identity, *group.target.identity));
    }

    std::vector<RankLabel> labels;
    const std::size_t n = group.swaps.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b || !(dist[a] + cfg.delta_id < dist[b])) continue;
            labels.push_back({group.target.image_id, group.swaps[a].image_id, group.swaps[b].image_id,
                              LabelRule::Identity});
        }
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

namespace {

std::vector<RankLabel> labels_for_group(const TargetGroup& group, const LabelGenConfig& cfg) {
    auto labels = generate_labels(group, cfg);
    if (cfg.use_identity) {
        auto id_labels = generate_id_labels(group, cfg);
        labels.insert(labels.end(), id_labels.begin(), id_labels.end());
    }
    return labels;
}

std::vector<RankLabel> merge(std::vector<std::vector<RankLabel>>& per_group) {
    std::size_t total = 0;
    for (const auto& v : per_group) total += v.size();
    std::vector<RankLabel> out;
    out.reserve(total);
    for (auto& v : per_group) std::move(v.begin(), v.end(), std::back_inserter(out));
    sort_labels(out);
    return out;
}

}  // namespace

std::vector<RankLabel> generate_dataset_labels(std::span<const TargetGroup> groups, const LabelGenConfig& cfg,
                                               Execution exec) {
    cfg.validate();
    std::vector<std::vector<RankLabel>> per_group(groups.size());

    if (exec == Execution::Serial) {
        for (std::size_t i = 0; i < groups.size(); ++i) per_group[i] = labels_for_group(groups[i], cfg);
        return merge(per_group);
    }

    // Exceptions may not escape an OpenMP region; keep one per group and
    // rethrow the lowest-index one so errors match the serial path.
    std::vector<std::exception_ptr> errors(groups.size());
    const auto n = static_cast<std::int64_t>(groups.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            per_group[i] = labels_for_group(groups[i], cfg);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return merge(per_group);
}

void sort_labels(std::vector<RankLabel>& labels) { std::stable_sort(labels.begin(), labels.end()); }

std::vector<TargetGroup> group_records(std::vector<AttributeRecord> records) {
    std::unordered_set<std::string> ids;
    for (const auto& r : records) {
        if (!ids.insert(r.image_id).second) throw InputError("duplicate image_id '" + r.image_id + "'");
    }

    std::map<std::string, TargetGroup> groups;
    std::set<std::string> have_target;
    for (auto& r : records) {
        auto& g = groups[r.target_id];
        if (r.is_target()) {
            g.target = std::move(r);
            have_target.insert(g.target.image_id);
        } else {
            g.swaps.push_back(std::move(r));
        }
    }

    std::vector<TargetGroup> out;
    out.reserve(groups.size());
    for (auto& [target_id, g] : groups) {
        if (!have_target.count(target_id)) throw InputError("swaps reference target '" + target_id + "' but no record has image_id == target_id");
        out.push_back(std::move(g));
    }
    return out;
}

QualityGraph build_graph(std::span<const RankLabel> labels) {
    QualityGraph g;
    if (labels.empty()) return g;
    g.target_id = labels.front().target_id;

    std::set<std::string> names;
    for (const auto& l : labels) {
        if (l.target_id != g.target_id)
            throw InputError("labels span several targets ('" + g.target_id + "', '" + l.target_id + "')");
        if (l.better_id == l.worse_id) throw InputError("self-loop label on '" + l.better_id + "'");
        names.insert(l.better_id);
        names.insert(l.worse_id);
    }
    g.nodes.assign(names.begin(), names.end());

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i], i);

    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& l : labels) edges.emplace(index.at(l.better_id), index.at(l.worse_id));
    g.edges.assign(edges.begin(), edges.end());

    if (!is_acyclic(g)) throw CycleError("quality graph for target '" + g.target_id + "' contains a cycle");
    return g;
}

namespace {

// Topological order as node indices; shorter than the node count when a cycle exists.
std::vector<std::size_t> kahn(const QualityGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& [u, v] : g.edges) {
        succ[u].push_back(v);
        ++indegree[v];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0) ready.push(i);

    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        const std::size_t u = ready.top();
        ready.pop();
        order.push_back(u);
        for (std::size_t v : succ[u])
            if (--indegree[v] == 0) ready.push(v);
    }
    return order;
}

}  // namespace

bool is_acyclic(const QualityGraph& g) { return kahn(g).size() == g.nodes.size(); }

std::vector<std::string> topological_order(const QualityGraph& g) {
    const auto order = kahn(g);
    if (order.size() != g.nodes.size())
        throw CycleError("quality graph for target '" + g.target_id + "' contains a cycle");
    std::vector<std::string> names;
    names.reserve(order.size());
    for (std::size_t i : order) names.push_back(g.nodes[i]);
    return names;
}

QualityGraph transitive_reduce(const QualityGraph& g) {
    const auto order = kahn(g);
    const std::size_t n = g.nodes.size();
    if (order.size() != n) throw InputError("transitive reduction of a cyclic graph");

    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

    std::vector<std::vector<std::size_t>> succ(n);
    for (const auto& [u, v] : g.edges) succ[u].push_back(v);

    // reach[u][v]: v reachable from u by a path of length >= 1.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    QualityGraph out{g.target_id, g.nodes, {}};

    // Reverse topological order so every successor's closure is complete. A
    // direct edge u->v is redundant iff v is reachable through an earlier
    // (in topological order) successor of u.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const std::size_t u = *it;
        auto& s = succ[u];
        std::sort(s.begin(), s.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
        for (std::size_t v : s) {
            if (reach[u][v]) continue;
            out.edges.emplace_back(u, v);
            reach[u][v] = true;
            for (std::size_t w = 0; w < n; ++w)
                if (reach[v][w]) reach[u][w] = true;
        }
    }
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "?";
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "validation") return Split::Validation;
    if (s == "test") return Split::Test;
    throw InputError("unknown split '" + s + "'");
}

std::size_t SplitAssignment::count(Split s) const {
    return static_cast<std::size_t>(
        std::count_if(by_target.begin(), by_target.end(), [s](const auto& kv) { return kv.second == s; }));
}

SplitAssignment split_targets(std::vector<std::string> target_ids, const SplitRatio& ratio, std::uint64_t seed) {
    if (target_ids.empty()) throw InputError("cannot split an empty dataset");
    const std::array<double, 3> parts{ratio.train, ratio.validation, ratio.test};
    for (double p : parts)
        if (!std::isfinite(p) || !(p > 0.0)) throw ConfigError("split ratio entries must be positive");

    std::sort(target_ids.begin(), target_ids.end());
    if (std::adjacent_find(target_ids.begin(), target_ids.end()) != target_ids.end())
        throw InputError("duplicate target id in split input");

    const std::size_t n = target_ids.size();
    const double total = parts[0] + parts[1] + parts[2];
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> frac{};
    std::size_t assigned = 0;
    for (int k = 0; k < 3; ++k) {
        const double exact = static_cast<double>(n) * parts[k] / total;
        counts[k] = static_cast<std::size_t>(std::floor(exact));
        frac[k] = exact - static_cast<double>(counts[k]);
        assigned += counts[k];
    }
    // Largest remainder; ties go to the earlier split.
    std::array<int, 3> by_frac{0, 1, 2};
    std::stable_sort(by_frac.begin(), by_frac.end(), [&](int a, int b) { return frac[a] > frac[b]; });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[by_frac[i % 3]];

    Rng rng(seed);
    rng.shuffle(target_ids);

    SplitAssignment out;
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < counts[k]; ++i, ++pos) out.by_target.emplace(target_ids[pos], static_cast<Split>(k));
    }
    return out;
}

SplitAssignment split_dataset(std::span<const TargetGroup> groups, const SplitRatio& ratio, std::uint64_t seed) {
    std::vector<std::string> ids;
    ids.reserve(groups.size());
    for (const auto& g : groups) ids.push_back(g.target.image_id);
    return split_targets(std::move(ids), ratio, seed);
}

}  // namespace swaprank
