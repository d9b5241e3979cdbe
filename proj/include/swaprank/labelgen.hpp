#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swaprank/attrcore.hpp"

namespace swaprank {

enum class LabelRule { Attribute, Identity };

const char* to_string(LabelRule rule);
LabelRule label_rule_from_string(const std::string& s);

// "better_id has higher quality than worse_id", both swaps of target_id.
struct RankLabel {
    std::string target_id;
    std::string better_id;
    std::string worse_id;
    LabelRule rule = LabelRule::Attribute;

    // Lexicographic on (target_id, better_id, worse_id, rule): the canonical output order.
    friend auto operator<=>(const RankLabel&, const RankLabel&) = default;
};

struct TargetGroup {
    AttributeRecord target;
    std::vector<AttributeRecord> swaps;
};

// Dominance margins and attribute toggles. A pair is labelled only when every
// enabled attribute satisfies loss_A + delta < loss_B.
struct LabelGenConfig {
    double delta_exp = 0.0;
    double delta_light = 0.0;
    double delta_pose = 0.0;
    double delta_lpips = 0.0;
    double delta_id = 0.0;
    bool use_expression = true;
    bool use_lighting = true;
    bool use_pose = true;
    bool use_lpips = true;
    bool use_identity = false;
    PoseCosine pose_mode = PoseCosine::Lifted;

    // Throws ConfigError on negative/non-finite margins or when no
    // attribute-rule condition is enabled.
    void validate() const;
};

// Attribute-rule labels for one group, sorted by (better_id, worse_id).
std::vector<RankLabel> generate_labels(const TargetGroup& group, const LabelGenConfig& cfg);

// Identity-rule labels: a beats b when L_id(a, ref) + delta_id < L_id(b, ref),
// with the group's target as the shared reference.
std::vector<RankLabel> generate_id_labels(const TargetGroup& group, const LabelGenConfig& cfg);

enum class Execution { Serial, Parallel };

// All groups: attribute labels, plus identity labels when cfg.use_identity.
// Output is sorted canonically; Serial and Parallel produce identical results.
std::vector<RankLabel> generate_dataset_labels(std::span<const TargetGroup> groups, const LabelGenConfig& cfg,
                                               Execution exec = Execution::Parallel);

void sort_labels(std::vector<RankLabel>& labels);

// Groups records by target_id. Records with image_id == target_id are targets.
// Throws InputError on duplicate image ids or swaps without a target record.
// Groups come back ordered by target_id, swaps in input order.
std::vector<TargetGroup> group_records(std::vector<AttributeRecord> records);

// Per-target dominance DAG. Nodes are sorted; edges are (better, worse) index pairs.
struct QualityGraph {
    std::string target_id;
    std::vector<std::string> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return edges.size(); }
};

// One node per mentioned image, one edge per distinct (better, worse) pair.
// Throws InputError if labels span several targets and CycleError on a cycle.
QualityGraph build_graph(std::span<const RankLabel> labels);

bool is_acyclic(const QualityGraph& g);

// Kahn's algorithm, smallest node name first among ready nodes. Throws CycleError.
std::vector<std::string> topological_order(const QualityGraph& g);

// Minimal edge set with the same reachability. Throws InputError on cyclic input.
QualityGraph transitive_reduce(const QualityGraph& g);

enum class Split { Train, Validation, Test };

const char* to_string(Split s);
Split split_from_string(const std::string& s);

struct SplitRatio {
    double train = 7.0;
    double validation = 2.0;
    double test = 1.0;
};

struct SplitAssignment {
    std::map<std::string, Split> by_target;

    std::size_t count(Split s) const;
    bool contains(const std::string& target_id) const { return by_target.count(target_id) != 0; }
    Split at(const std::string& target_id) const { return by_target.at(target_id); }
};

// Whole target groups go to one split. Counts use largest remainders, so each
// is within one group of the exact proportion. Pure in (ids, ratio, seed).
SplitAssignment split_dataset(std::span<const TargetGroup> groups, const SplitRatio& ratio, std::uint64_t seed);
SplitAssignment split_targets(std::vector<std::string> target_ids, const SplitRatio& ratio, std::uint64_t seed);

}  // namespace swaprank
