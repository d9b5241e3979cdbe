#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "swaprank/attrcore.hpp"
#include "swaprank/labelgen.hpp"
#include "swaprank/swaploss.hpp"

namespace swaprank {

namespace fs = std::filesystem;

inline constexpr int kReportSchemaVersion = 1;

// ---- attribute records (JSON Lines) ----
//
// One object per image:
//   {"image_id", "target_id", "source_id", "method", "expression": [..],
//    "lighting": [27 numbers], "pose6d": [6 numbers], "lpips"?: number, "identity"?: [..]}
// A record with image_id == target_id is the target itself.

AttributeRecord record_from_json(const nlohmann::json& j);  // throws InputError naming the field
nlohmann::ordered_json record_to_json(const AttributeRecord& r);

// Reads, validates and groups records. Errors carry "path:line: field ...".
// Expression (and identity) dimensions must agree across the file.
std::vector<TargetGroup> load_records(const fs::path& path);
void save_records(const fs::path& path, const std::vector<TargetGroup>& groups);

// ---- rank labels (JSON Lines) ----
//   {"target_id", "better_id", "worse_id", "rule": "attribute"|"identity"}
// Written in canonical order (target_id, better_id, worse_id, rule).
void save_labels(const fs::path& path, std::vector<RankLabel> labels);
std::vector<RankLabel> load_labels(const fs::path& path);

// Labels whose target or images are not in `groups`; one message per problem.
std::vector<std::string> validate_labels(const std::vector<RankLabel>& labels, const std::vector<TargetGroup>& groups);

// ---- MOS tables (JSON Lines) ----
//   {"item_id", "mos", "frame_scores"?: [..]}   (frame scores may be empty or absent)
struct MosRecord {
    std::string item_id;
    double mos = 0.0;
    std::vector<double> frame_scores;
};
std::vector<MosRecord> load_mos(const fs::path& path);
void save_mos(const fs::path& path, const std::vector<MosRecord>& rows);

// ---- feature vectors (JSON Lines) ----
//   {"image_id", "features": [..], "quality"?: number}
struct FeatureTable {
    std::map<std::string, std::vector<double>> features;
    std::map<std::string, double> quality;  // optional latent quality, for synthetic data
    std::size_t dim = 0;
};
FeatureTable load_features(const fs::path& path);
void save_features(const fs::path& path, const FeatureTable& table);

// ---- split assignment (JSON) ----
void save_split(const fs::path& path, const SplitAssignment& split);
SplitAssignment load_split(const fs::path& path);

// ---- swap-loss components (JSON Lines) ----
//   {"l_adv", "m_target", "m_swap", "z_source": [..], "z_swap": [..], "pixel_l2_sq", "self_swap": bool}
std::vector<SwapLossComponents> load_swap_components(const fs::path& path);

// ---- DOT export ----
// Nodes are filled by method tag (unknown images get "unknown"); edges point
// better -> worse. With `reduce`, the transitive reduction is drawn.
// Throws CycleError/InputError on a cyclic graph.
std::string to_dot(const QualityGraph& graph, const std::map<std::string, std::string>& method_of, bool reduce);
void export_dot(const QualityGraph& graph, const std::map<std::string, std::string>& method_of, bool reduce,
                const fs::path& path);

// ---- generic helpers ----
std::vector<std::string> read_lines(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);
// Pretty JSON with a trailing newline.
void write_json(const fs::path& path, const nlohmann::ordered_json& j);

}  // namespace swaprank
