#include "swaprank/formats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "swaprank/error.hpp"

namespace swaprank {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw InputError("field '" + field + "' " + what);
}

const json& require(const json& j, const std::string& field) {
    if (!j.is_object()) throw InputError("line is not a JSON object");
    const auto it = j.find(field);
    if (it == j.end()) field_error(field, "is missing");
    return *it;
}

std::string get_string(const json& j, const std::string& field) {
    const auto& v = require(j, field);
    if (!v.is_string()) field_error(field, "must be a string");
    return v.get<std::string>();
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) field_error(field, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) field_error(field, "must be finite");
    return x;
}

double get_number(const json& j, const std::string& field) { return as_number(require(j, field), field); }

std::vector<double> as_numbers(const json& v, const std::string& field) {
    if (!v.is_array()) field_error(field, "must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(as_number(x, field));
    return out;
}

std::vector<double> get_numbers(const json& j, const std::string& field) {
    return as_numbers(require(j, field), field);
}

// Runs `parse` on every non-blank line, prefixing errors with path:line.
template <typename Fn>
void for_each_json_line(const fs::path& path, Fn&& parse) {
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(i + 1) + ": ";
        try {
            parse(json::parse(line), i + 1);
        } catch (const json::parse_error& e) {
            throw FormatError(where + "malformed JSON: " + e.what());
        } catch (const InputError& e) {
            throw FormatError(where + e.what());
        }
    }
}

void write_jsonl(const fs::path& path, const std::vector<ordered_json>& rows) {
    std::string text;
    for (const auto& r : rows) {
        text += r.dump();
        text += '\n';
    }
    write_text(path, text);
}

}  // namespace

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path.string() + ": cannot open for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string() + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw FormatError(path.string() + ": write failed");
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

AttributeRecord record_from_json(const json& j) {
    AttributeRecord r;
    r.image_id = get_string(j, "image_id");
    r.target_id = get_string(j, "target_id");
    r.source_id = get_string(j, "source_id");
    r.method = get_string(j, "method");
    r.expression.values = get_numbers(j, "expression");
    if (r.expression.values.empty()) field_error("expression", "must not be empty");

    const auto light = get_numbers(j, "lighting");
    if (light.size() != kLightingSize)
        field_error("lighting", "must have 27 entries, got " + std::to_string(light.size()));
    std::copy(light.begin(), light.end(), r.lighting.values.begin());

    const auto pose = get_numbers(j, "pose6d");
    if (pose.size() != 6) field_error("pose6d", "must have 6 entries, got " + std::to_string(pose.size()));
    std::array<double, 6> p{};
    std::copy(pose.begin(), pose.end(), p.begin());
    r.pose6d = Rotation6D::from_flat(p);
    if (r.pose6d.degenerate()) field_error("pose6d", "is a degenerate 6D rotation");

    if (const auto it = j.find("lpips"); it != j.end() && !it->is_null()) {
        const double v = as_number(*it, "lpips");
        if (v < 0.0) field_error("lpips", "must be >= 0");
        r.lpips_to_target = v;
    }
    if (const auto it = j.find("identity"); it != j.end() && !it->is_null()) {
        r.identity = IdentityEmbedding{as_numbers(*it, "identity")};
        double sq = 0.0;
        for (double x : r.identity->values) sq += x * x;
        if (!(sq > 0.0)) field_error("identity", "must have non-zero norm");
    }
    return r;
}

ordered_json record_to_json(const AttributeRecord& r) {
    ordered_json j;
    j["image_id"] = r.image_id;
    j["target_id"] = r.target_id;
    j["source_id"] = r.source_id;
    j["method"] = r.method;
    j["expression"] = r.expression.values;
    j["lighting"] = r.lighting.values;
    j["pose6d"] = r.pose6d.flatten();
    if (r.lpips_to_target) j["lpips"] = *r.lpips_to_target;
    if (r.identity) j["identity"] = r.identity->values;
    return j;
}

std::vector<TargetGroup> load_records(const fs::path& path) {
    std::vector<AttributeRecord> records;
    std::set<std::string> ids;
    std::size_t expression_dim = 0, identity_dim = 0;
    for_each_json_line(path, [&](const json& j, std::size_t) {
        AttributeRecord r = record_from_json(j);
        if (!ids.insert(r.image_id).second) field_error("image_id", "duplicates '" + r.image_id + "'");
        if (expression_dim == 0) expression_dim = r.expression.values.size();
        if (r.expression.values.size() != expression_dim)
            field_error("expression", "has " + std::to_string(r.expression.values.size()) +
                                          " entries, earlier records have " + std::to_string(expression_dim));
        if (r.identity) {
            if (identity_dim == 0) identity_dim = r.identity->values.size();
            if (r.identity->values.size() != identity_dim)
                field_error("identity", "has " + std::to_string(r.identity->values.size()) +
                                            " entries, earlier records have " + std::to_string(identity_dim));
        }
        records.push_back(std::move(r));
    });
    try {
        return group_records(std::move(records));
    } catch (const InputError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_records(const fs::path& path, const std::vector<TargetGroup>& groups) {
    std::vector<ordered_json> rows;
    for (const auto& g : groups) {
        rows.push_back(record_to_json(g.target));
        for (const auto& s : g.swaps) rows.push_back(record_to_json(s));
    }
    write_jsonl(path, rows);
}

void save_labels(const fs::path& path, std::vector<RankLabel> labels) {
    sort_labels(labels);
    std::vector<ordered_json> rows;
    rows.reserve(labels.size());
    for (const auto& l : labels) {
        ordered_json j;
        j["target_id"] = l.target_id;
        j["better_id"] = l.better_id;
        j["worse_id"] = l.worse_id;
        j["rule"] = to_string(l.rule);
        rows.push_back(std::move(j));
    }
    write_jsonl(path, rows);
}

std::vector<RankLabel> load_labels(const fs::path& path) {
    std::vector<RankLabel> labels;
    for_each_json_line(path, [&](const json& j, std::size_t) {
        RankLabel l;
        l.target_id = get_string(j, "target_id");
        l.better_id = get_string(j, "better_id");
        l.worse_id = get_string(j, "worse_id");
        if (l.better_id == l.worse_id) field_error("worse_id", "equals better_id");
        const auto it = j.find("rule");
        if (it != j.end()) {
            if (!it->is_string()) field_error("rule", "must be a string");
            l.rule = label_rule_from_string(it->get<std::string>());
        }
        labels.push_back(std::move(l));
    });
    return labels;
}

std::vector<std::string> validate_labels(const std::vector<RankLabel>& labels, const std::vector<TargetGroup>& groups) {
    std::map<std::string, std::set<std::string>> members;
    for (const auto& g : groups) {
        auto& m = members[g.target.image_id];
        for (const auto& s : g.swaps) m.insert(s.image_id);
    }
    std::vector<std::string> warnings;
    for (const auto& l : labels) {
        const auto it = members.find(l.target_id);
        if (it == members.end()) {
            warnings.push_back("label " + l.better_id + " > " + l.worse_id + " references unknown target '" +
                               l.target_id + "'");
            continue;
        }
        for (const auto* id : {&l.better_id, &l.worse_id})
            if (!it->second.count(*id))
                warnings.push_back("label references '" + *id + "', which is not a swap of target '" + l.target_id +
                                   "'");
    }
    return warnings;
}

std::vector<MosRecord> load_mos(const fs::path& path) {
    std::vector<MosRecord> rows;
    for_each_json_line(path, [&](const json& j, std::size_t) {
        MosRecord r;
        r.item_id = get_string(j, "item_id");
        r.mos = get_number(j, "mos");
        if (j.contains("frame_scores")) r.frame_scores = get_numbers(j, "frame_scores");
        rows.push_back(std::move(r));
    });
    return rows;
}

void save_mos(const fs::path& path, const std::vector<MosRecord>& rows) {
    std::vector<ordered_json> out;
    for (const auto& r : rows) {
        ordered_json j;
        j["item_id"] = r.item_id;
        j["mos"] = r.mos;
        j["frame_scores"] = r.frame_scores;
        out.push_back(std::move(j));
    }
    write_jsonl(path, out);
}

FeatureTable load_features(const fs::path& path) {
    FeatureTable t;
    for_each_json_line(path, [&](const json& j, std::size_t) {
        const auto id = get_string(j, "image_id");
        auto f = get_numbers(j, "features");
        if (f.empty()) field_error("features", "must not be empty");
        if (t.dim == 0) t.dim = f.size();
        if (f.size() != t.dim)
            field_error("features", "has " + std::to_string(f.size()) + " entries, expected " + std::to_string(t.dim));
        if (const auto it = j.find("quality"); it != j.end() && !it->is_null()) t.quality[id] = as_number(*it, "quality");
        if (!t.features.emplace(id, std::move(f)).second) field_error("image_id", "duplicates '" + id + "'");
    });
    return t;
}

void save_features(const fs::path& path, const FeatureTable& table) {
    std::vector<ordered_json> rows;
    for (const auto& [id, f] : table.features) {
        ordered_json j;
        j["image_id"] = id;
        j["features"] = f;
        if (const auto it = table.quality.find(id); it != table.quality.end()) j["quality"] = it->second;
        rows.push_back(std::move(j));
    }
    write_jsonl(path, rows);
}

void save_split(const fs::path& path, const SplitAssignment& split) {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["counts"] = {{"train", split.count(Split::Train)},
                   {"validation", split.count(Split::Validation)},
                   {"test", split.count(Split::Test)}};
    ordered_json assignments = ordered_json::object();
    for (const auto& [id, s] : split.by_target) assignments[id] = to_string(s);
    j["assignments"] = std::move(assignments);
    write_json(path, j);
}

SplitAssignment load_split(const fs::path& path) {
    SplitAssignment split;
    try {
        const auto j = json::parse(read_text(path));
        const auto& a = require(j, "assignments");
        if (!a.is_object()) field_error("assignments", "must be an object");
        for (const auto& [id, v] : a.items()) {
            if (!v.is_string()) field_error("assignments." + id, "must be a split name");
            split.by_target.emplace(id, split_from_string(v.get<std::string>()));
        }
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": malformed JSON: " + e.what());
    } catch (const InputError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return split;
}

std::vector<SwapLossComponents> load_swap_components(const fs::path& path) {
    std::vector<SwapLossComponents> rows;
    for_each_json_line(path, [&](const json& j, std::size_t) {
        SwapLossComponents c;
        c.l_adv = get_number(j, "l_adv");
        c.m_target = get_number(j, "m_target");
        c.m_swap = get_number(j, "m_swap");
        c.z_source.values = get_numbers(j, "z_source");
        c.z_swap.values = get_numbers(j, "z_swap");
        c.pixel_l2_sq = get_number(j, "pixel_l2_sq");
        if (c.pixel_l2_sq < 0.0) field_error("pixel_l2_sq", "must be >= 0");
        const auto& self = require(j, "self_swap");
        if (!self.is_boolean()) field_error("self_swap", "must be a boolean");
        c.is_self_swap = self.get<bool>();
        rows.push_back(std::move(c));
    });
    return rows;
}

namespace {

// Qualitative palette; methods get colours in sorted-name order.
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string to_dot(const QualityGraph& graph, const std::map<std::string, std::string>& method_of, bool reduce) {
    const QualityGraph g = reduce ? transitive_reduce(graph) : graph;
    if (!reduce && !is_acyclic(g)) throw CycleError("cannot export a cyclic quality graph");

    std::set<std::string> methods;
    const auto method = [&](const std::string& id) {
        const auto it = method_of.find(id);
        return it == method_of.end() ? std::string("unknown") : it->second;
    };
    for (const auto& n : g.nodes) methods.insert(method(n));
    std::map<std::string, std::string> colour;
    std::size_t k = 0;
    for (const auto& m : methods) colour[m] = kPalette[k++ % std::size(kPalette)];

    std::ostringstream out;
    out << "digraph " << quoted(g.target_id.empty() ? "quality" : g.target_id) << " {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=box, style=filled, fontcolor=white];\n";
    for (const auto& n : g.nodes) {
        const auto m = method(n);
        out << "  " << quoted(n) << " [fillcolor=" << quoted(colour[m]) << ", label=" << quoted(n + " (" + m + ")") << "];\n";
    }
    for (const auto& [u, v] : g.edges) out << "  " << quoted(g.nodes[u]) << " -> " << quoted(g.nodes[v]) << ";\n";
    out << "}\n";
    return out.str();
}

void export_dot(const QualityGraph& graph, const std::map<std::string, std::string>& method_of, bool reduce,
                const fs::path& path) {
    write_text(path, to_dot(graph, method_of, reduce));
}

}  // namespace swaprank
