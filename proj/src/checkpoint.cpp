#include "swaprank/checkpoint.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "swaprank/checksum.hpp"
#include "swaprank/error.hpp"
#include "swaprank/formats.hpp"

namespace swaprank {

namespace {

constexpr const char* kMagic = "swaprank-checkpoint";

std::string fmt(double x) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw InternalError("cannot format number");
    return std::string(buf, end);
}

void put_array(std::string& out, const std::string& name, std::size_t layer, const std::vector<double>& values) {
    out += name + ' ' + std::to_string(layer) + ' ' + std::to_string(values.size());
    for (double v : values) {
        out += ' ';
        out += fmt(v);
    }
    out += '\n';
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(t);
    return out;
}

template <typename T>
T parse_num(const std::string& tok, const std::string& where) {
    T v{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw FormatError(where + ": cannot parse number '" + tok + "'");
    return v;
}

}  // namespace

std::string checkpoint_to_string(const RankerModel& model, const AdamState& adam, const TrainConfig& cfg) {
    std::string out;
    out += std::string(kMagic) + '\n';
    out += "format_version " + std::to_string(kCheckpointVersion) + '\n';
    out += "layer_dims";
    for (std::size_t d : model.layer_dims()) out += ' ' + std::to_string(d);
    out += '\n';
    out += "config epsilon " + fmt(cfg.epsilon) + '\n';
    out += "config learning_rate " + fmt(cfg.learning_rate) + '\n';
    out += "config beta1 " + fmt(cfg.beta1) + '\n';
    out += "config beta2 " + fmt(cfg.beta2) + '\n';
    out += "config weight_decay " + fmt(cfg.weight_decay) + '\n';
    out += "config adam_eps " + fmt(cfg.adam_eps) + '\n';
    out += "config batch_size " + std::to_string(cfg.batch_size) + '\n';
    out += "config epochs " + std::to_string(cfg.epochs) + '\n';
    out += "config seed " + std::to_string(cfg.seed) + '\n';
    out += "adam_step " + std::to_string(adam.step) + '\n';

    const bool have_moments = adam.first_moment.size() == model.layer_count();
    const Gradient zeros = zero_gradient(model);
    const auto& m = have_moments ? adam.first_moment : zeros;
    const auto& v = have_moments ? adam.second_moment : zeros;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        put_array(out, "weights", l, model.blocks()[l].weights);
        put_array(out, "bias", l, model.blocks()[l].bias);
    }
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        put_array(out, "adam_m_weights", l, m[l].weights);
        put_array(out, "adam_m_bias", l, m[l].bias);
        put_array(out, "adam_v_weights", l, v[l].weights);
        put_array(out, "adam_v_bias", l, v[l].bias);
    }

    Fnv1a h;
    h.update(out);
    out += "checksum fnv1a64 " + h.hex() + '\n';
    return out;
}

Checkpoint checkpoint_from_string(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;

    if (!std::getline(in, line) || line != kMagic) throw FormatError(source + ": not a swaprank checkpoint");
    if (!std::getline(in, line)) throw FormatError(source + ": truncated checkpoint");
    {
        const auto t = tokens(line);
        if (t.size() != 2 || t[0] != "format_version") throw FormatError(source + ": missing format_version");
        const int version = parse_num<int>(t[1], source);
        if (version != kCheckpointVersion)
            throw VersionError(source + ": checkpoint format version " + std::to_string(version) +
                               ", this build reads version " + std::to_string(kCheckpointVersion));
    }

    // Checksum line is the last non-empty line; it covers every byte before it.
    const auto pos = text.rfind("checksum fnv1a64 ");
    if (pos == std::string::npos || (pos != 0 && text[pos - 1] != '\n'))
        throw FormatError(source + ": missing checksum line");
    {
        const auto t = tokens(text.substr(pos));
        Fnv1a h;
        h.update(std::string_view(text).substr(0, pos));
        if (t.size() != 3 || t[2] != h.hex())
            throw ChecksumError(source + ": checksum mismatch (file is corrupted or was edited)");
    }

    std::vector<std::size_t> dims;
    TrainConfig cfg;
    std::uint64_t step = 0;
    std::vector<ParamBlock> params, m, v;

    const auto block_for = [&](std::vector<ParamBlock>& blocks, std::size_t layer, const std::string& where) -> ParamBlock& {
        if (dims.size() < 2) throw FormatError(where + ": arrays before layer_dims");
        if (layer + 1 >= dims.size())
            throw ShapeError(where + ": layer " + std::to_string(layer) + " beyond declared layer_dims");
        if (blocks.empty()) blocks.resize(dims.size() - 1);
        return blocks[layer];
    };

    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no);
        const auto t = tokens(line);
        if (t.empty()) continue;
        const auto& key = t[0];
        if (key == "checksum") break;
        if (key == "layer_dims") {
            for (std::size_t i = 1; i < t.size(); ++i) dims.push_back(parse_num<std::size_t>(t[i], where));
            if (dims.size() < 2 || dims.back() != 1) throw ShapeError(where + ": invalid layer_dims");
        } else if (key == "config") {
            if (t.size() != 3) throw FormatError(where + ": malformed config line");
            const auto& name = t[1];
            if (name == "epsilon") cfg.epsilon = parse_num<double>(t[2], where);
            else if (name == "learning_rate") cfg.learning_rate = parse_num<double>(t[2], where);
            else if (name == "beta1") cfg.beta1 = parse_num<double>(t[2], where);
            else if (name == "beta2") cfg.beta2 = parse_num<double>(t[2], where);
            else if (name == "weight_decay") cfg.weight_decay = parse_num<double>(t[2], where);
            else if (name == "adam_eps") cfg.adam_eps = parse_num<double>(t[2], where);
            else if (name == "batch_size") cfg.batch_size = parse_num<std::size_t>(t[2], where);
            else if (name == "epochs") cfg.epochs = parse_num<std::size_t>(t[2], where);
            else if (name == "seed") cfg.seed = parse_num<std::uint64_t>(t[2], where);
            else throw FormatError(where + ": unknown config key '" + name + "'");
        } else if (key == "adam_step") {
            if (t.size() != 2) throw FormatError(where + ": malformed adam_step line");
            step = parse_num<std::uint64_t>(t[1], where);
        } else {
            std::vector<ParamBlock>* target = nullptr;
            bool is_bias = false;
            if (key == "weights" || key == "bias") target = &params;
            else if (key == "adam_m_weights" || key == "adam_m_bias") target = &m;
            else if (key == "adam_v_weights" || key == "adam_v_bias") target = &v;
            else throw FormatError(where + ": unknown section '" + key + "'");
            is_bias = key.ends_with("bias");
            if (t.size() < 3) throw FormatError(where + ": malformed array header");
            const auto layer = parse_num<std::size_t>(t[1], where);
            const auto length = parse_num<std::size_t>(t[2], where);
            if (t.size() - 3 != length)
                throw FormatError(where + ": declared length " + std::to_string(length) + " but found " +
                                  std::to_string(t.size() - 3) + " values");
            ParamBlock& b = block_for(*target, layer, where);
            const std::size_t expected = is_bias ? dims[layer + 1] : dims[layer] * dims[layer + 1];
            if (length != expected)
                throw ShapeError(where + ": " + key + " of layer " + std::to_string(layer) + " has " +
                                 std::to_string(length) + " values, layer_dims imply " + std::to_string(expected));
            auto& dst = is_bias ? b.bias : b.weights;
            dst.resize(length);
            for (std::size_t i = 0; i < length; ++i) dst[i] = parse_num<double>(t[3 + i], where);
        }
    }

    const std::size_t layers = dims.size() < 2 ? 0 : dims.size() - 1;
    if (layers == 0) throw FormatError(source + ": missing layer_dims");
    for (const auto* blocks : {&params, &m, &v}) {
        if (blocks->size() != layers) throw ShapeError(source + ": missing parameter arrays");
        for (std::size_t l = 0; l < layers; ++l)
            if ((*blocks)[l].weights.size() != dims[l] * dims[l + 1] || (*blocks)[l].bias.size() != dims[l + 1])
                throw ShapeError(source + ": layer " + std::to_string(l) + " arrays are incomplete");
    }

    Checkpoint cp;
    try {
        cp.model = RankerModel(dims, std::move(params));
    } catch (const InputError& e) {
        throw ShapeError(source + ": " + e.what());
    }
    cp.adam.first_moment = std::move(m);
    cp.adam.second_moment = std::move(v);
    cp.adam.step = step;
    cp.config = cfg;
    return cp;
}

void save_checkpoint(const std::filesystem::path& path, const RankerModel& model, const AdamState& adam,
                     const TrainConfig& cfg) {
    write_text(path, checkpoint_to_string(model, adam, cfg));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return checkpoint_from_string(read_text(path), path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::span<const std::size_t> expected_dims) {
    Checkpoint cp = load_checkpoint(path);
    const auto& dims = cp.model.layer_dims();
    if (!std::equal(dims.begin(), dims.end(), expected_dims.begin(), expected_dims.end())) {
        std::string have, want;
        for (auto d : dims) have += ' ' + std::to_string(d);
        for (auto d : expected_dims) want += ' ' + std::to_string(d);
        throw ShapeError(path.string() + ": checkpoint layer_dims [" + have + " ] do not match expected [" + want +
                         " ]");
    }
    return cp;
}

}  // namespace swaprank
