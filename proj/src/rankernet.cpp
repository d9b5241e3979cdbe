#include "swaprank/rankernet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "swaprank/checksum.hpp"
#include "swaprank/error.hpp"
#include "swaprank/rng.hpp"

namespace swaprank {

RankerModel::RankerModel(std::vector<std::size_t> layer_dims, std::vector<ParamBlock> blocks)
    : dims_(std::move(layer_dims)), blocks_(std::move(blocks)) {
    if (dims_.size() < 2) throw InputError("ranker needs at least an input and an output dimension");
    if (dims_.back() != 1) throw InputError("ranker output dimension must be 1");
    for (std::size_t d : dims_)
        if (d == 0) throw InputError("ranker layer dimensions must be positive");
    if (blocks_.size() != dims_.size() - 1)
        throw InputError("ranker has " + std::to_string(blocks_.size()) + " parameter blocks for " +
                         std::to_string(dims_.size() - 1) + " layers");
    for (std::size_t l = 0; l < blocks_.size(); ++l) {
        if (blocks_[l].weights.size() != dims_[l] * dims_[l + 1] || blocks_[l].bias.size() != dims_[l + 1])
            throw InputError("ranker layer " + std::to_string(l) + " has inconsistent shape");
        for (double w : blocks_[l].weights)
            if (!std::isfinite(w)) throw InputError("ranker layer " + std::to_string(l) + " has non-finite weights");
        for (double b : blocks_[l].bias)
            if (!std::isfinite(b)) throw InputError("ranker layer " + std::to_string(l) + " has non-finite biases");
    }
}

std::size_t RankerModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.weights.size() + b.bias.size();
    return n;
}

std::string RankerModel::checksum() const {
    Fnv1a h;
    for (const auto& b : blocks_) {
        h.update(b.weights);
        h.update(b.bias);
    }
    return h.hex();
}

AdamState AdamState::zeros_like(const RankerModel& model) {
    AdamState s;
    s.first_moment = zero_gradient(model);
    s.second_moment = zero_gradient(model);
    return s;
}

void TrainConfig::validate() const {
    if (!std::isfinite(epsilon) || !(epsilon > 0.0)) throw ConfigError("margin epsilon must be > 0");
    if (!std::isfinite(learning_rate) || learning_rate < 0.0) throw ConfigError("learning rate must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must be in [0, 1)");
    if (!std::isfinite(weight_decay) || weight_decay < 0.0 || weight_decay >= 1.0)
        throw ConfigError("weight decay must be in [0, 1)");
    if (!(adam_eps > 0.0)) throw ConfigError("adam eps must be > 0");
    if (batch_size == 0) throw ConfigError("batch size must be positive");
}

RankerModel init_model(std::size_t input_dim, std::span<const std::size_t> hidden_dims, std::uint64_t seed) {
    if (input_dim == 0) throw InputError("ranker input dimension must be positive");
    std::vector<std::size_t> dims{input_dim};
    dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
    dims.push_back(1);

    Rng rng(seed);
    std::vector<ParamBlock> blocks;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        if (dims[l + 1] == 0) throw InputError("ranker hidden dimensions must be positive");
        ParamBlock b;
        const double scale = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        b.weights.resize(dims[l] * dims[l + 1]);
        for (double& w : b.weights) w = scale * rng.normal();
        b.bias.assign(dims[l + 1], 0.0);
        blocks.push_back(std::move(b));
    }
    return RankerModel(std::move(dims), std::move(blocks));
}

namespace {

// Pre-activations of every layer plus the input, kept for backprop.
struct ForwardTrace {
    std::vector<std::vector<double>> pre;  // pre[l]: output of layer l before the rectifier
    double output = 0.0;
};

inline double relu(double z) { return z > 0.0 ? z : 0.0; }

ForwardTrace forward(const RankerModel& model, std::span<const double> x) {
    ForwardTrace t;
    t.pre.resize(model.layer_count());
    std::vector<double> act(x.begin(), x.end());
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        const auto& b = model.blocks()[l];
        const std::size_t in = model.in_dim(l), out = model.out_dim(l);
        auto& z = t.pre[l];
        z.assign(b.bias.begin(), b.bias.end());
        for (std::size_t o = 0; o < out; ++o) {
            const double* w = b.weights.data() + o * in;
            double acc = 0.0;
            for (std::size_t i = 0; i < in; ++i) acc += w[i] * act[i];
            z[o] += acc;
        }
        const bool last = l + 1 == model.layer_count();
        act.resize(out);
        for (std::size_t o = 0; o < out; ++o) act[o] = last ? z[o] : relu(z[o]);
    }
    t.output = act[0];
    return t;
}

void check_dim(const RankerModel& model, std::span<const double> x) {
    if (x.size() != model.input_dim())
        throw InputError("feature dimension " + std::to_string(x.size()) + " does not match model input " +
                         std::to_string(model.input_dim()));
}

// grad += scale * d f(x) / d theta.
void backprop(const RankerModel& model, std::span<const double> x, const ForwardTrace& t, double scale,
              Gradient& grad) {
    std::vector<double> delta{scale};
    for (std::size_t l = model.layer_count(); l-- > 0;) {
        const auto& b = model.blocks()[l];
        const std::size_t in = model.in_dim(l), out = model.out_dim(l);
        auto& g = grad[l];
        for (std::size_t o = 0; o < out; ++o) {
            if (delta[o] == 0.0) continue;
            g.bias[o] += delta[o];
            double* gw = g.weights.data() + o * in;
            if (l == 0) {
                for (std::size_t i = 0; i < in; ++i) gw[i] += delta[o] * x[i];
            } else {
                const auto& prev = t.pre[l - 1];
                for (std::size_t i = 0; i < in; ++i) gw[i] += delta[o] * relu(prev[i]);
            }
        }
        if (l == 0) break;
        std::vector<double> next(in, 0.0);
        const auto& prev = t.pre[l - 1];
        for (std::size_t o = 0; o < out; ++o) {
            if (delta[o] == 0.0) continue;
            const double* w = b.weights.data() + o * in;
            for (std::size_t i = 0; i < in; ++i) next[i] += w[i] * delta[o];
        }
        for (std::size_t i = 0; i < in; ++i)
            if (!(prev[i] > 0.0)) next[i] = 0.0;
        delta = std::move(next);
    }
}

// Adds the pair's gradient (scaled by `scale`) into `grad`; returns the pair loss.
double accumulate_pair(const RankerModel& model, std::span<const double> better, std::span<const double> worse,
                       double epsilon, double scale, Gradient& grad) {
    const ForwardTrace tb = forward(model, better);
    const ForwardTrace tw = forward(model, worse);
    const double loss = margin_rank_loss(tb.output, tw.output, epsilon);
    if (loss > 0.0) {
        backprop(model, worse, tw, scale, grad);
        backprop(model, better, tb, -scale, grad);
    }
    return loss;
}

void add_into(Gradient& acc, const Gradient& g) {
    for (std::size_t l = 0; l < acc.size(); ++l) {
        for (std::size_t i = 0; i < acc[l].weights.size(); ++i) acc[l].weights[i] += g[l].weights[i];
        for (std::size_t i = 0; i < acc[l].bias.size(); ++i) acc[l].bias[i] += g[l].bias[i];
    }
}

void scale_by(Gradient& g, double s) {
    for (auto& b : g) {
        for (double& w : b.weights) w *= s;
        for (double& x : b.bias) x *= s;
    }
}

}  // namespace

double score(const RankerModel& model, std::span<const double> x) {
    check_dim(model, x);
    return forward(model, x).output;
}

double margin_rank_loss(double s_better, double s_worse, double epsilon) {
    if (!(epsilon > 0.0)) throw ConfigError("margin epsilon must be > 0");
    return std::max(0.0, s_worse - s_better + epsilon);
}

Gradient zero_gradient(const RankerModel& model) {
    Gradient g(model.layer_count());
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        g[l].weights.assign(model.blocks()[l].weights.size(), 0.0);
        g[l].bias.assign(model.blocks()[l].bias.size(), 0.0);
    }
    return g;
}

Gradient pair_gradient(const RankerModel& model, std::span<const double> better, std::span<const double> worse,
                       double epsilon) {
    check_dim(model, better);
    check_dim(model, worse);
    Gradient g = zero_gradient(model);
    accumulate_pair(model, better, worse, epsilon, 1.0, g);
    return g;
}

BatchResult batch_gradient(const RankerModel& model, std::span<const FeaturePair> pairs,
                           std::span<const std::size_t> indices, double epsilon, Execution exec) {
    if (indices.empty()) throw InputError("empty batch");
    if (!(epsilon > 0.0)) throw ConfigError("margin epsilon must be > 0");
    for (std::size_t i : indices) {
        if (i >= pairs.size()) throw InputError("batch index out of range");
        check_dim(model, pairs[i].better);
        check_dim(model, pairs[i].worse);
    }

    BatchResult result;
    result.gradient = zero_gradient(model);
    const double inv = 1.0 / static_cast<double>(indices.size());

    if (exec == Execution::Serial) {
        double loss_sum = 0.0;
        for (std::size_t i : indices) {
            Gradient g = zero_gradient(model);
            loss_sum += accumulate_pair(model, pairs[i].better, pairs[i].worse, epsilon, 1.0, g);
            add_into(result.gradient, g);
        }
        scale_by(result.gradient, inv);
        result.mean_loss = loss_sum * inv;
        return result;
    }

    const auto n = static_cast<std::int64_t>(indices.size());
    std::vector<Gradient> per_pair(indices.size());
    std::vector<double> losses(indices.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const auto& p = pairs[indices[k]];
        per_pair[k] = zero_gradient(model);
        losses[k] = accumulate_pair(model, p.better, p.worse, epsilon, 1.0, per_pair[k]);
    }
    // Fixed-order reduction.
    double loss_sum = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        add_into(result.gradient, per_pair[k]);
        loss_sum += losses[k];
    }
    scale_by(result.gradient, inv);
    result.mean_loss = loss_sum * inv;
    return result;
}

void adam_step(RankerModel& model, const Gradient& grad, AdamState& state, const TrainConfig& cfg) {
    const std::size_t layers = model.layer_count();
    if (grad.size() != layers || state.first_moment.size() != layers || state.second_moment.size() != layers)
        throw InternalError("adam_step: gradient/state layer count does not match the model");
    for (std::size_t l = 0; l < layers; ++l) {
        const auto& p = model.blocks()[l];
        for (const ParamBlock* blk : std::array<const ParamBlock*, 3>{&grad[l], &state.first_moment[l], &state.second_moment[l]}) {
            if (blk->weights.size() != p.weights.size() || blk->bias.size() != p.bias.size())
                throw InternalError("adam_step: shape mismatch in layer " + std::to_string(l));
        }
    }

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(cfg.beta1, t);
    const double correction2 = 1.0 - std::pow(cfg.beta2, t);
    const double decay = 1.0 - cfg.weight_decay;

    const auto update = [&](std::vector<double>& theta, const std::vector<double>& g, std::vector<double>& m,
                            std::vector<double>& v) {
        for (std::size_t i = 0; i < theta.size(); ++i) {
            theta[i] *= decay;
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double m_hat = m[i] / correction1;
            const double v_hat = v[i] / correction2;
            theta[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
        }
    };
    for (std::size_t l = 0; l < layers; ++l) {
        auto& p = model.blocks()[l];
        update(p.weights, grad[l].weights, state.first_moment[l].weights, state.second_moment[l].weights);
        update(p.bias, grad[l].bias, state.first_moment[l].bias, state.second_moment[l].bias);
    }
}

double pairwise_accuracy(const RankerModel& model, std::span<const FeaturePair> pairs) {
    if (pairs.empty()) throw InputError("pairwise accuracy of an empty pair list");
    std::size_t correct = 0;
    for (const auto& p : pairs)
        if (score(model, p.better) > score(model, p.worse)) ++correct;
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

TrainReport train(RankerModel& model, std::span<const FeaturePair> pairs, const TrainConfig& cfg,
                  std::span<const FeaturePair> holdout, AdamState* state) {
    cfg.validate();
    if (pairs.empty()) throw InputError("empty training set");
    for (const auto& p : pairs) {
        check_dim(model, p.better);
        check_dim(model, p.worse);
    }
    for (const auto& p : holdout) {
        check_dim(model, p.better);
        check_dim(model, p.worse);
    }

    AdamState local = AdamState::zeros_like(model);
    AdamState& adam = state ? *state : local;
    if (adam.first_moment.empty()) adam = AdamState::zeros_like(model);

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainReport report;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, order.size() - start);
            const std::span<const std::size_t> batch(order.data() + start, len);
            BatchResult r = batch_gradient(model, pairs, batch, cfg.epsilon, cfg.batch_execution);
            loss_sum += r.mean_loss * static_cast<double>(len);
            adam_step(model, r.gradient, adam, cfg);
        }
        report.epoch_loss.push_back(loss_sum / static_cast<double>(pairs.size()));
        if (!holdout.empty()) report.holdout_accuracy.push_back(pairwise_accuracy(model, holdout));
    }
    report.parameter_checksum = model.checksum();
    return report;
}

}  // namespace swaprank
