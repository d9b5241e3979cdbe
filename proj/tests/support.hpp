#pragma once

// Random generators and independent oracles shared by the test suites. Oracles
// here deliberately avoid the library's code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "swaprank/attrcore.hpp"
#include "swaprank/labelgen.hpp"
#include "swaprank/rankernet.hpp"
#include "swaprank/rng.hpp"

namespace swaprank::testing {

inline Rotation6D random_6d(Rng& rng, double min_gap = 1e-6) {
    for (;;) {
        Rotation6D r{{rng.normal(), rng.normal(), rng.normal()}, {rng.normal(), rng.normal(), rng.normal()}};
        // Keep inputs well away from degeneracy.
        const double n1 = norm(r.a1);
        const double c = dot(r.a1, r.a2) / n1;
        const double perp2 = dot(r.a2, r.a2) - c * c;
        if (n1 > min_gap && perp2 > min_gap * min_gap) return r;
    }
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * rng.normal();
    return v;
}

// Oracle frame via cross products: b3 = a1 x a2 / |.|, b2 = b3 x b1. Same
// rotation as Gram-Schmidt, different arithmetic.
inline std::array<double, 9> oracle_lift(const Rotation6D& r) {
    const auto nrm = [](std::array<double, 3> v) {
        const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        return std::array<double, 3>{v[0] / n, v[1] / n, v[2] / n};
    };
    const auto crs = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return std::array<double, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    };
    const auto b1 = nrm(r.a1);
    const auto b3 = nrm(crs(r.a1, r.a2));
    const auto b2 = crs(b3, b1);
    return {b1[0], b1[1], b1[2], b2[0], b2[1], b2[2], b3[0], b3[1], b3[2]};
}

inline double oracle_mse(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += (long double)(a[i] - b[i]) * (a[i] - b[i]);
    return static_cast<double>(s / a.size());
}

inline double oracle_cos_distance(const std::vector<double>& a, const std::vector<double>& b) {
    long double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += (long double)a[i] * b[i];
        aa += (long double)a[i] * a[i];
        bb += (long double)b[i] * b[i];
    }
    return static_cast<double>(1.0L - ab / std::sqrt(aa * bb));
}

inline double oracle_pose_loss(const Rotation6D& t, const Rotation6D& s) {
    const auto a = oracle_lift(t), b = oracle_lift(s);
    return oracle_cos_distance({a.begin(), a.end()}, {b.begin(), b.end()});
}

// A target group whose swaps degrade by a per-swap level plus per-attribute
// jitter, so some pairs are comparable and others are not.
inline TargetGroup random_group(Rng& rng, const std::string& target_id, std::size_t n_swaps,
                                std::size_t exp_dim = 12, bool with_identity = true) {
    TargetGroup g;
    auto& t = g.target;
    t.image_id = t.target_id = t.source_id = target_id;
    t.method = "real";
    t.expression.values = random_vector(rng, exp_dim);
    for (double& x : t.lighting.values) x = rng.normal();
    t.pose6d = random_6d(rng);
    if (with_identity) t.identity = IdentityEmbedding{random_vector(rng, 8)};

    static const char* methods[] = {"simswap", "faceshifter", "infoswap"};
    for (std::size_t i = 0; i < n_swaps; ++i) {
        AttributeRecord s;
        s.image_id = target_id + "_s" + std::to_string(i);
        s.target_id = target_id;
        s.source_id = i == 0 ? target_id : "src" + std::to_string(i);
        s.method = methods[i % 3];
        const double level = rng.uniform(0.05, 1.0);
        const auto jitter = [&] { return level * rng.uniform(0.6, 1.4); };
        const double e = jitter(), l = jitter(), p = jitter();
        s.expression.values = t.expression.values;
        for (double& x : s.expression.values) x += e * rng.normal();
        s.lighting = t.lighting;
        for (double& x : s.lighting.values) x += l * rng.normal();
        s.pose6d = t.pose6d;
        for (double& x : s.pose6d.a1) x += 0.3 * p * rng.normal();
        for (double& x : s.pose6d.a2) x += 0.3 * p * rng.normal();
        s.lpips_to_target = jitter() * 0.5;
        if (with_identity) {
            s.identity = t.identity;
            for (double& x : s.identity->values) x += jitter() * rng.normal();
        }
        g.swaps.push_back(std::move(s));
    }
    return g;
}

using LabelKey = std::tuple<std::string, std::string, std::string>;

// Dominance re-checked for every ordered pair with oracle losses.
inline std::set<LabelKey> oracle_labels(const TargetGroup& g, const LabelGenConfig& cfg) {
    struct L { double e, l, p, lp; };
    std::vector<L> losses;
    for (const auto& s : g.swaps) {
        losses.push_back({oracle_mse(g.target.expression.values, s.expression.values),
                          oracle_mse({g.target.lighting.values.begin(), g.target.lighting.values.end()},
                                     {s.lighting.values.begin(), s.lighting.values.end()}),
                          oracle_pose_loss(g.target.pose6d, s.pose6d), s.lpips_to_target.value_or(0.0)});
    }
    std::set<LabelKey> out;
    for (std::size_t a = 0; a < g.swaps.size(); ++a)
        for (std::size_t b = 0; b < g.swaps.size(); ++b) {
            if (a == b) continue;
            const auto& A = losses[a];
            const auto& B = losses[b];
            bool ok = true;
            if (cfg.use_expression) ok = ok && A.e + cfg.delta_exp < B.e;
            if (cfg.use_lighting) ok = ok && A.l + cfg.delta_light < B.l;
            if (cfg.use_pose) ok = ok && A.p + cfg.delta_pose < B.p;
            if (cfg.use_lpips) ok = ok && A.lp + cfg.delta_lpips < B.lp;
            if (ok) out.emplace(g.target.image_id, g.swaps[a].image_id, g.swaps[b].image_id);
        }
    return out;
}

inline std::set<LabelKey> as_keys(const std::vector<RankLabel>& labels) {
    std::set<LabelKey> out;
    for (const auto& l : labels) out.emplace(l.target_id, l.better_id, l.worse_id);
    return out;
}

// Floyd-Warshall transitive closure on a QualityGraph.
inline std::vector<std::vector<bool>> oracle_reachability(const QualityGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (const auto& [u, v] : g.edges) r[u][v] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (r[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (r[k][j]) r[i][j] = true;
    return r;
}

// Cycle detection by DFS colouring, independent of the library's Kahn pass.
inline bool oracle_has_cycle(const QualityGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [u, v] : g.edges) adj[u].push_back(v);
    std::vector<int> colour(n, 0);
    bool cycle = false;
    auto dfs = [&](auto&& self, std::size_t u) -> void {
        colour[u] = 1;
        for (std::size_t v : adj[u]) {
            if (colour[v] == 1) cycle = true;
            else if (colour[v] == 0) self(self, v);
        }
        colour[u] = 2;
    };
    for (std::size_t i = 0; i < n; ++i)
        if (colour[i] == 0) dfs(dfs, i);
    return cycle;
}


// Plain forward pass over the model's blocks in long double; returns every
// hidden pre-activation and stores the output in *out.
inline std::vector<long double> oracle_forward(const RankerModel& m, const std::vector<double>& x, long double* out) {
    std::vector<long double> act(x.begin(), x.end()), pre_all;
    const auto& dims = m.layer_dims();
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        std::vector<long double> next(dims[l + 1]);
        for (std::size_t o = 0; o < dims[l + 1]; ++o) {
            long double z = m.blocks()[l].bias[o];
            for (std::size_t i = 0; i < dims[l]; ++i) z += m.blocks()[l].weights[o * dims[l] + i] * act[i];
            next[o] = z;
        }
        if (l + 2 < dims.size()) {
            pre_all.insert(pre_all.end(), next.begin(), next.end());
            for (long double& v : next) v = v > 0 ? v : 0;
        }
        act = std::move(next);
    }
    *out = act[0];
    return pre_all;
}

inline bool near_kink(const RankerModel& m, const std::vector<double>& x, double tol) {
    long double s = 0;
    for (long double z : oracle_forward(m, x, &s))
        if (std::abs(z) < tol) return true;
    return false;
}

// Largest relative gap between pair_gradient and a central finite difference
// of the hinge loss, with the denominator floored at 1e-7.
inline double fd_gradient_gap(const RankerModel& model, const std::vector<double>& better,
                              const std::vector<double>& worse, double eps, double h = 1e-5) {
    const Gradient g = pair_gradient(model, better, worse, eps);
    // Long double keeps the rounding noise of the difference quotient well
    // below the tolerance, even for parameters whose gradient is zero.
    const auto loss = [&](const RankerModel& m) {
        long double sb = 0, sw = 0;
        oracle_forward(m, better, &sb);
        oracle_forward(m, worse, &sw);
        return std::max(0.0L, sw - sb + eps);
    };
    double worst = 0.0;
    RankerModel probe = model;
    const auto visit = [&](std::vector<double>& params, const std::vector<double>& grad) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double keep = params[i];
            params[i] = keep + h;
            const long double up = loss(probe);
            params[i] = keep - h;
            const long double down = loss(probe);
            params[i] = keep;
            const double fd = static_cast<double>((up - down) / (2 * h));
            const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-7});
            worst = std::max(worst, std::abs(fd - grad[i]) / denom);
        }
    };
    for (std::size_t l = 0; l < probe.layer_count(); ++l) {
        visit(probe.blocks()[l].weights, g[l].weights);
        visit(probe.blocks()[l].bias, g[l].bias);
    }
    return worst;
}

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("swaprank_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace swaprank::testing
