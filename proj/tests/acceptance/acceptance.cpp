// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "swaprank/checkpoint.hpp"
#include "swaprank/evalkit.hpp"
#include "swaprank/formats.hpp"
#include "swaprank/labelgen.hpp"
#include "swaprank/rankernet.hpp"
#include "swaprank/rotation6d.hpp"
#include "swaprank/swaploss.hpp"
#include "swaprank/sweep.hpp"
#include "swaprank/synth.hpp"

using namespace swaprank;
namespace t = swaprank::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // 0: no limit
    std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double max_abs_diff(const Mat3& a, const Mat3& b) {
    double m = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(a.at(r, c) - b.at(r, c)));
    return m;
}

Outcome rotation_suite() {
    Outcome o;
    Rng rng(1001);
    double worst_orth = 0, worst_det = 0, worst_trip = 0, worst_scale = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto r6 = t::random_6d(rng, 1e-3);
        const auto R = lift_rotation(r6);
        const auto chk = validate_rotation(R.matrix());
        worst_orth = std::max(worst_orth, chk.orthogonality_deviation);
        worst_det = std::max(worst_det, chk.determinant_deviation);

        worst_trip = std::max(worst_trip, max_abs_diff(lift_rotation(reduce_rotation(R)).matrix(), R.matrix()));

        // Gram-Schmidt ignores positive scaling of a1, a2 and any a1 component in a2.
        const double s1 = rng.uniform(0.1, 10), s2 = rng.uniform(0.1, 10), k = rng.normal(0, 3);
        Rotation6D scaled;
        for (int j = 0; j < 3; ++j) {
            scaled.a1[j] = s1 * r6.a1[j];
            scaled.a2[j] = s2 * r6.a2[j] + k * r6.a1[j];
        }
        worst_scale = std::max(worst_scale, max_abs_diff(lift_rotation(scaled).matrix(), R.matrix()));
    }
    o.require(worst_orth < 1e-9, "orthogonality deviation " + fmt("%.3g", worst_orth));
    o.require(worst_det < 1e-9, "determinant deviation " + fmt("%.3g", worst_det));
    o.require(worst_trip < 1e-9, "round trip deviation " + fmt("%.3g", worst_trip));
    o.require(worst_scale < 1e-9, "scale invariance deviation " + fmt("%.3g", worst_scale));
    o.detail = o.pass ? "10000 samples; max |RtR-I| " + fmt("%.2g", worst_orth) + ", |det-1| " + fmt("%.2g", worst_det) +
                            ", round trip " + fmt("%.2g", worst_trip) + ", scale " + fmt("%.2g", worst_scale)
                      : o.detail;
    return o;
}

Outcome label_oracle() {
    Outcome o;
    Rng rng(1002);
    std::size_t labels = 0;
    for (int i = 0; i < 1000 && o.pass; ++i) {
        const std::size_t n = 2 + rng.below(14);  // 2..15 swaps
        const auto g = t::random_group(rng, "T" + std::to_string(i), n);
        const auto out = generate_labels(g, {});
        o.require(t::as_keys(out) == t::oracle_labels(g, {}), "group " + std::to_string(i) + " differs from oracle");
        o.require(out.size() == t::as_keys(out).size(), "duplicate labels in group " + std::to_string(i));
        if (!out.empty()) o.require(!t::oracle_has_cycle(build_graph(out)), "cycle in group " + std::to_string(i));
        labels += out.size();
    }
    if (o.pass) o.detail = "1000 groups, " + std::to_string(labels) + " labels, all sets equal, all graphs acyclic";
    return o;
}

Outcome margin_monotonicity() {
    Outcome o;
    Rng rng(1003);
    std::size_t comparisons = 0;
    for (int i = 0; i < 200 && o.pass; ++i) {
        const auto g = t::random_group(rng, "T", 2 + rng.below(14));
        // Each margin (and all together) raised through three increasing levels.
        for (int which = 0; which < 5; ++which) {
            auto prev = t::as_keys(generate_labels(g, {}));
            for (double level : {0.01, 0.05, 0.2}) {
                LabelGenConfig cfg;
                if (which == 0 || which == 4) cfg.delta_exp = level;
                if (which == 1 || which == 4) cfg.delta_light = level;
                if (which == 2 || which == 4) cfg.delta_pose = level * 0.2;
                if (which == 3 || which == 4) cfg.delta_lpips = level * 0.5;
                const auto cur = t::as_keys(generate_labels(g, cfg));
                o.require(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()),
                          "group " + std::to_string(i) + ": raising a margin added labels");
                prev = cur;
                ++comparisons;
            }
        }
    }
    if (o.pass) o.detail = std::to_string(comparisons) + " margin increases, none enlarged the label set";
    return o;
}

Outcome gradient_check() {
    Outcome o;
    Rng rng(1004);
    int checked = 0, rejected = 0;
    double worst = 0;
    while (checked < 100) {
        const std::size_t d = 2 + rng.below(15);
        std::vector<std::size_t> hidden;
        const std::size_t depth = rng.below(3);
        for (std::size_t k = 0; k < depth; ++k) hidden.push_back(1 + rng.below(24));
        const auto m = init_model(d, hidden, rng.next_u64());
        const auto x1 = t::random_vector(rng, d), x2 = t::random_vector(rng, d);
        const double eps = rng.uniform(0.05, 2.0);
        // Finite differences are only meaningful away from rectifier kinks and the hinge corner.
        if (t::near_kink(m, x1, 1e-3) || t::near_kink(m, x2, 1e-3) ||
            margin_rank_loss(score(m, x1), score(m, x2), eps) < 1e-3) {
            ++rejected;
            continue;
        }
        worst = std::max(worst, t::fd_gradient_gap(m, x1, x2, eps, 1e-5));
        ++checked;
    }
    o.require(worst < 1e-4, "max relative gap " + fmt("%.3g", worst));
    if (o.pass)
        o.detail = "100 draws (" + std::to_string(rejected) + " rejected near kinks); max relative gap " +
                   fmt("%.2g", worst);
    return o;
}

Outcome optimizer_trace() {
    Outcome o;
    // Scalar weight and bias with gradients g_w = (1, -2), g_b = (0.5, 0.5).
    RankerModel m({1, 1}, {ParamBlock{{0.5}, {-0.25}}});
    TrainConfig cfg;  // beta1 0, beta2 0.99, lr 3e-5, eps 1e-8, decay 3e-5
    AdamState st = AdamState::zeros_like(m);
    Gradient g = zero_gradient(m);

    g[0].weights[0] = 1.0;
    g[0].bias[0] = 0.5;
    adam_step(m, g, st, cfg);
    // t = 1: m = g, v = 0.01 g^2, bias corrections 1 and 0.01, so m_hat/sqrt(v_hat) = sign(g).
    const double w1 = 0.5 * (1 - 3e-5) - 3e-5 * 1.0 / (1.0 + 1e-8);
    const double b1 = -0.25 * (1 - 3e-5) - 3e-5 * 0.5 / (0.5 + 1e-8);
    o.require(std::abs(m.blocks()[0].weights[0] - w1) < 1e-12, "step 1 weight " + fmt("%.17g", m.blocks()[0].weights[0]));
    o.require(std::abs(m.blocks()[0].bias[0] - b1) < 1e-12, "step 1 bias " + fmt("%.17g", m.blocks()[0].bias[0]));

    g[0].weights[0] = -2.0;
    g[0].bias[0] = 0.5;
    adam_step(m, g, st, cfg);
    // t = 2: v_w = 0.99*0.01 + 0.01*4 = 0.0499, v_b = 0.99*0.0025 + 0.0025 = 0.004975,
    // correction 1 - 0.99^2 = 0.0199.
    const double vhat_w = 0.0499 / 0.0199, vhat_b = 0.004975 / 0.0199;
    const double w2 = w1 * (1 - 3e-5) - 3e-5 * (-2.0) / (std::sqrt(vhat_w) + 1e-8);
    const double b2 = b1 * (1 - 3e-5) - 3e-5 * 0.5 / (std::sqrt(vhat_b) + 1e-8);
    o.require(std::abs(m.blocks()[0].weights[0] - w2) < 1e-12, "step 2 weight " + fmt("%.17g", m.blocks()[0].weights[0]));
    o.require(std::abs(m.blocks()[0].bias[0] - b2) < 1e-12, "step 2 bias " + fmt("%.17g", m.blocks()[0].bias[0]));
    o.require(st.step == 2, "step counter");
    if (o.pass)
        o.detail = "two-step scalar trace matches: w " + fmt("%.15g", w2) + ", b " + fmt("%.15g", b2);
    return o;
}

ExperimentOptions default_options() {
    ExperimentOptions opt;  // batch 32, 20 epochs, lr 3e-5, beta1 0, beta2 0.99, decay 3e-5
    opt.split_seed = 3;
    opt.model_seed = 5;
    opt.train.seed = 7;
    return opt;
}

Outcome planted_order() {
    Outcome o;
    SyntheticBenchmarkSpec spec;  // 200 targets x 10 swaps, dim 16, sigma 0.05
    spec.seed = 1;
    const auto data = synth_benchmark(spec);
    const auto opt = default_options();
    const auto res = run_experiment(data, parse_attribute_set("all").labels, 1.0, opt);

    // Random scorers on the same held-out pairs.
    const auto split = split_dataset(data.groups, opt.ratio, opt.split_seed);
    const auto held = score_split(init_model(data.feature_dim, opt.hidden_dims, 0), data, split, Split::Test);
    Rng rng(99);
    double random_sum = 0;
    const int scorers = 20;
    for (int k = 0; k < scorers; ++k) {
        std::vector<double> noise(held.mos.size());
        for (double& x : noise) x = rng.uniform();
        random_sum += consistency(all_pairs(noise, held.mos), Granularity::Coarse).agree_percent;
    }
    const double random_pct = random_sum / scorers;

    o.require(res.coarse.agree_percent >= 90.0, "coarse consistency " + fmt("%.2f%%", res.coarse.agree_percent));
    o.require(std::abs(random_pct - 50.0) <= 2.0, "random scorer " + fmt("%.2f%%", random_pct));
    if (o.pass)
        o.detail = "coarse " + fmt("%.2f%%", res.coarse.agree_percent) + " over " +
                   std::to_string(res.coarse.pair_count) + " pairs (fine " + fmt("%.2f%%", res.fine.agree_percent) +
                   "), random scorer " + fmt("%.2f%%", random_pct) + ", " + std::to_string(res.train_pairs) +
                   " training pairs";
    return o;
}

Outcome metric_oracles() {
    Outcome o;
    const auto pearson = [](const std::vector<double>& x, const std::vector<double>& y) {
        long double mx = 0, my = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= x.size();
        my /= y.size();
        long double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        return static_cast<double>(sxy / std::sqrt(sxx * syy));
    };
    // Continuous samples have no ties, so the rank-difference formula applies.
    const auto spearman_d2 = [](const std::vector<double>& x, const std::vector<double>& y) {
        const std::size_t n = x.size();
        long double d2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            long double rx = 1, ry = 1;
            for (std::size_t j = 0; j < n; ++j) {
                rx += x[j] < x[i];
                ry += y[j] < y[i];
            }
            d2 += (rx - ry) * (rx - ry);
        }
        return static_cast<double>(1.0L - 6.0L * d2 / (static_cast<long double>(n) * (n * n - 1.0L)));
    };

    Rng rng(1007);
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
        std::vector<double> x(100), y(100);
        for (std::size_t i = 0; i < 100; ++i) {
            x[i] = rng.normal();
            y[i] = rng.uniform(-1, 1) * 0.5 + std::sin(x[i]);
        }
        const double p = plcc(x, y), r = srcc(x, y);
        worst = std::max({worst, std::abs(p - pearson(x, y)), std::abs(r - spearman_d2(x, y))});

        std::vector<double> mono(100), aff(100);
        for (std::size_t i = 0; i < 100; ++i) {
            mono[i] = std::atan(x[i]) * 3 + x[i];
            aff[i] = 0.3 * y[i] + 12.0;
        }
        worst = std::max({worst, std::abs(srcc(mono, y) - r), std::abs(srcc(x, aff) - r), std::abs(plcc(x, aff) - p)});
    }
    const double ex = srcc(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4});
    o.require(ex == 0.8, "srcc example " + fmt("%.17g", ex));
    o.require(worst < 1e-12, "max deviation " + fmt("%.3g", worst));
    if (o.pass) o.detail = "100 samples x 100 points; max deviation " + fmt("%.2g", worst) + "; srcc example = 0.8";
    return o;
}

Outcome ablation_shape() {
    Outcome o;
    SyntheticBenchmarkSpec spec;
    spec.noise_sigma = 0.3;
    spec.seed = 1;
    const auto data = synth_benchmark(spec);
    const auto opt = default_options();

    SweepGrid attrs{single_and_full_attribute_sets(), {0.5}, {1.0}};
    const auto cells = ablation_sweep(data, attrs, opt);
    const double full = cells.back().result.coarse.agree_percent;
    std::string table;
    for (const auto& c : cells) {
        table += c.attributes + " " + fmt("%.2f", c.result.coarse.agree_percent) + ", ";
        if (c.attributes != "all")
            o.require(full >= c.result.coarse.agree_percent,
                      "all " + fmt("%.2f", full) + " < " + c.attributes + " " + fmt("%.2f", c.result.coarse.agree_percent));
    }

    SweepGrid fractions{{parse_attribute_set("all")}, {0.5}, {0.1, 1.0}};
    const auto fc = ablation_sweep(data, fractions, opt);
    const double f10 = fc[0].result.coarse.agree_percent, f100 = fc[1].result.coarse.agree_percent;
    o.require(f100 >= f10, "100% cell " + fmt("%.2f", f100) + " < 10% cell " + fmt("%.2f", f10));
    if (o.pass) o.detail = "coarse %: " + table + "fraction 10% " + fmt("%.2f", f10) + " <= 100% " + fmt("%.2f", f100);
    return o;
}

Outcome swap_loss_arithmetic() {
    Outcome o;
    // l_adv 1, L_id 0.1 (cos 0.9), cross swap, L_quality 0.4 -> 1 + 2 + 0 + 0.1 = 3.1
    SwapLossComponents c;
    c.l_adv = 1.0;
    c.m_target = 0.9;
    c.m_swap = 0.5;
    c.z_source = IdentityEmbedding{{1.0, 0.0}};
    c.z_swap = IdentityEmbedding{{0.9, std::sqrt(0.19)}};
    c.pixel_l2_sq = 50.0;
    const double a = total_loss(c).total;
    o.require(std::abs(a - 3.1) < 1e-12, "cross example " + fmt("%.17g", a));

    // Self-swap: l_adv 0.5, identical ids, pixel 4 -> rec 2; scores 0.2 / 0.6 -> 0.4.
    c.l_adv = 0.5;
    c.z_swap = c.z_source;
    c.pixel_l2_sq = 4.0;
    c.is_self_swap = true;
    c.m_target = 0.2;
    c.m_swap = 0.6;
    const double b = total_loss(c).total;
    o.require(std::abs(b - (0.5 + 0 + 7 * 2 + 0.25 * 0.4)) < 1e-12, "self example " + fmt("%.17g", b));

    // Opposite identity: L_id = 2 -> 0 + 40 + 0 + 0.
    SwapLossComponents d;
    d.z_source = IdentityEmbedding{{0.0, 3.0, 4.0}};
    d.z_swap = IdentityEmbedding{{0.0, -6.0, -8.0}};
    const double e = total_loss(d).total;
    o.require(std::abs(e - 40.0) < 1e-12, "opposite example " + fmt("%.17g", e));

    Rng rng(1009);
    bool rec_zero = true;
    for (int i = 0; i < 10000; ++i) rec_zero = rec_zero && rec_loss(rng.uniform(0, 1e8), false) == 0.0;
    o.require(rec_zero, "rec_loss nonzero on a cross-identity input");
    if (o.pass) o.detail = "hand sums 3.1, 14.6, 40 reproduced; rec_loss == 0 on 10000 cross-identity inputs";
    return o;
}

Outcome determinism() {
    Outcome o;
    t::TempDir dir("acceptance");
    SyntheticBenchmarkSpec spec;
    spec.n_targets = 40;
    spec.seed = 11;

    std::vector<std::string> label_files, ckpts, reports;
    for (int run = 0; run < 2; ++run) {
        const auto data = synth_benchmark(spec);
        LabelGenConfig lc;
        lc.use_identity = true;
        const auto labels = generate_dataset_labels(data.groups, lc, run == 0 ? Execution::Serial : Execution::Parallel);
        const auto lp = dir / ("labels" + std::to_string(run) + ".jsonl");
        save_labels(lp, labels);
        label_files.push_back(t::slurp(lp));

        ExperimentOptions opt;
        opt.train.epochs = 3;
        opt.train.seed = 4;
        opt.train.batch_execution = run == 0 ? Execution::Serial : Execution::Parallel;
        const auto pairs = pairs_from_labels(labels, data.features);
        auto model = init_model(data.feature_dim, opt.hidden_dims, 8);
        AdamState adam = AdamState::zeros_like(model);
        const auto rep = train(model, pairs, opt.train, {}, &adam);
        const auto cp = dir / ("model" + std::to_string(run) + ".ckpt");
        opt.train.batch_execution = Execution::Serial;  // keep the echoed config identical
        save_checkpoint(cp, model, adam, opt.train);
        ckpts.push_back(t::slurp(cp));

        nlohmann::ordered_json r;
        r["schema_version"] = kReportSchemaVersion;
        r["epoch_loss"] = rep.epoch_loss;
        r["checksum"] = rep.parameter_checksum;
        const auto rp = dir / ("report" + std::to_string(run) + ".json");
        write_json(rp, r);
        reports.push_back(t::slurp(rp));
    }
    o.require(label_files[0] == label_files[1], "label files differ");
    o.require(ckpts[0] == ckpts[1], "checkpoints differ");
    o.require(reports[0] == reports[1], "reports differ");

    const auto loaded = load_checkpoint(dir / "model0.ckpt");
    const auto original = checkpoint_from_string(ckpts[0]);
    Rng rng(1010);
    int exact = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = t::random_vector(rng, loaded.model.input_dim(), 2.0);
        exact += score(loaded.model, x) == score(original.model, x);
    }
    o.require(exact == 100, "only " + std::to_string(exact) + "/100 scores bit-identical after reload");
    if (o.pass)
        o.detail = "labels, checkpoints, reports byte-identical across runs (serial vs parallel kernels); 100/100 "
                   "scores bit-exact after reload";
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "rotation suite", 5, rotation_suite},
        {2, "label oracle equivalence", 10, label_oracle},
        {3, "margin monotonicity", 0, margin_monotonicity},
        {4, "gradient check", 30, gradient_check},
        {5, "optimizer trace", 0, optimizer_trace},
        {6, "planted-order learning", 120, planted_order},
        {7, "metric oracles", 0, metric_oracles},
        {8, "ablation shape", 0, ablation_shape},
        {9, "swap-loss arithmetic", 0, swap_loss_arithmetic},
        {10, "determinism and round trips", 0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.pass && c.time_limit_s > 0 && secs >= c.time_limit_s) {
            o.pass = false;
            o.detail = "took " + fmt("%.1f s", secs) + ", limit " + fmt("%.0f s", c.time_limit_s);
        }
        failures += !o.pass;
        std::printf("AC%-2d %s  %-28s %s (%.2f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
