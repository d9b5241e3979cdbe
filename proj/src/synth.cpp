#include "swaprank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swaprank/error.hpp"
#include "swaprank/rng.hpp"

namespace swaprank {

namespace {

// Loss scale per attribute; pose stays well inside its [0, 4/3] range.
constexpr double kExpScale = 1.0;
constexpr double kLightScale = 1.0;
constexpr double kPoseScale = 0.4;
constexpr double kLpipsScale = 0.5;
constexpr double kIdScale = 0.5;
constexpr double kQualityOffset = 1.1;
constexpr double kMaxPoseLoss = 1.3;
constexpr double kMaxIdLoss = 1.9;

std::vector<double> unit_vector(Rng& rng, std::size_t dim) {
    std::vector<double> v(dim);
    double sq = 0.0;
    do {
        sq = 0.0;
        for (double& x : v) {
            x = rng.normal();
            sq += x * x;
        }
    } while (sq < 1e-12);
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
}

Mat3 mul(const Mat3& a, const Mat3& b) {
    Mat3 out;
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += a.at(r, k) * b.at(k, c);
            out.cols[c][r] = acc;
        }
    return out;
}

// Rodrigues rotation about a unit axis.
Mat3 axis_angle(const Vec3& axis, double angle) {
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    const double x = axis[0], y = axis[1], z = axis[2];
    return Mat3::from_rows({Vec3{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
                            Vec3{t * x * y + s * z, t * y * y + c, t * y * z - s * x},
                            Vec3{t * x * z - s * y, t * y * z + s * x, t * z * z + c}});
}

RotationMatrix random_rotation(Rng& rng) {
    Rotation6D r6;
    do {
        r6 = Rotation6D{{rng.normal(), rng.normal(), rng.normal()}, {rng.normal(), rng.normal(), rng.normal()}};
    } while (r6.degenerate());
    return lift_rotation(r6);
}

// Point at exactly mean-squared distance `mse` from `center`.
std::vector<double> offset_by_mse(Rng& rng, std::span<const double> center, double mse) {
    const auto dir = unit_vector(rng, center.size());
    const double radius = std::sqrt(mse * static_cast<double>(center.size()));
    std::vector<double> out(center.begin(), center.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += radius * dir[i];
    return out;
}

// Vector whose cosine distance to `reference` is `dist` (in [0, 2)).
std::vector<double> at_cosine_distance(Rng& rng, std::span<const double> reference, double dist) {
    const std::size_t n = reference.size();
    double rn = 0.0;
    for (double x : reference) rn += x * x;
    rn = std::sqrt(rn);
    std::vector<double> e1(n);
    for (std::size_t i = 0; i < n; ++i) e1[i] = reference[i] / rn;
    // Orthogonal unit direction by Gram-Schmidt on a random vector.
    std::vector<double> e2 = unit_vector(rng, n);
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += e1[i] * e2[i];
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        e2[i] -= proj * e1[i];
        sq += e2[i] * e2[i];
    }
    const double inv = 1.0 / std::sqrt(sq);
    const double cos = 1.0 - dist, sin = std::sqrt(std::max(0.0, 1.0 - cos * cos));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = cos * e1[i] + sin * e2[i] * inv;
    return out;
}

}  // namespace

void SyntheticBenchmarkSpec::validate() const {
    if (n_targets == 0 || swaps_per_target == 0 || feature_dim == 0 || expression_dim == 0)
        throw ConfigError("synthetic benchmark counts and dimensions must be positive");
    if (identity_dim == 1) throw ConfigError("identity_dim must be 0 or >= 2");
    if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) throw ConfigError("noise_sigma must be finite and >= 0");
    if (!std::isfinite(attribute_leak) || attribute_leak < 0.0)
        throw ConfigError("attribute_leak must be finite and >= 0");
}

SyntheticDataset synth_benchmark(const SyntheticBenchmarkSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t dim = spec.feature_dim;
    constexpr std::size_t kNoiseChannels = 5;  // exp, light, pose, lpips, id

    // Fixed affine feature map.
    std::vector<double> slope(dim), offset(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        slope[j] = rng.normal();
        offset[j] = rng.normal();
    }
    // Unit expected row norm, so the leaked nuisance has std noise_sigma * attribute_leak per coordinate.
    std::vector<double> leak(dim * kNoiseChannels);
    const double leak_scale = 1.0 / std::sqrt(static_cast<double>(kNoiseChannels));
    for (double& x : leak) x = leak_scale * rng.normal();

    SyntheticDataset ds;
    ds.feature_dim = dim;
    const int id_width = 6;
    const auto tag = [&](const char* prefix, std::size_t i) {
        std::string num = std::to_string(i);
        return prefix + std::string(static_cast<std::size_t>(std::max(0, id_width - static_cast<int>(num.size()))), '0') + num;
    };
    static const char* kMethods[] = {"simswap", "faceshifter", "infoswap", "megafs", "hififace"};

    for (std::size_t t = 0; t < spec.n_targets; ++t) {
        TargetGroup group;
        AttributeRecord& target = group.target;
        target.image_id = tag("t", t);
        target.target_id = target.image_id;
        target.source_id = target.image_id;
        target.method = "real";
        target.expression.values.resize(spec.expression_dim);
        for (double& x : target.expression.values) x = rng.normal();
        for (double& x : target.lighting.values) x = 0.5 * rng.normal();
        const RotationMatrix target_pose = random_rotation(rng);
        target.pose6d = reduce_rotation(target_pose);
        if (spec.identity_dim > 0) {
            target.identity = IdentityEmbedding{unit_vector(rng, spec.identity_dim)};
        }

        for (std::size_t s = 0; s < spec.swaps_per_target; ++s) {
            AttributeRecord swap;
            swap.image_id = target.image_id + "_" + tag("s", s);
            swap.target_id = target.image_id;
            // First swap of each target is a self-swap.
            swap.source_id = s == 0 ? target.image_id : tag("src", t * spec.swaps_per_target + s);
            swap.method = kMethods[(t + s) % 5];

            const double q = rng.uniform();
            std::array<double, kNoiseChannels> nu{};
            for (double& x : nu) x = rng.normal();
            const auto loss = [&](double scale, std::size_t k) {
                return scale * std::abs(kQualityOffset - q + spec.noise_sigma * nu[k]);
            };

            swap.expression.values = offset_by_mse(rng, target.expression.values, loss(kExpScale, 0));
            const auto light = offset_by_mse(rng, target.lighting.values, loss(kLightScale, 1));
            std::copy(light.begin(), light.end(), swap.lighting.values.begin());

            // pose_loss = 1 - trace(Rt^T Rs) / 3 = (2 - 2 cos(angle)) / 3.
            const double pose = std::min(loss(kPoseScale, 2), kMaxPoseLoss);
            const double angle = std::acos(std::clamp(1.0 - 1.5 * pose, -1.0, 1.0));
            const auto axis = unit_vector(rng, 3);
            const Mat3 swap_pose = mul(target_pose.matrix(), axis_angle({axis[0], axis[1], axis[2]}, angle));
            swap.pose6d = Rotation6D{swap_pose.cols[0], swap_pose.cols[1]};

            swap.lpips_to_target = loss(kLpipsScale, 3);
            if (spec.identity_dim > 0) {
                const double id = std::min(loss(kIdScale, 4), kMaxIdLoss);
                swap.identity = IdentityEmbedding{at_cosine_distance(rng, target.identity->values, id)};
            }

            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                double nuisance = 0.0;
                for (std::size_t k = 0; k < kNoiseChannels; ++k) nuisance += leak[j * kNoiseChannels + k] * nu[k];
                x[j] = slope[j] * q + offset[j] + spec.noise_sigma * (spec.attribute_leak * nuisance + rng.normal());
            }
            ds.features.emplace(swap.image_id, std::move(x));
            ds.quality.emplace(swap.image_id, q);
            group.swaps.push_back(std::move(swap));
        }
        ds.groups.push_back(std::move(group));
    }
    return ds;
}

std::vector<FeaturePair> pairs_from_labels(std::span<const RankLabel> labels,
                                           const std::map<std::string, std::vector<double>>& features) {
    std::vector<FeaturePair> out;
    out.reserve(labels.size());
    const auto find = [&](const std::string& id) -> std::span<const double> {
        const auto it = features.find(id);
        if (it == features.end()) throw InputError("no feature vector for image '" + id + "'");
        return it->second;
    };
    for (const auto& l : labels) out.push_back({find(l.better_id), find(l.worse_id)});
    return out;
}

}  // namespace swaprank
