#include "swaprank/attrcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swaprank/error.hpp"

namespace swaprank {

namespace {

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

double mean_squared_error(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InputError("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    if (a.empty()) throw InputError("mean squared error of empty vectors");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InputError("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (!(aa > 0.0) || !(bb > 0.0)) throw InputError("cosine of a zero-norm vector");
    // One square root of the product: identical inputs then give exactly 0.
    const double prod = aa * bb;
    const double denom = std::isfinite(prod) && prod > 0.0 ? std::sqrt(prod) : std::sqrt(aa) * std::sqrt(bb);
    const double cos = ab / denom;
    // Rounding can push |cos| a hair past 1.
    return 1.0 - std::clamp(cos, -1.0, 1.0);
}

double expression_loss(const ExpressionVector& target, const ExpressionVector& swap) {
    return mean_squared_error(target.values, swap.values);
}

double lighting_loss(const LightingCoefficients& target, const LightingCoefficients& swap) {
    return mean_squared_error(target.values, swap.values);
}

double pose_loss(const Rotation6D& target, const Rotation6D& swap, PoseCosine mode) {
    if (mode == PoseCosine::Raw6D) {
        const auto a = target.flatten();
        const auto b = swap.flatten();
        return cosine_distance(a, b);
    }
    const auto a = lift_rotation(target).matrix().flatten();
    const auto b = lift_rotation(swap).matrix().flatten();
    return cosine_distance(a, b);
}

double identity_distance(const IdentityEmbedding& a, const IdentityEmbedding& reference) {
    return cosine_distance(a.values, reference.values);
}

AttributeLossBundle attribute_bundle(const AttributeRecord& target, const AttributeRecord& swap, PoseCosine mode) {
    if (swap.target_id != target.image_id)
        throw InputError("swap '" + swap.image_id + "' belongs to target '" + swap.target_id + "', not '" +
                         target.image_id + "'");
    AttributeLossBundle bundle;
    bundle.l_exp = expression_loss(target.expression, swap.expression);
    bundle.l_light = lighting_loss(target.lighting, swap.lighting);
    bundle.l_pose = pose_loss(target.pose6d, swap.pose6d, mode);
    bundle.l_lpips = swap.lpips_to_target;
    if (target.identity && swap.identity) bundle.l_id = identity_distance(*swap.identity, *target.identity);
    return bundle;
}

void validate_record(const AttributeRecord& record) {
    const auto fail = [&](const std::string& field, const std::string& what) {
        throw InputError("record '" + record.image_id + "': field '" + field + "' " + what);
    };
    if (record.image_id.empty()) fail("image_id", "is empty");
    if (record.target_id.empty()) fail("target_id", "is empty");
    if (record.expression.values.empty()) fail("expression", "is empty");
    if (!all_finite(record.expression.values)) fail("expression", "has non-finite entries");
    if (!all_finite(record.lighting.values)) fail("lighting", "has non-finite entries");
    const auto pose = record.pose6d.flatten();
    if (!all_finite(pose)) fail("pose6d", "has non-finite entries");
    if (record.pose6d.degenerate()) fail("pose6d", "is degenerate");
    if (record.lpips_to_target && (!std::isfinite(*record.lpips_to_target) || *record.lpips_to_target < 0.0))
        fail("lpips", "must be finite and >= 0");
    if (record.identity) {
        if (!all_finite(record.identity->values)) fail("identity", "has non-finite entries");
        double sq = 0.0;
        for (double x : record.identity->values) sq += x * x;
        if (!(sq > 0.0)) fail("identity", "has zero norm");
    }
}

}  // namespace swaprank
