#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swaprank/rotation6d.hpp"

namespace swaprank {

inline constexpr std::size_t kDefaultExpressionDim = 50;
inline constexpr std::size_t kLightingSize = 27;  // 9 SH bands x RGB
inline constexpr std::size_t kDefaultIdentityDim = 512;

// FLAME expression coefficients.
struct ExpressionVector {
    std::vector<double> values;
};

// Spherical-harmonic lighting, 9x3 flattened row-major.
struct LightingCoefficients {
    std::array<double, kLightingSize> values{};
};

// Face-recognition embedding; must have non-zero norm for cosine use.
struct IdentityEmbedding {
    std::vector<double> values;
};

struct AttributeRecord {
    std::string image_id;
    std::string target_id;
    std::string source_id;
    std::string method;
    ExpressionVector expression;
    LightingCoefficients lighting;
    Rotation6D pose6d;
    std::optional<double> lpips_to_target;
    std::optional<IdentityEmbedding> identity;

    bool is_target() const { return image_id == target_id; }
    bool is_self_swap() const { return source_id == target_id; }
};

struct AttributeLossBundle {
    double l_exp = 0.0;
    double l_light = 0.0;
    double l_pose = 0.0;
    std::optional<double> l_lpips;
    std::optional<double> l_id;

    friend bool operator==(const AttributeLossBundle&, const AttributeLossBundle&) = default;
};

// How the pose cosine is taken. Lifted compares the 9 entries of the SO(3)
// matrices; Raw6D compares the 6 pre-lift parameters (kept for study).
enum class PoseCosine { Lifted, Raw6D };

// Mean of squared element-wise differences. Throws InputError on size mismatch.
double mean_squared_error(std::span<const double> a, std::span<const double> b);

// 1 - cos(a, b). Throws InputError on size mismatch or zero norm.
double cosine_distance(std::span<const double> a, std::span<const double> b);

double expression_loss(const ExpressionVector& target, const ExpressionVector& swap);
double lighting_loss(const LightingCoefficients& target, const LightingCoefficients& swap);
double pose_loss(const Rotation6D& target, const Rotation6D& swap, PoseCosine mode = PoseCosine::Lifted);
double identity_distance(const IdentityEmbedding& a, const IdentityEmbedding& reference);

// All per-attribute losses of `swap` against its target.
// Throws InputError when swap.target_id != target.image_id.
AttributeLossBundle attribute_bundle(const AttributeRecord& target, const AttributeRecord& swap,
                                     PoseCosine mode = PoseCosine::Lifted);

// Checks finiteness, lighting size, non-negative lpips, non-degenerate pose and
// non-zero identity norm. Throws InputError naming the image and field.
void validate_record(const AttributeRecord& record);

}  // namespace swaprank
