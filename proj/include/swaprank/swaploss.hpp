#pragma once

#include <vector>

#include "swaprank/attrcore.hpp"

namespace swaprank {

// Inputs to the quality-improved face-swapping objective for one sample.
struct SwapLossComponents {
    double l_adv = 0.0;
    double m_target = 0.0;  // quality score of the target image
    double m_swap = 0.0;    // quality score of the generated swap
    IdentityEmbedding z_source;
    IdentityEmbedding z_swap;
    double pixel_l2_sq = 0.0;  // squared L2 distance between swap and target
    bool is_self_swap = false;
};

struct SwapLossWeights {
    double lambda1 = 20.0;  // identity
    double lambda2 = 7.0;   // reconstruction
    double lambda3 = 0.25;  // quality

    void validate() const;  // throws ConfigError
};

struct SwapLossTerm {
    double raw = 0.0;
    double weight = 0.0;
    double weighted = 0.0;
};

struct SwapLossBreakdown {
    SwapLossTerm adv;  // weight fixed at 1
    SwapLossTerm id;
    SwapLossTerm rec;
    SwapLossTerm quality;
    double total = 0.0;
};

// |m_target - m_swap|.
double quality_loss(double m_target, double m_swap);

// 1 - cos(z_swap, z_source). Throws InputError on zero norm or size mismatch.
double swap_id_loss(const IdentityEmbedding& z_source, const IdentityEmbedding& z_swap);

// 0.5 * pixel_l2_sq for self-swaps, exactly 0 otherwise.
// Throws InputError when pixel_l2_sq is negative or non-finite.
double rec_loss(double pixel_l2_sq, bool is_self_swap);

// l_adv + lambda1 * L_id + lambda2 * L_rec + lambda3 * L_quality.
SwapLossBreakdown total_loss(const SwapLossComponents& c, const SwapLossWeights& w = {});

// Identity-to-quality weight ratios offered as presets (lambda1 : lambda3).
struct QualityRatioPreset {
    double ratio;
    const char* label;
};
inline constexpr QualityRatioPreset kQualityRatioPresets[] = {
    {10.0, "10:1"}, {20.0, "20:1"}, {40.0, "40:1"}, {80.0, "80:1"}};

// Keeps lambda1 and lambda2, sets lambda3 = lambda1 / ratio.
SwapLossWeights weights_for_ratio(double ratio, const SwapLossWeights& base = {});

}  // namespace swaprank
