#include "swaprank/swaploss.hpp"

#include <cmath>

#include "swaprank/error.hpp"

namespace swaprank {

void SwapLossWeights::validate() const {
    for (double l : {lambda1, lambda2, lambda3})
        if (!std::isfinite(l) || l < 0.0) throw ConfigError("loss weights must be finite and >= 0");
}

double quality_loss(double m_target, double m_swap) {
    if (!std::isfinite(m_target) || !std::isfinite(m_swap)) throw InputError("quality scores must be finite");
    return std::abs(m_target - m_swap);
}

double swap_id_loss(const IdentityEmbedding& z_source, const IdentityEmbedding& z_swap) {
    return cosine_distance(z_swap.values, z_source.values);
}

double rec_loss(double pixel_l2_sq, bool is_self_swap) {
    if (!std::isfinite(pixel_l2_sq) || pixel_l2_sq < 0.0) throw InputError("pixel_l2_sq must be finite and >= 0");
    return is_self_swap ? 0.5 * pixel_l2_sq : 0.0;
}

SwapLossBreakdown total_loss(const SwapLossComponents& c, const SwapLossWeights& w) {
    w.validate();
    if (!std::isfinite(c.l_adv)) throw InputError("l_adv must be finite");
    const auto term = [](double raw, double weight) { return SwapLossTerm{raw, weight, raw * weight}; };
    SwapLossBreakdown b;
    b.adv = term(c.l_adv, 1.0);
    b.id = term(swap_id_loss(c.z_source, c.z_swap), w.lambda1);
    b.rec = term(rec_loss(c.pixel_l2_sq, c.is_self_swap), w.lambda2);
    b.quality = term(quality_loss(c.m_target, c.m_swap), w.lambda3);
    b.total = b.adv.weighted + b.id.weighted + b.rec.weighted + b.quality.weighted;
    return b;
}

SwapLossWeights weights_for_ratio(double ratio, const SwapLossWeights& base) {
    if (!std::isfinite(ratio) || !(ratio > 0.0)) throw ConfigError("quality ratio must be > 0");
    SwapLossWeights w = base;
    w.lambda3 = base.lambda1 / ratio;
    return w;
}

}  // namespace swaprank
