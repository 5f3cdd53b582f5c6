#include "seqzap/penalty.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace seqzap {

namespace {

inline double gradient_entry(double v, double alpha, double band) {
    if (std::abs(v) > band) return 0.0;
    const double sgn = (v > 0.0) - (v < 0.0);
    return alpha * sgn - alpha * alpha * v;
}

} // namespace

PenaltyParams::PenaltyParams(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("penalty alpha must be positive and finite, got " +
                                    std::to_string(alpha));
}

void require_finite(const Eigen::Ref<const Eigen::VectorXd>& x, const char* what) {
    if (!x.allFinite())
        throw std::invalid_argument(std::string(what) + " contains non-finite entries");
}

void penalty_gradient_into(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const PenaltyParams& params, Eigen::VectorXd& out) {
    const double alpha = params.alpha();
    const double band = params.band();
    out.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = gradient_entry(x[i], alpha, band);
}

Eigen::VectorXd penalty_gradient(const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const PenaltyParams& params) {
    require_finite(x, "penalty_gradient input");
    Eigen::VectorXd out;
    penalty_gradient_into(x, params, out);
    return out;
}

double penalty_value(const Eigen::Ref<const Eigen::VectorXd>& x, const PenaltyParams& params) {
    require_finite(x, "penalty_value input");
    const double alpha = params.alpha();
    const double band = params.band();
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double a = std::abs(x[i]);
        total += a > band ? 0.5 : alpha * a - 0.5 * alpha * alpha * a * a;
    }
    return total;
}

double l1_norm(const Eigen::Ref<const Eigen::VectorXd>& x) {
    require_finite(x, "l1_norm input");
    return x.lpNorm<1>();
}

} // namespace seqzap
