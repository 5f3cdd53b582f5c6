#pragma once

#include <Eigen/Dense>

namespace seqzap {

/// Approximate l0 penalty. Larger alpha brings the penalty closer to the l0
/// count; the gradient is supported on the band |x_i| <= 1/alpha.
class PenaltyParams {
public:
    explicit PenaltyParams(double alpha);

    double alpha() const noexcept { return alpha_; }
    double band() const noexcept { return 1.0 / alpha_; }

private:
    double alpha_;
};

/// Entry i is alpha*sgn(x_i) - alpha^2*x_i inside the band, 0 outside.
/// sgn(0) is 0, so the origin is stationary.
Eigen::VectorXd penalty_gradient(const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const PenaltyParams& params);

/// Writes the gradient into `out` (resized as needed). No finiteness check;
/// used on the hot path where the caller already validates iterates.
void penalty_gradient_into(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const PenaltyParams& params, Eigen::VectorXd& out);

/// Antiderivative of penalty_gradient: alpha|x| - alpha^2 x^2 / 2 inside the
/// band, 1/2 outside. Diagnostics only; the solver monitors l1_norm.
double penalty_value(const Eigen::Ref<const Eigen::VectorXd>& x,
                     const PenaltyParams& params);

double l1_norm(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Eigen::VectorXd>& x, const char* what);

} // namespace seqzap
