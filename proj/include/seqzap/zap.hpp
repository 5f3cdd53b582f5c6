#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "seqzap/gram.hpp"

namespace seqzap {

/// Tuning parameters of the online solver.
struct ZapConfig {
    double alpha = 1.0;       ///< penalty sharpness
    double kappa0 = 0.02;     ///< initial step size
    double eta1 = 0.99;       ///< step decay per new sample
    double eta2 = 0.8;        ///< step decay on an l1 increase inside a solve
    std::size_t t_max = 50;   ///< inner iteration bound
    double q_divisor = 2000;  ///< inner solve ends once kappa < kappa_m / q_divisor
    double epsilon = 1e-4;    ///< outer stopping tolerance

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

enum class StopCause { IterationBound, StepFloor };

const char* to_string(StopCause cause);

struct InnerResult {
    Eigen::VectorXd x;
    std::size_t iterations = 0;  ///< n - 1 at exit
    double final_kappa = 0.0;
    StopCause stop_cause = StopCause::IterationBound;
    std::vector<double> l1_trace;  ///< at most t_max entries
};

/// Called after every projection with the 1-based iterate index, the iterate
/// and the step size that will be used for the next iterate.
using InnerObserver =
    std::function<void(std::size_t n, const Eigen::VectorXd& x, double kappa)>;

/*
 * One ZAP solve at fixed measurements:
 *
 *   x~  = x - kappa * grad(x)
 *   x'  = project(x~)
 *   if |x'|_1 > |x|_1 and kappa > kappa_m / Q:  kappa *= eta2
 *
 * repeated until n > T or kappa < kappa_m / Q. Returns the last projected
 * iterate. Throws DivergenceError if an iterate is non-finite.
 */
InnerResult inner_solve(const GramInverse& gram,
                        const Eigen::Ref<const Eigen::VectorXd>& y,
                        const Eigen::Ref<const Eigen::VectorXd>& x0,
                        double kappa_m, const ZapConfig& cfg,
                        const InnerObserver& observer = {});

/// Cold start: least-squares initial point and kappa = cfg.kappa0.
InnerResult batch_solve(const GramInverse& gram,
                        const Eigen::Ref<const Eigen::VectorXd>& y,
                        const ZapConfig& cfg);

} // namespace seqzap
