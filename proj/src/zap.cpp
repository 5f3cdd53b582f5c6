#include "seqzap/zap.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "seqzap/errors.hpp"
#include "seqzap/penalty.hpp"

namespace seqzap {

void ZapConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("ZapConfig: " + msg); };
    PenaltyParams{alpha};
    if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) fail("kappa0 must be positive");
    if (!(eta1 > 0.0 && eta1 < 1.0)) fail("eta1 must lie in (0, 1)");
    if (!(eta2 > 0.0 && eta2 < 1.0)) fail("eta2 must lie in (0, 1)");
    if (t_max < 1) fail("t_max must be >= 1");
    if (!(q_divisor > 1.0) || !std::isfinite(q_divisor)) fail("q_divisor must be > 1");
    if (!(epsilon > 0.0)) fail("epsilon must be positive");
}

const char* to_string(StopCause cause) {
    switch (cause) {
        case StopCause::IterationBound: return "iteration-bound";
        case StopCause::StepFloor: return "step-floor";
    }
    return "unknown";
}

InnerResult inner_solve(const GramInverse& gram, const Eigen::Ref<const Eigen::VectorXd>& y,
                        const Eigen::Ref<const Eigen::VectorXd>& x0, double kappa_m,
                        const ZapConfig& cfg, const InnerObserver& observer) {
    cfg.validate();
    if (gram.empty()) throw std::invalid_argument("inner_solve: no measurements");
    if (x0.size() != gram.dim())
        throw std::invalid_argument("inner_solve: x0 has length " + std::to_string(x0.size()) +
                                    ", expected " + std::to_string(gram.dim()));
    if (y.size() != gram.size())
        throw std::invalid_argument("inner_solve: y has length " + std::to_string(y.size()) +
                                    ", expected " + std::to_string(gram.size()));
    require_finite(x0, "inner_solve x0");
    if (!(kappa_m > 0.0) || !std::isfinite(kappa_m))
        throw std::invalid_argument("inner_solve: kappa_m must be positive");

    const PenaltyParams penalty{cfg.alpha};
    const double floor = kappa_m / cfg.q_divisor;

    InnerResult result;
    result.l1_trace.reserve(cfg.t_max);

    Eigen::VectorXd x = x0;
    Eigen::VectorXd next(x.size());
    Eigen::VectorXd grad;
    Eigen::VectorXd scratch;
    double kappa = kappa_m;
    double l1_prev = x.lpNorm<1>();
    std::size_t n = 0;

    for (;;) {
        penalty_gradient_into(x, penalty, grad);
        next = x - kappa * grad;
        gram.project_in_place(next, y, scratch);
        if (!next.allFinite())
        {
            std::ostringstream msg;
            msg << "inner_solve: iterate " << n + 1 << " is not finite (kappa=" << kappa << ")";
            throw DivergenceError(n + 1, msg.str());
        }

        const double l1_next = next.lpNorm<1>();
        if (l1_next > l1_prev && kappa > floor) kappa *= cfg.eta2;
        if (result.l1_trace.size() < cfg.t_max) result.l1_trace.push_back(l1_next);

        x.swap(next);
        l1_prev = l1_next;
        ++n;
        if (observer) observer(n, x, kappa);

        if (n > cfg.t_max) {
            result.stop_cause = StopCause::IterationBound;
            break;
        }
        if (kappa < floor) {
            result.stop_cause = StopCause::StepFloor;
            break;
        }
    }

    result.x = std::move(x);
    result.iterations = n - 1;
    result.final_kappa = kappa;
    return result;
}

InnerResult batch_solve(const GramInverse& gram, const Eigen::Ref<const Eigen::VectorXd>& y,
                        const ZapConfig& cfg) {
    const Eigen::VectorXd x0 = gram.least_squares_solution(y);
    return inner_solve(gram, y, x0, cfg.kappa0, cfg);
}

} // namespace seqzap
