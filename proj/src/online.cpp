#include "seqzap/online.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "seqzap/errors.hpp"

namespace seqzap {

void StopMode::validate() const {
    if (!(threshold > 0.0))
        throw std::invalid_argument("StopMode: threshold must be positive");
}

double msd_raw(const Eigen::Ref<const Eigen::VectorXd>& estimate,
               const Eigen::Ref<const Eigen::VectorXd>& truth) {
    if (estimate.size() != truth.size())
        throw std::invalid_argument("msd: length mismatch");
    return (estimate - truth).squaredNorm();
}

double msd_normalized(const Eigen::Ref<const Eigen::VectorXd>& estimate,
                      const Eigen::Ref<const Eigen::VectorXd>& truth) {
    if (truth.size() == 0) throw std::invalid_argument("msd: empty vectors");
    return msd_raw(estimate, truth) / static_cast<double>(truth.size());
}

OnlineState::OnlineState(Eigen::Index n_dim, const ZapConfig& cfg)
    : cfg_(cfg),
      gram_(n_dim),
      x_(Eigen::VectorXd::Zero(n_dim)),
      x_prev_(Eigen::VectorXd::Zero(n_dim)),
      kappa_m_(cfg.kappa0) {
    cfg_.validate();
}

InnerResult OnlineState::ingest_sample(const Eigen::Ref<const Eigen::VectorXd>& a, double y_new,
                                       const InnerObserver& observer) {
    if (!std::isfinite(y_new)) throw std::invalid_argument("ingest_sample: non-finite y");

    // Work on copies so a failed append or a diverging solve leaves *this intact.
    GramInverse gram = gram_;
    gram.append_row(a);

    Eigen::VectorXd y(y_.size() + 1);
    y << y_, y_new;
    const double kappa = cfg_.eta1 * kappa_m_;

    InnerResult result = inner_solve(gram, y, x_, kappa, cfg_, observer);

    gram_ = std::move(gram);
    y_ = std::move(y);
    kappa_m_ = kappa;
    x_prev_ = x_;
    x_ = result.x;
    total_iterations_ += result.iterations;
    history_.push_back({m(), result.iterations, result.stop_cause, std::nullopt, false});
    return result;
}

bool ProxyChangeMonitor::update(const Eigen::Ref<const Eigen::VectorXd>& current,
                                const Eigen::Ref<const Eigen::VectorXd>& previous) {
    const double change =
        (current - previous).norm() / std::max(current.norm(), 1e-12);
    consecutive_ = change < threshold_ ? consecutive_ + 1 : 0;
    return consecutive_ >= 2;
}

OnlineState run_online(Eigen::Index n_dim, const MeasurementSource& source,
                       const ZapConfig& cfg, const StopMode& stop, std::size_t m_cap,
                       const std::optional<Eigen::VectorXd>& oracle_x) {
    stop.validate();
    if (!source) throw std::invalid_argument("run_online: empty measurement source");
    if (m_cap == 0) m_cap = static_cast<std::size_t>(n_dim);
    if (m_cap > static_cast<std::size_t>(n_dim))
        throw std::invalid_argument("run_online: m_cap " + std::to_string(m_cap) +
                                    " exceeds the signal dimension " + std::to_string(n_dim));
    if (stop.kind == StopKind::OracleMsd && !oracle_x)
        throw std::invalid_argument("run_online: oracle stop mode needs the true signal");
    if (oracle_x && oracle_x->size() != n_dim)
        throw std::invalid_argument("run_online: oracle signal has the wrong length");

    OnlineState state(n_dim, cfg);
    ProxyChangeMonitor proxy(stop.threshold);

    for (std::size_t consumed = 0; consumed < m_cap; ++consumed) {
        std::optional<Measurement> sample = source();
        if (!sample) break;
        try {
            state.ingest_sample(sample->a, sample->y);
        } catch (const DegenerateRowError&) {
            state.history_.push_back({state.m(), 0, StopCause::IterationBound, std::nullopt, true});
            continue;
        }

        StepRecord& step = state.history_.back();
        if (oracle_x) step.msd = msd_normalized(state.x_, *oracle_x);

        const bool done = stop.kind == StopKind::OracleMsd
                              ? *step.msd < stop.threshold
                              : proxy.update(state.x_, state.x_prev_);
        if (done) {
            state.converged_ = true;
            break;
        }
    }
    return state;
}

} // namespace seqzap
