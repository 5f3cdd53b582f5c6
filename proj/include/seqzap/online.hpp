#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "seqzap/gram.hpp"
#include "seqzap/zap.hpp"

namespace seqzap {

struct Measurement {
    Eigen::VectorXd a;
    double y = 0.0;
};

/// Yields the next sample, or nullopt when the source is exhausted.
using MeasurementSource = std::function<std::optional<Measurement>()>;

enum class StopKind {
    OracleMsd,    ///< normalized MSD against a known signal
    ProxyChange,  ///< relative estimate change, two consecutive steps
};

struct StopMode {
    StopKind kind = StopKind::OracleMsd;
    double threshold = 1e-4;

    void validate() const;
};

/// ||a - b||^2 / N.
double msd_normalized(const Eigen::Ref<const Eigen::VectorXd>& estimate,
                      const Eigen::Ref<const Eigen::VectorXd>& truth);
/// ||a - b||^2.
double msd_raw(const Eigen::Ref<const Eigen::VectorXd>& estimate,
               const Eigen::Ref<const Eigen::VectorXd>& truth);

struct StepRecord {
    std::size_t m = 0;
    std::size_t inner_iterations = 0;
    StopCause stop_cause = StopCause::IterationBound;
    std::optional<double> msd;
    bool skipped_degenerate = false;  ///< sample rejected, state untouched
};

/// Outer recursion: one inner solve per ingested sample, warm-started from
/// the previous estimate, with kappa_m decayed by eta1 before each solve.
class OnlineState {
public:
    OnlineState(Eigen::Index n_dim, const ZapConfig& cfg);

    /// Appends (a, y_new), decays kappa_m, and refines the estimate. On
    /// DegenerateRowError or DivergenceError the state is left as it was.
    InnerResult ingest_sample(const Eigen::Ref<const Eigen::VectorXd>& a, double y_new,
                              const InnerObserver& observer = {});

    const GramInverse& gram() const noexcept { return gram_; }
    const Eigen::VectorXd& observations() const noexcept { return y_; }
    const Eigen::VectorXd& estimate() const noexcept { return x_; }
    const Eigen::VectorXd& previous_estimate() const noexcept { return x_prev_; }
    double kappa() const noexcept { return kappa_m_; }
    std::size_t m() const noexcept { return static_cast<std::size_t>(gram_.size()); }
    std::size_t total_inner_iterations() const noexcept { return total_iterations_; }
    const ZapConfig& config() const noexcept { return cfg_; }
    const std::vector<StepRecord>& history() const noexcept { return history_; }
    bool converged() const noexcept { return converged_; }

private:
    friend OnlineState run_online(Eigen::Index, const MeasurementSource&, const ZapConfig&,
                                  const StopMode&, std::size_t,
                                  const std::optional<Eigen::VectorXd>&);

    ZapConfig cfg_;
    GramInverse gram_;
    Eigen::VectorXd y_;
    Eigen::VectorXd x_;
    Eigen::VectorXd x_prev_;
    double kappa_m_;
    std::size_t total_iterations_ = 0;
    std::vector<StepRecord> history_;
    bool converged_ = false;
};

/// Tracks the proxy stop rule: relative change below threshold on two
/// consecutive steps.
class ProxyChangeMonitor {
public:
    explicit ProxyChangeMonitor(double threshold) : threshold_(threshold) {}

    /// Feeds the next estimate pair; returns true once the rule has fired.
    bool update(const Eigen::Ref<const Eigen::VectorXd>& current,
                const Eigen::Ref<const Eigen::VectorXd>& previous);

private:
    double threshold_;
    int consecutive_ = 0;
};

/// Ingests samples until the stop rule fires or `m_cap` samples have been
/// consumed (0 means the signal dimension). Degenerate samples are skipped
/// and logged in the history. OracleMsd requires `oracle_x`.
OnlineState run_online(Eigen::Index n_dim, const MeasurementSource& source, const ZapConfig& cfg,
                       const StopMode& stop, std::size_t m_cap,
                       const std::optional<Eigen::VectorXd>& oracle_x);

} // namespace seqzap
