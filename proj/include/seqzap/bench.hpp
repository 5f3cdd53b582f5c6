#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seqzap/online.hpp"
#include "seqzap/probgen.hpp"
#include "seqzap/zap.hpp"

namespace seqzap {

enum class Algorithm { OnlineZap, BatchZapColdStart };

const char* to_string(Algorithm algorithm);
/// Accepts "online" / "batch" as well as the enumerator names.
Algorithm parse_algorithm(const std::string& name);

struct TrialRecord {
    std::uint64_t seed = 0;  ///< problem seed of the trial
    std::size_t trial = 0;
    Eigen::Index m = 0;
    double msd_normalized = 0.0;
    double msd_raw = 0.0;
    std::size_t total_inner_iterations = 0;
    double wall_time = 0.0;  ///< seconds
    Algorithm algorithm = Algorithm::OnlineZap;
    bool converged = false;
    bool failed = false;
    std::string error;
};

struct SweepConfig {
    ProblemSpec spec;
    std::vector<Eigen::Index> m_values;
    std::size_t trials = 10;
    ZapConfig zap;
    StopMode stop;
    std::vector<Algorithm> algorithms{Algorithm::OnlineZap, Algorithm::BatchZapColdStart};
    unsigned threads = 0;  ///< 0 picks hardware concurrency

    void validate() const;
};

/// Seed of trial `trial`. Every m and algorithm of a trial shares one problem.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial);

/*
 * Runs every (m, trial, algorithm) cell. The online algorithm makes one
 * sequential pass per trial and is sampled at each requested m, which is
 * identical to re-running it on the first m samples. Batch cells rebuild the
 * Gram inverse from scratch and solve cold. Records come back ordered by
 * (algorithm, m, trial); solver errors set `failed` instead of throwing.
 */
std::vector<TrialRecord> run_sweep(const SweepConfig& cfg);

struct CellSummary {
    Algorithm algorithm = Algorithm::OnlineZap;
    Eigen::Index m = 0;
    std::size_t trials = 0;
    double msd_mean = 0.0;    ///< normalized MSD, failed records excluded
    double msd_median = 0.0;
    double time_mean_s = 0.0;
    double success_rate = 0.0;  ///< fraction with msd_normalized < tau
};

/// One row per (algorithm, m), sorted. Throws on empty input.
std::vector<CellSummary> aggregate(const std::vector<TrialRecord>& records, double tau);

void write_summary_csv(const std::vector<CellSummary>& summaries,
                       const std::filesystem::path& path);
std::vector<CellSummary> read_summary_csv(const std::filesystem::path& path);

/// Per-trial records, including both MSD normalizations.
void write_records_csv(const std::vector<TrialRecord>& records,
                       const std::filesystem::path& path);

enum class PlotMetric { MsdLog, TimeLinear };

/// One polyline per algorithm against m.
void write_svg(const std::vector<CellSummary>& summaries, const std::filesystem::path& path,
               PlotMetric metric = PlotMetric::MsdLog);

} // namespace seqzap
