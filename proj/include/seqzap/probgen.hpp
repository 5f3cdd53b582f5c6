#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "seqzap/online.hpp"

namespace seqzap {

/// splitmix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/*
 * Deterministic normal/uniform draws on top of std::mt19937_64, whose output
 * sequence is fixed by the standard. Normals use the Box-Muller transform and
 * bounded integers use rejection sampling, so streams are bit-identical
 * across standard libraries (std::*_distribution are not).
 */
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1), 53 random bits.
    double uniform_open();
    double normal();
    /// Uniform on [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

struct ProblemSpec {
    Eigen::Index n = 256;
    Eigen::Index k = 20;
    std::uint64_t seed = 0;
    bool unit_norm_rows = false;

    void validate() const;
};

/// Ground-truth sparse signal plus a seeded stream of Gaussian measurement rows.
class SparseProblem {
public:
    /// Uniform random support of size k, standard normal nonzeros.
    static SparseProblem generate(const ProblemSpec& spec);

    /// Explicit signal (fixtures, tests). Support indices must be distinct
    /// and in range; the row stream still derives from spec.seed.
    SparseProblem(const ProblemSpec& spec, std::vector<Eigen::Index> support,
                  std::vector<double> values);

    /// Next row a (i.i.d. N(0,1), optionally normalized) and y = a^T x_true.
    Measurement next_measurement();

    /// Adapter for run_online.
    MeasurementSource source();

    const ProblemSpec& spec() const noexcept { return spec_; }
    const Eigen::VectorXd& x_true() const noexcept { return x_true_; }
    const std::vector<Eigen::Index>& support() const noexcept { return support_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t rows_drawn() const noexcept { return rows_drawn_; }

private:
    ProblemSpec spec_;
    std::vector<Eigen::Index> support_;
    std::vector<double> values_;
    Eigen::VectorXd x_true_;
    NormalStream rows_;
    std::size_t rows_drawn_ = 0;
};

/*
 * Text fixture:
 *
 *   seqzap-problem 1
 *   n <N>
 *   k <K>
 *   seed <u64>
 *   unit_norm_rows <0|1>
 *   support <i_1> ... <i_K>
 *   values <v_1> ... <v_K>        (17 significant digits)
 *
 * Rows are not stored; they are regenerated from the seed.
 */
void save_fixture(const SparseProblem& problem, const std::filesystem::path& path);
SparseProblem load_fixture(const std::filesystem::path& path);

} // namespace seqzap
