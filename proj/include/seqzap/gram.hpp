#pragma once

#include <Eigen/Dense>

namespace seqzap {

/*
 * Maintains Gamma_m = (A_m A_m^T)^-1 while rows of A are appended one at a
 * time. Appending a row a to A_m gives the bordered system
 *
 *   A_{m+1} A_{m+1}^T = | A_m A_m^T   A_m a |
 *                       | a^T A_m^T   a^T a |
 *
 * whose inverse follows from the Schur complement s = a^T a - v^T Gamma_m v
 * with v = A_m a and u = Gamma_m v:
 *
 *   Gamma_{m+1} = | Gamma_m + u u^T / s   -u / s |
 *                 | -u^T / s               1 / s |
 *
 * Each append costs O(m N) for v and O(m^2) for the rank-one correction.
 * The projection onto {x : A_m x = y} is applied as x - A^T Gamma (A x - y)
 * so the N x N projector is never formed.
 */
class GramInverse {
public:
    /// Relative Schur-complement floor: rows with s <= tol * a^T a are rejected.
    static constexpr double kSchurTolerance = 1e-12;

    explicit GramInverse(Eigen::Index n_dim);

    /// Strong guarantee: on DegenerateRowError / CapacityError the state is
    /// unchanged.
    void append_row(const Eigen::Ref<const Eigen::VectorXd>& a);

    /// x - A^T Gamma (A x - y). With no rows, returns x.
    Eigen::VectorXd apply_projection(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& y) const;

    /// In-place variant used by the solver loop; `scratch` is reused storage.
    void project_in_place(Eigen::Ref<Eigen::VectorXd> x,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          Eigen::VectorXd& scratch) const;

    /// Minimum-norm solution A^T Gamma y. Requires at least one row.
    Eigen::VectorXd least_squares_solution(const Eigen::Ref<const Eigen::VectorXd>& y) const;

    Eigen::Index size() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return n_dim_; }
    bool empty() const noexcept { return m_ == 0; }

    /// The m x N matrix of rows, in append order.
    auto rows() const { return rows_.topRows(m_); }
    /// The current m x m Gamma.
    auto gamma() const { return gamma_.topLeftCorner(m_, m_); }

private:
    void reserve(Eigen::Index capacity);
    void check_rhs(const Eigen::Ref<const Eigen::VectorXd>& y) const;

    Eigen::Index n_dim_;
    Eigen::Index m_ = 0;
    // Storage grows geometrically; only the leading m rows / m x m block are live.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows_;
    Eigen::MatrixXd gamma_;
};

} // namespace seqzap
