#include "seqzap/gram.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "seqzap/errors.hpp"
#include "seqzap/penalty.hpp"

namespace seqzap {

GramInverse::GramInverse(Eigen::Index n_dim) : n_dim_(n_dim) {
    if (n_dim < 1)
        throw std::invalid_argument("GramInverse: signal dimension must be >= 1");
}

void GramInverse::reserve(Eigen::Index capacity) {
    if (capacity <= rows_.rows()) return;
    capacity = std::min(n_dim_, std::max<Eigen::Index>(capacity, 2 * rows_.rows()));

    decltype(rows_) rows(capacity, n_dim_);
    Eigen::MatrixXd gamma(capacity, capacity);
    if (m_ > 0) {
        rows.topRows(m_) = rows_.topRows(m_);
        gamma.topLeftCorner(m_, m_) = gamma_.topLeftCorner(m_, m_);
    }
    rows_.swap(rows);
    gamma_.swap(gamma);
}

void GramInverse::append_row(const Eigen::Ref<const Eigen::VectorXd>& a) {
    if (a.size() != n_dim_)
        throw std::invalid_argument("append_row: row has length " + std::to_string(a.size()) +
                                    ", expected " + std::to_string(n_dim_));
    require_finite(a, "append_row row");
    if (m_ == n_dim_)
        throw CapacityError("append_row: already holding " + std::to_string(m_) +
                            " rows, the signal dimension");

    const double beta = a.squaredNorm();
    if (m_ == 0) {
        if (!(beta > 0.0)) throw DegenerateRowError("append_row: zero row");
        reserve(1);
        rows_.row(0) = a.transpose();
        gamma_(0, 0) = 1.0 / beta;
        m_ = 1;
        return;
    }

    const Eigen::VectorXd v = rows_.topRows(m_) * a;
    const Eigen::VectorXd u = gamma_.topLeftCorner(m_, m_) * v;
    const double schur = beta - v.dot(u);
    if (!(schur > kSchurTolerance * beta))
        throw DegenerateRowError("append_row: row is linearly dependent on the " +
                                 std::to_string(m_) + " rows already held (Schur complement " +
                                 std::to_string(schur) + ")");

    reserve(m_ + 1);
    const double theta = 1.0 / schur;
    auto block = gamma_.topLeftCorner(m_, m_);
    block.noalias() += theta * u * u.transpose();
    block = 0.5 * (block + block.transpose()).eval();
    gamma_.row(m_).head(m_) = -theta * u.transpose();
    gamma_.col(m_).head(m_) = -theta * u;
    gamma_(m_, m_) = theta;
    rows_.row(m_) = a.transpose();
    ++m_;
}

void GramInverse::check_rhs(const Eigen::Ref<const Eigen::VectorXd>& y) const {
    if (y.size() != m_)
        throw std::invalid_argument("observation vector has length " +
                                    std::to_string(y.size()) + ", expected " +
                                    std::to_string(m_));
}

void GramInverse::project_in_place(Eigen::Ref<Eigen::VectorXd> x,
                                   const Eigen::Ref<const Eigen::VectorXd>& y,
                                   Eigen::VectorXd& scratch) const {
    if (m_ == 0) return;
    const auto A = rows_.topRows(m_);
    scratch.noalias() = A * x;
    scratch -= y;
    const Eigen::VectorXd w = gamma_.topLeftCorner(m_, m_) * scratch;
    x.noalias() -= A.transpose() * w;
}

Eigen::VectorXd GramInverse::apply_projection(const Eigen::Ref<const Eigen::VectorXd>& x,
                                              const Eigen::Ref<const Eigen::VectorXd>& y) const {
    if (x.size() != n_dim_)
        throw std::invalid_argument("apply_projection: x has length " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(n_dim_));
    check_rhs(y);
    Eigen::VectorXd out = x;
    Eigen::VectorXd scratch;
    project_in_place(out, y, scratch);
    return out;
}

Eigen::VectorXd GramInverse::least_squares_solution(
    const Eigen::Ref<const Eigen::VectorXd>& y) const {
    if (m_ == 0)
        throw std::invalid_argument("least_squares_solution: no rows appended");
    check_rhs(y);
    return rows_.topRows(m_).transpose() * (gamma_.topLeftCorner(m_, m_) * y);
}

} // namespace seqzap
