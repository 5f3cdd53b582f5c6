#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "seqzap/penalty.hpp"

using seqzap::PenaltyParams;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}
} // namespace

TEST_CASE("penalty params reject non-positive alpha") {
    CHECK_THROWS_AS(PenaltyParams{0.0}, std::invalid_argument);
    CHECK_THROWS_AS(PenaltyParams{-1.0}, std::invalid_argument);
    CHECK_THROWS_AS(PenaltyParams{std::nan("")}, std::invalid_argument);
    CHECK(PenaltyParams{2.0}.band() == doctest::Approx(0.5));
}

TEST_CASE("penalty gradient worked examples") {
    const PenaltyParams one{1.0};
    CHECK(seqzap::penalty_gradient(vec({0.0, 0.0}), one) == vec({0.0, 0.0}));

    // boundary |x| = 1/alpha evaluates to zero on the inner branch
    CHECK(seqzap::penalty_gradient(vec({0.5}), PenaltyParams{2.0})[0] == 0.0);
    CHECK(seqzap::penalty_gradient(vec({-0.5}), PenaltyParams{2.0})[0] == 0.0);

    const Eigen::VectorXd g = seqzap::penalty_gradient(vec({0.5, -2.0, 0.1}), one);
    CHECK(g[0] == doctest::Approx(oracle::gradient_entry(0.5, 1.0)));
    CHECK(g[1] == 0.0);
    CHECK(g[2] == doctest::Approx(oracle::gradient_entry(0.1, 1.0)));
    CHECK(g[0] == doctest::Approx(0.5));
    CHECK(g[2] == doctest::Approx(0.9));
}

TEST_CASE("penalty functions reject non-finite input") {
    const PenaltyParams one{1.0};
    const Eigen::VectorXd bad = vec({1.0, std::numeric_limits<double>::infinity()});
    CHECK_THROWS_AS(seqzap::penalty_gradient(bad, one), std::invalid_argument);
    CHECK_THROWS_AS(seqzap::penalty_value(bad, one), std::invalid_argument);
    CHECK_THROWS_AS(seqzap::l1_norm(vec({std::nan("")})), std::invalid_argument);
}

TEST_CASE("penalty value") {
    const PenaltyParams one{1.0};
    CHECK(seqzap::penalty_value(Eigen::VectorXd::Zero(8), one) == 0.0);
    CHECK(seqzap::penalty_value(Eigen::VectorXd::Constant(256, 3.0), one) == 128.0);
    CHECK(seqzap::penalty_value(Eigen::VectorXd::Constant(256, -1.0), one) == 128.0);
    CHECK(seqzap::penalty_value(vec({0.5}), one) == doctest::Approx(oracle::penalty_entry(0.5, 1)));
    CHECK(seqzap::penalty_value(vec({0.5}), one) == doctest::Approx(0.375));
}

TEST_CASE("l1 norm") {
    CHECK(seqzap::l1_norm(vec({0, 0, 0})) == 0.0);
    CHECK(seqzap::l1_norm(vec({1, -2, 3})) == 6.0);
    CHECK(seqzap::l1_norm(vec({-0.5})) == 0.5);
}

TEST_CASE("penalty properties over random points") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> alpha_dist(0.25, 4.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    for (int trial = 0; trial < 200; ++trial) {
        const double alpha = alpha_dist(gen);
        const PenaltyParams p{alpha};
        const double band = 1.0 / alpha;
        Eigen::VectorXd x(16);
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = 2.0 * band * unit(gen);
        if (trial % 5 == 0) x[0] = 0.0;

        const Eigen::VectorXd g = seqzap::penalty_gradient(x, p);
        const Eigen::VectorXd g_neg = seqzap::penalty_gradient(-x, p);
        CHECK((g + g_neg).cwiseAbs().maxCoeff() == 0.0);

        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (std::abs(x[i]) > band) CHECK(g[i] == 0.0);
            CHECK(g[i] == doctest::Approx(oracle::gradient_entry(x[i], alpha)));
        }

        const double value = seqzap::penalty_value(x, p);
        CHECK(value >= 0.0);
        CHECK(value <= x.size() / 2.0);
        CHECK((value == 0.0) == x.isZero(0.0));
    }
}
