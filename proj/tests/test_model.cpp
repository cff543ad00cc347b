#include "doctest.h"

#include "corrnoise/errors.hpp"
#include "corrnoise/model.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

using namespace corrnoise;

TEST_CASE("build_kernel limits and direct values") {
    Eigen::VectorXd two(2);
    two << 0.0, 1.0;
    CHECK(build_kernel(two, 0.0).matrix() == Eigen::MatrixXd::Identity(2, 2));
    CHECK(build_kernel(two, 1.0)(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(build_kernel(two, kPerfectCorrelation).matrix() == Eigen::MatrixXd::Ones(2, 2));

    const auto k20 = build_kernel(default_positions(3), 20.0);
    CHECK(k20.matrix().minCoeff() >= std::exp2(-0.01) - 1e-15);
    CHECK(k20(0, 2) == doctest::Approx(std::exp2(-0.01)));

    Eigen::VectorXd bad(2);
    bad << 0.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(build_kernel(bad, 1.0), InputError);
    CHECK_THROWS_AS(build_kernel(two, -1.0), InputError);
}

TEST_CASE("build_kernel flushes tiny entries and matches the direct formula") {
    const auto x = default_positions(6);
    const auto k = build_kernel(x, 0.2);
    CHECK(k(0, 5) == 0.0); // 2^-625 flushed
    const auto ref = oracle::gaussian_kernel(x, 1.7);
    CHECK((build_kernel(x, 1.7).matrix() - ref).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("kernel is symmetric PSD with unit diagonal for random positions") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> pos(-5.0, 5.0), len(0.0, 30.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd x(8);
        for (int i = 0; i < 8; ++i) x(i) = pos(rng);
        const auto k = build_kernel(x, len(rng)).matrix();
        CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(k.diagonal().isOnes());
        CHECK(k.minCoeff() >= 0.0);
        CHECK(k.maxCoeff() <= 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12 * es.eigenvalues().maxCoeff());
    }
}

TEST_CASE("max off-diagonal of the kernel is nondecreasing in xi") {
    const auto x = default_positions(5);
    double previous = 0.0;
    for (double xi : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
        const auto k = build_kernel(x, xi).matrix();
        const double off = (k - Eigen::MatrixXd::Identity(5, 5)).maxCoeff();
        CHECK(off >= previous);
        previous = off;
    }
}

TEST_CASE("chain coupling profile") {
    const auto c2 = chain_coupling_profile(2, 1.0);
    CHECK(c2(0, 1) == doctest::Approx(1.0));
    const auto c4 = chain_coupling_profile(4, 1.0);
    CHECK(c4(0, 1) == doctest::Approx(std::sqrt(3.0)));
    CHECK(c4(1, 2) == doctest::Approx(2.0));
    CHECK(c4(2, 3) == doctest::Approx(std::sqrt(3.0)));
    CHECK(c4(0, 2) == 0.0);
    CHECK((c4 - c4.transpose()).cwiseAbs().maxCoeff() == 0.0);

    const auto c20 = chain_coupling_profile(20, 1.0);
    double best = 0.0;
    int where = -1;
    for (int j = 0; j < 19; ++j) {
        CHECK(c20(j, j + 1) == doctest::Approx(c20(18 - j, 19 - j)));
        if (c20(j, j + 1) > best) {
            best = c20(j, j + 1);
            where = j + 1;
        }
    }
    CHECK(where == 10);
    CHECK(best == doctest::Approx(10.0));
    CHECK_THROWS_AS(chain_coupling_profile(1, 1.0), InputError);
}

TEST_CASE("network validation") {
    auto net = NetworkSpec::chain(4, 1.0, 100.0, 1.0, 0.0);
    CHECK_NOTHROW(net.validate());
    net.coupling(0, 1) = 0.5;
    CHECK_THROWS_AS(net.validate(), InputError);
    net = NetworkSpec::chain(4);
    net.dephasing_couplings(2) = -1.0;
    CHECK_THROWS_AS(net.validate(), InputError);
    net = NetworkSpec::chain(4);
    net.positions(2) = 0.5; // not increasing along the chain
    CHECK_THROWS_AS(net.validate(), InputError);
    CHECK_NOTHROW(NetworkSpec::uncoupled(3).validate());

    NoiseSpec noise;
    noise.c_relax_down = -1.0;
    CHECK_THROWS_AS(noise.validate(), InputError);
}
