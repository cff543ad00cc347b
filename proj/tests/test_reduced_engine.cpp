#include "doctest.h"

#include "corrnoise/analytics.hpp"
#include "corrnoise/errors.hpp"
#include "corrnoise/full_engine.hpp"
#include "corrnoise/reduced_engine.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

using namespace corrnoise;

namespace {

Eigen::MatrixXcd random_hermitian(int dim, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = {g(rng), g(rng)};
    return a + a.adjoint();
}

Eigen::MatrixXcd random_density(int dim, std::mt19937& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = {g(rng), g(rng)};
    Eigen::MatrixXcd rho = a * a.adjoint();
    return rho / rho.trace();
}

} // namespace

TEST_CASE("reduced Hamiltonian: projection of the full one") {
    SUBCASE("N=1") {
        const auto h = build_hamiltonian_reduced(NetworkSpec::uncoupled(1, 100.0), Frame::Lab);
        CHECK(h.rows() == 2);
        CHECK(h(0, 0) == doctest::Approx(200.0));
        CHECK(h(1, 1) == 0.0);
        CHECK(h(0, 1) == 0.0);
    }
    SUBCASE("N=2 chain") {
        const auto net = NetworkSpec::chain(2);
        const auto h = build_hamiltonian_reduced(net, Frame::Lab);
        Eigen::Matrix3d expected;
        expected << 200, 1, 0, 1, 200, 0, 0, 0, 0;
        CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(build_hamiltonian_reduced(net).diagonal().cwiseAbs().maxCoeff() == 0.0);

        // Same numbers from projecting the full matrix onto {|1>, |2>, |g>}.
        const auto full = build_hamiltonian_full(net);
        const FullState as_state{2, full};
        const auto projected = project_to_reduced(as_state).rho;
        const double ground = full(0, 0).real();
        Eigen::MatrixXcd shifted = projected;
        shifted.diagonal().array() -= ground;
        CHECK((shifted.real() - h).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("reduced spectrum is contained in the full spectrum") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 2; n <= 6; ++n) {
        NetworkSpec net = NetworkSpec::uncoupled(n, 3.0);
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) net.coupling(j, k) = net.coupling(k, j) = u(rng);
        const auto full = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(build_hamiltonian_full(net)).eigenvalues();
        const auto reduced =
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(build_hamiltonian_reduced(net, Frame::Lab)).eigenvalues();
        const double ground = -n * net.omega_q;
        for (Eigen::Index i = 0; i < reduced.size(); ++i) {
            const double e = reduced(i) + ground;
            CHECK((full.array() - e).abs().minCoeff() < 1e-9);
        }
    }
}

TEST_CASE("dephasing rate matrix: limits and structure") {
    const int n = 5;
    const double c = 0.3, v = 1.0, gamma = 2.0 * v * v * c;
    const auto net = NetworkSpec::chain(n, 1.0, 100.0, v, 0.0);
    NoiseSpec noise{0.0, c, 0.0, 0.0};

    const auto uncorrelated = build_dephasing_rates(net, CorrelationKernel::identity(n), noise).lambda;
    const auto perfect = build_dephasing_rates(net, CorrelationKernel::all_ones(n), noise).lambda;
    for (int a = 0; a <= n; ++a) {
        CHECK(uncorrelated(a, a) == 0.0);
        CHECK(perfect(a, a) == 0.0);
    }
    for (int j = 0; j < n; ++j) {
        CHECK(uncorrelated(j, n) == doctest::Approx(gamma));
        CHECK(perfect(j, n) == doctest::Approx(gamma));
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            CHECK(uncorrelated(j, k) == doctest::Approx(2.0 * gamma));
            CHECK(std::abs(perfect(j, k)) < 1e-14);
        }
    }

    // Intermediate xi: symmetric, nonnegative, ground coherence independent of xi.
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    NetworkSpec uneven = net;
    for (int j = 0; j < n; ++j) uneven.dephasing_couplings(j) = u(rng);
    for (double xi : {0.3, 1.0, 4.0}) {
        const auto lam = build_dephasing_rates(uneven, build_kernel(uneven.positions, xi), noise).lambda;
        CHECK((lam - lam.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(lam.minCoeff() >= 0.0);
        for (int j = 0; j < n; ++j) {
            const double vj = uneven.dephasing_couplings(j);
            CHECK(lam(j, n) == doctest::Approx(2.0 * c * vj * vj));
        }
    }
}

TEST_CASE("dephasing rates agree with the full-engine dissipator on sector coherences") {
    const int n = 4;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    NetworkSpec net = NetworkSpec::chain(n);
    for (int j = 0; j < n; ++j) net.dephasing_couplings(j) = u(rng);
    const auto kernel = build_kernel(net.positions, 1.4);
    NoiseSpec noise{1.4, 0.8, 0.0, 0.0};
    const auto lam = build_dephasing_rates(net, kernel, noise).lambda;

    ReducedState basis{n, Eigen::MatrixXcd::Zero(n + 1, n + 1)};
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
            basis.rho.setZero();
            basis.rho(a, b) = 1.0;
            const auto full = embed_in_full(basis);
            const auto d = project_to_reduced(FullState{n, apply_dephasing_dissipator(full, net, kernel, noise)}).rho;
            CHECK(-d(a, b).real() == doctest::Approx(lam(a, b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("jump operators") {
    SUBCASE("identity kernel: one operator per site") {
        const int n = 4;
        NetworkSpec net = NetworkSpec::chain(n, 1.0, 100.0, 0.0, 1.0);
        net.relaxation_couplings << 0.5, 1.0, 1.5, 2.0;
        NoiseSpec noise{0.0, 0.0, 0.7, 0.0};
        const auto jumps = build_jump_operators(net, CorrelationKernel::identity(n), noise);
        REQUIRE(jumps.size() == 4);
        std::vector<double> expected;
        for (int j = 0; j < n; ++j) expected.push_back(std::pow(net.relaxation_couplings(j), 2) * 0.7);
        std::sort(expected.rbegin(), expected.rend());
        for (int a = 0; a < n; ++a) {
            CHECK(jumps.rates[a] == doctest::Approx(expected[a]));
            CHECK(jumps.modes.col(a).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
        }
    }
    SUBCASE("all-ones kernel: a single operator onto the decaying state") {
        const int n = 3;
        NetworkSpec net = NetworkSpec::uncoupled(n, 100.0, 0.0, 1.0);
        net.relaxation_couplings << 1.0, 2.0, 2.0;
        NoiseSpec noise{kPerfectCorrelation, 0.0, 1.0, 0.0};
        const auto jumps = build_jump_operators(net, CorrelationKernel::all_ones(n), noise);
        REQUIRE(jumps.size() == 1);
        CHECK(jumps.rates[0] == doctest::Approx(9.0));
        const Eigen::Vector3d d(1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0);
        CHECK(std::abs(jumps.modes.col(0).dot(d)) == doctest::Approx(1.0));
        const auto op = jumps.op(0);
        CHECK(op.row(n).head(n).cwiseAbs().transpose().isApprox(3.0 * d));
    }
    SUBCASE("xi = 2, N = 4: full rank and the trace identity") {
        const int n = 4;
        const auto net = NetworkSpec::chain(n, 1.0, 100.0, 0.0, 1.0);
        NoiseSpec noise{2.0, 0.0, 0.6, 0.0};
        const auto jumps = build_jump_operators(net, build_kernel(net.positions, 2.0), noise);
        CHECK(jumps.size() == 4);
        double total = 0.0;
        for (double r : jumps.rates) {
            CHECK(r > 0.0);
            total += r;
        }
        CHECK(total == doctest::Approx(n * 0.6));
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (std::size_t a = 0; a < jumps.size(); ++a) sum += (jumps.op(a).adjoint() * jumps.op(a)).real();
        const Eigen::MatrixXd m = 0.6 * build_kernel(net.positions, 2.0).matrix();
        CHECK((sum.topLeftCorner(n, n) - m).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((jumps.reconstruct() - m).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("non-PSD kernel is rejected") {
        Eigen::Matrix2d bad;
        bad << 1.0, 2.0, 2.0, 1.0;
        const auto net = NetworkSpec::chain(2, 1.0, 100.0, 0.0, 1.0);
        CHECK_THROWS_AS(build_jump_operators(net, CorrelationKernel(bad), NoiseSpec{0.0, 0.0, 1.0, 0.0}),
                        NumericalPsdError);
    }
}

TEST_CASE("jump-operator form equals the relaxation double sum") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int n : {2, 5, 8}) {
        NetworkSpec net = NetworkSpec::chain(n);
        for (int j = 0; j < n; ++j) net.relaxation_couplings(j) = u(rng);
        for (double xi : {0.0, 0.7, 3.0, kPerfectCorrelation}) {
            const auto kernel = build_kernel(net.positions, xi);
            NoiseSpec noise{xi, 0.0, 0.9, 0.0};
            const auto rho = random_hermitian(n + 1, rng);
            const auto jumps = build_jump_operators(net, kernel, noise);
            const auto direct = apply_relaxation_double_sum(rho, net, kernel, noise);
            CHECK((jumps.apply(rho) - direct).cwiseAbs().maxCoeff() < 1e-10);
            ReducedLiouvillian liouvillian(net, kernel, noise);
            const Eigen::MatrixXcd coherent =
                std::complex<double>(0.0, -1.0) *
                (liouvillian.hamiltonian().cast<std::complex<double>>() * rho -
                 rho * liouvillian.hamiltonian().cast<std::complex<double>>());
            CHECK((liouvillian.apply(rho) - coherent - direct).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("reduced engine refuses an upward bath") {
    const auto net = NetworkSpec::chain(3, 1.0, 100.0, 0.0, 1.0);
    CHECK_THROWS_AS(ReducedLiouvillian(net, CorrelationKernel::identity(3), NoiseSpec{0.0, 0.0, 1.0, 0.1}),
                    InputError);
}

TEST_CASE("sector embedding round trip and observables") {
    std::mt19937 rng(4);
    const ReducedState r{4, random_density(5, rng)};
    const auto full = embed_in_full(r);
    CHECK(std::abs(full.rho.trace() - 1.0) < 1e-12);
    CHECK((project_to_reduced(full).rho - r.rho).cwiseAbs().maxCoeff() == 0.0);
    const auto a = observe(r), b = observe(full);
    CHECK((a.sz - b.sz).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.abs_sx - b.abs_sx).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(a.purity == doctest::Approx(b.purity));

    const auto s = observe(ReducedState::site(4, 2));
    CHECK(s.sz(2) == 1.0);
    CHECK(s.sz(0) == -1.0);
    CHECK(observe(ReducedState::ground(3)).sz.isApprox(-Eigen::VectorXd::Ones(3)));
}

TEST_CASE("reduced and full engines agree on sector dynamics") {
    for (int n : {4, 5}) {
        for (double xi : {0.2, 2.0, 20.0}) {
            CAPTURE(n);
            CAPTURE(xi);
            const auto net = NetworkSpec::chain(n, 1.0, 100.0, 1.0, 0.5);
            const auto kernel = build_kernel(net.positions, xi);
            NoiseSpec noise{xi, 0.5, 0.5, 0.0};
            FullLiouvillian full_l(net, kernel, noise);
            ReducedLiouvillian reduced_l(net, kernel, noise);
            const double dt = std::min(full_l.default_dt(), reduced_l.default_dt());
            const EvolveOptions opts{std::numbers::pi, dt, 10};

            std::vector<Eigen::MatrixXcd> full_samples, reduced_samples;
            const std::array<int, 1> first{0};
            evolve_full(FullState::product(n, first), full_l, opts,
                        [&](double, const Eigen::MatrixXcd& rho) { full_samples.push_back(rho); });
            evolve_reduced(ReducedState::site(n, 0), reduced_l, opts,
                           [&](double, const Eigen::MatrixXcd& rho) { reduced_samples.push_back(rho); });
            REQUIRE(full_samples.size() == reduced_samples.size());
            double worst = 0.0, leak = 0.0;
            for (std::size_t i = 0; i < full_samples.size(); ++i) {
                const auto projected = project_to_reduced(FullState{n, full_samples[i]}).rho;
                worst = std::max(worst, (projected - reduced_samples[i]).cwiseAbs().maxCoeff());
                leak = std::max(leak, std::abs(1.0 - projected.trace().real()));
            }
            CHECK(worst < 1e-6);
            CHECK(leak < 1e-12);
        }
    }
}

TEST_CASE("reduced engine: coherent N=20 transfer and pure-dephasing populations") {
    const auto net = NetworkSpec::chain(20);
    ReducedLiouvillian coherent(net, CorrelationKernel::identity(20), NoiseSpec{});
    const auto r = evolve_reduced(ReducedState::site(20, 0), coherent, EvolveOptions{std::numbers::pi / 2.0, 0.0, 100000});
    CHECK(r.series.samples.back().sz(19) > 1.0 - 1e-6);
    CHECK(transfer_quality(r.series, 1.0, r.dt / 2.0) > 1.0 - 1e-6);

    const auto noisy_net = NetworkSpec::uncoupled(6, 100.0, 1.0, 0.0);
    NoiseSpec noise{1.0, 1.0, 0.0, 0.0};
    ReducedLiouvillian dephasing(noisy_net, build_kernel(noisy_net.positions, 1.0), noise);
    std::mt19937 rng(8);
    const ReducedState start{6, random_density(7, rng)};
    evolve_reduced(start, dephasing, EvolveOptions{3.0, 0.0, 5}, [&](double, const Eigen::MatrixXcd& rho) {
        CHECK((rho.diagonal() - start.rho.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
    });
}

TEST_CASE("perfectly correlated relaxation of uncoupled spins is partially blocked") {
    for (int n : {2, 4, 10}) {
        const auto net = NetworkSpec::uncoupled(n, 100.0, 0.0, 1.0);
        const auto kernel = CorrelationKernel::all_ones(n);
        NoiseSpec noise{kPerfectCorrelation, 0.0, 1.0, 0.0};
        ReducedLiouvillian liouvillian(net, kernel, noise);
        const auto run = evolve_until_stationary(ReducedState::site(n, 0), liouvillian);
        CHECK(run.converged);
        const auto obs = observe(run.state);
        const double expected = -1.0 + 2.0 * (n - 1.0) * (n - 1.0) / (n * n);
        CHECK(obs.sz(0) == doctest::Approx(expected).epsilon(1e-6));
        const auto predicted = predict_final_state(net, kernel, noise);
        CHECK((run.state.rho.real() - predicted.rho).cwiseAbs().maxCoeff() < 1e-6);
    }
}
