#include "doctest.h"

#include "corrnoise/config.hpp"
#include "corrnoise/errors.hpp"
#include "corrnoise/experiments.hpp"
#include "corrnoise/result_io.hpp"
#include "corrnoise/validate.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

using namespace corrnoise;

namespace {

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream s;
    write_csv(s, rows);
    return s.str();
}

} // namespace

TEST_CASE("config text parsing") {
    const auto m = parse_config_text("# comment\n n_spins = 12  # trailing\n\nxi_list = 0.5, 1,2\n");
    CHECK(m.at("n_spins") == "12");
    CHECK(m.at("xi_list") == "0.5, 1,2");
    CHECK_THROWS_AS(parse_config_text("n_spins 12\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("config defaults per scenario") {
    const auto c = make_config(Scenario::Evolve, {});
    CHECK(c.omega_q == 100.0);
    CHECK(c.g == 1.0);
    CHECK(c.c_relax_up == 0.0);
    const auto net = c.network();
    CHECK(net.coupling(0, 1) == doctest::Approx(std::sqrt(19.0)));

    const auto sweep = make_config(Scenario::SweepXi, {});
    CHECK(sweep.v == 1.0);
    CHECK(sweep.n_list == std::vector<int>{6, 10, 14, 20, 26});
    const auto grid = sweep.xi_grid();
    REQUIRE(grid.size() == 32);
    CHECK(grid.front() == doctest::Approx(0.1));
    CHECK(grid.back() == doctest::Approx(100.0));

    const auto block = make_config(Scenario::Blocking, {});
    CHECK(std::isinf(block.xi));
    CHECK(block.topology == Topology::Uncoupled);

    const auto strobe = make_config(Scenario::Strobe, {});
    CHECK(strobe.passes == 200);
    CHECK(strobe.xi == 100.0);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(make_config(Scenario::Evolve, {{"nonsense", "1"}}), ConfigError);
    CHECK_THROWS_AS(make_config(Scenario::Evolve, {{"n_spins", "abc"}}), ConfigError);
    CHECK_THROWS_AS(make_config(Scenario::Evolve, {{"scenario", "strobe"}}), ConfigError);
    CHECK_THROWS_AS(make_config(Scenario::SweepXi, {{"n_list", "6"}}), ConfigError);
    CHECK_THROWS_AS(make_config(Scenario::Strobe, {{"passes", "10"}}), ConfigError);
    CHECK_THROWS_AS(make_config(Scenario::Blocking, {{"topology", "chain"}}), ConfigError);
    CHECK_THROWS_AS(make_config(Scenario::Evolve, {{"engine", "gpu"}}), ConfigError);
    CHECK_THROWS_AS(read_config_file("/nonexistent/config.txt"), ConfigError);
    const auto c = make_config(Scenario::Evolve, {{"xi", "inf"}, {"dephasing_couplings", "1,0,1"}, {"n_spins", "3"}});
    CHECK(std::isinf(c.xi));
    CHECK(c.network().dephasing_couplings(1) == 0.0);
}

TEST_CASE("CSV rows round-trip") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<ResultRow> rows;
    for (int i = 0; i < 50; ++i) {
        ResultRow r;
        r.scenario = "evolve";
        r.n_spins = i;
        if (i % 2) r.xi = u(rng) * 1e-7;
        r.t = u(rng) * 1e5;
        if (i % 3) r.site = i % 7;
        r.sz = u(rng);
        if (i % 5) r.abs_sx = u(rng);
        r.purity = 1.0 / 3.0;
        if (i % 4 == 0) r.quality = std::numeric_limits<double>::infinity();
        r.extra = i % 2 ? "pass=3;x=1.5" : "";
        rows.push_back(r);
    }
    std::istringstream in(to_csv(rows));
    CHECK(read_csv(in) == rows);
    CHECK(format_number(1.0 / 3.0).size() >= 14);
    CHECK(extra_value("pass=3;x=1.5", "x") == std::optional<std::string>("1.5"));

    std::istringstream bad("scenario,N,xi\nfoo,1,2\n");
    CHECK_THROWS_WITH_AS(read_csv(bad), doctest::Contains("'t'"), InputError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), InputError);
    ResultRow comma;
    comma.extra = "a,b";
    CHECK_THROWS_AS(to_csv_line(comma), ContractError);
}

TEST_CASE("aligned step divides the period") {
    const double period = std::numbers::pi / 2.0;
    const double dt = aligned_step(0.013, period, 25);
    CHECK(dt <= 0.013);
    const double steps = period / dt;
    CHECK(std::abs(steps - std::round(steps)) < 1e-9);
    CHECK(static_cast<long>(std::llround(steps)) % 25 == 0);
}

TEST_CASE("engine selection") {
    CHECK(resolve_engine(EngineChoice::Auto, 20, 0.0) == EngineKind::Reduced);
    CHECK(resolve_engine(EngineChoice::Auto, 4, 0.1) == EngineKind::Full);
    CHECK(resolve_engine(EngineChoice::Auto, 8, 0.0, true) == EngineKind::Full);
    CHECK(resolve_engine(EngineChoice::Auto, 9, 0.0, true) == EngineKind::Reduced);
    CHECK(resolve_engine(EngineChoice::Full, 20, 0.0) == EngineKind::Full);
}

TEST_CASE("parallel_for covers every index and propagates exceptions") {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw InputError("boom");
                    }),
                    InputError);
}

TEST_CASE("evolve scenario: layout, engines agree, deterministic") {
    auto c = make_config(Scenario::Evolve, {{"n_spins", "5"}, {"v", "1"}, {"xi", "2"}});
    const auto reduced = run_evolve(c);
    REQUIRE(!reduced.rows.empty());
    // t-major, site-minor
    CHECK(reduced.rows[0].site == 1);
    CHECK(reduced.rows[4].site == 5);
    CHECK(reduced.rows[5].site == 1);
    CHECK(*reduced.rows[5].t > *reduced.rows[4].t);
    CHECK(reduced.rows[0].sz == doctest::Approx(1.0));
    // 4 passes x 25 samples + initial sample
    CHECK(reduced.rows.size() == 5 * 101);
    CHECK(reduced.summary.at("quality").get<double>() < 1.0);

    c.engine = EngineChoice::Full;
    const auto full = run_evolve(c);
    REQUIRE(full.rows.size() == reduced.rows.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < full.rows.size(); ++i) {
        worst = std::max(worst, std::abs(*full.rows[i].sz - *reduced.rows[i].sz));
        worst = std::max(worst, std::abs(*full.rows[i].abs_sx - *reduced.rows[i].abs_sx));
    }
    CHECK(worst < 1e-6);

    c.engine = EngineChoice::Reduced;
    CHECK(to_csv(run_evolve(c).rows) == to_csv(reduced.rows));
}

TEST_CASE("evolve scenario: coherent chain quality") {
    const auto r = run_evolve(make_config(Scenario::Evolve, {{"n_spins", "8"}}));
    CHECK(r.summary.at("quality").get<double>() > 1.0 - 1e-6);
}

TEST_CASE("sweep-xi: worker count does not change results") {
    ConfigMap m{{"n_list", "4,6"}, {"xi_points", "10"}};
    auto c = make_config(Scenario::SweepXi, m);
    c.workers = 1;
    const auto one = run_sweep_xi(c);
    c.workers = 3;
    const auto three = run_sweep_xi(c);
    CHECK(to_csv(one.rows) == to_csv(three.rows));
    CHECK(one.summary.dump() == three.summary.dump());
    CHECK(one.rows.size() == 20);
    const auto& curves = one.summary.at("curves");
    CHECK(curves.size() == 2);
}

TEST_CASE("blocking scenario matches the closed form") {
    const auto r = run_blocking(make_config(Scenario::Blocking, {{"n_list", "1,2,5"}}));
    REQUIRE(r.rows.size() == 3);
    CHECK(*r.rows[0].sz == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(*r.rows[1].sz == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(std::stod(*extra_value(r.rows[2].extra, "energy")) == doctest::Approx(1.6).epsilon(1e-6));
    CHECK(std::stod(*extra_value(r.rows[2].extra, "transferred")) == doctest::Approx(0.32).epsilon(1e-6));
    CHECK(r.summary.at("all_converged").get<bool>());
}

TEST_CASE("strobe scenario on a short chain") {
    const auto r = run_strobe(make_config(Scenario::Strobe, {{"n_spins", "6"}, {"passes", "40"}}));
    CHECK(r.rows.size() == 41 * 2);
    CHECK(r.rows[0].sz == doctest::Approx(1.0));
    CHECK(r.summary.at("fit_ok").get<bool>());
    for (const auto& row : r.rows) {
        CHECK(*row.fidelity >= -1e-12);
        CHECK(*row.fidelity <= 1.0 + 1e-9);
    }
}

TEST_CASE("validate scenario: clean run passes, injected faults are caught") {
    auto c = make_config(Scenario::Validate, {{"n_spins", "6"}});
    const auto clean = run_validate(c);
    for (const auto& s : clean.suites) {
        CAPTURE(s.name);
        CAPTURE(s.detail);
        CHECK(s.passed);
    }
    CHECK(clean.all_passed());

    c.inject_fault = Fault::SignFlip;
    const auto flipped = run_validate(c);
    CHECK_FALSE(flipped.all_passed());
    for (const auto& s : flipped.suites) CHECK(s.passed == (s.name != "full-vs-reduced"));

    c.inject_fault = Fault::LargeDt;
    const auto large = run_validate(c);
    CHECK_FALSE(large.all_passed());
    for (const auto& s : large.suites) {
        if (s.name == "trajectory-invariants") {
            CHECK_FALSE(s.passed);
            CHECK(s.detail.find("integration diverged") != std::string::npos);
        }
    }
}

TEST_CASE("outputs land in a fresh timestamped directory") {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "corrnoise_output_test";
    fs::remove_all(root);
    const auto r = run_blocking(make_config(Scenario::Blocking, {{"n_list", "2"}}));
    const auto a = write_outputs(r, root);
    const auto b = write_outputs(r, root);
    CHECK(a.dir != b.dir);
    CHECK(a.dir.filename().string().rfind("blocking_", 0) == 0);
    std::ifstream csv(a.csv);
    CHECK(read_csv(csv) == r.rows);
    std::ifstream x(a.csv), y(b.csv);
    std::stringstream sx, sy;
    sx << x.rdbuf();
    sy << y.rdbuf();
    CHECK(sx.str() == sy.str());
    CHECK(fs::exists(a.summary));
    fs::remove_all(root);
    CHECK_THROWS_AS(write_outputs(r, "/proc/forbidden_dir"), ResourceError);
}
