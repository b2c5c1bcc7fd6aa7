#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <json.hpp>

#include "deconvar/ar_process.hpp"
#include "deconvar/errors.hpp"
#include "deconvar/json_io.hpp"
#include "deconvar/rng.hpp"
#include "test_util.hpp"

using namespace deconvar;

TEST_CASE("regression maps evaluate correctly") {
    const auto lin = RegressionModel::linear(0.5, 0.25);
    CHECK(lin.eval(1.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(lin.eval(-2.0) == doctest::Approx(-0.75).epsilon(1e-15));
    CHECK(lin.theta() == std::vector<double>{0.5, 0.25});

    const auto cau = RegressionModel::cauchy(1.5);
    CHECK(cau.eval(0.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(cau.eval(1.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(cau.theta() == std::vector<double>{1.5});

    // The span-based evaluator agrees with the model's own.
    const std::vector<double> th{0.5, 0.25};
    CHECK(eval_regression(RegressionFamily::Linear, th, 3.0) == lin.eval(3.0));
    const std::vector<double> tc{1.5};
    CHECK(eval_regression(RegressionFamily::Cauchy, tc, 2.0) == cau.eval(2.0));
}

TEST_CASE("simulate consumes draws in the documented order") {
    Scenario s;
    s.regression = RegressionModel::linear(0.4, 0.1);
    s.innovation = InnovationModel::two_point(0.2);
    s.error = ErrorModel::laplace(0.3);
    s.init = InitKind::UniformUnit;
    s.burn_in = 5;
    s.n = 20;

    RngStream rng = RngStream::seeded(9001);
    const auto traj = simulate(s, rng);

    // Replay: one init uniform, burn_in + n innovations, then n + 1 errors.
    RngStream replay = RngStream::seeded(9001);
    double x = replay.next_uniform01();
    for (int i = 0; i < 5; ++i) x = s.regression.eval(x) + s.innovation.sample(replay);
    std::vector<double> xs{x};
    for (int i = 0; i < 20; ++i) {
        x = s.regression.eval(x) + s.innovation.sample(replay);
        xs.push_back(x);
    }
    std::vector<double> zs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) zs[i] = xs[i] + s.error.sample(replay);

    REQUIRE(traj.x.size() == 21);
    REQUIRE(traj.z.size() == 21);
    CHECK(traj.x == xs);
    CHECK(traj.z == zs);
}

TEST_CASE("a constant regression map pins the chain to its fixed point") {
    Scenario s;
    s.regression = RegressionModel::linear(0.0, 0.7);
    s.innovation = InnovationModel::gaussian(1e-12);
    s.error = ErrorModel::gaussian(1e-12);
    s.init = InitKind::FixedValue;
    s.init_value = 0.0;
    s.burn_in = 2;
    s.n = 50;
    RngStream rng = RngStream::seeded(4);
    const auto traj = simulate(s, rng);
    for (std::size_t i = 0; i < traj.z.size(); ++i)
        CHECK(traj.z[i] == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("preset definitions") {
    SUBCASE("case-a") {
        const auto s = preset_case_a(1000, 0.5, ErrorKind::Laplace);
        CHECK(s.regression.family == RegressionFamily::Linear);
        CHECK(s.regression.p0 == doctest::Approx(0.5));
        CHECK(s.regression.p1 == doctest::Approx(0.25));
        CHECK(s.innovation.kind == InnovationKind::TwoPoint);
        CHECK(s.innovation.param == doctest::Approx(0.25));
        CHECK(s.burn_in == 0);
        CHECK(s.error.kind == ErrorKind::Laplace);
        // sigma = sqrt(s2n * stationary variance 1/12)
        CHECK(s.error.sigma_eps == doctest::Approx(0.2041241452319315).epsilon(1e-14));
    }
    SUBCASE("case-b") {
        const auto s = preset_case_b(500, 1.0, ErrorKind::Gaussian);
        CHECK(s.regression.p0 == doctest::Approx(1.0 / 3.0));
        CHECK(s.regression.p1 == doctest::Approx(1.0 / 3.0));
        CHECK(s.innovation.param == doctest::Approx(1.0 / 3.0));
        CHECK(s.burn_in == 1000);
        CHECK(s.error.kind == ErrorKind::Gaussian);
        // stationary variance of the Cantor-type chain is 1/8
        CHECK(s.error.sigma_eps == doctest::Approx(std::sqrt(1.0 / 8.0)).epsilon(1e-14));
    }
    SUBCASE("cauchy") {
        const auto s = preset_cauchy(500, 1.5, ErrorKind::Laplace);
        CHECK(s.regression.family == RegressionFamily::Cauchy);
        CHECK(s.regression.p0 == doctest::Approx(1.5));
        CHECK(s.innovation.kind == InnovationKind::Gaussian);
        CHECK(s.innovation.param == doctest::Approx(0.1));
        CHECK(s.burn_in == 1000);
        // state variance is close to 0.1, so sigma = sqrt(s2n * 0.1)
        CHECK(s.error.sigma_eps == doctest::Approx(0.3872983346207417).epsilon(1e-14));
    }
    SUBCASE("by name") {
        CHECK(preset_by_name("case-a", 10, 0.5, ErrorKind::Laplace).n == 10);
        CHECK_THROWS_AS(preset_by_name("nope", 10, 0.5, ErrorKind::Laplace), ConfigError);
        CHECK_THROWS_AS(preset_case_a(10, -1.0, ErrorKind::Laplace), ConfigError);
    }
}

TEST_CASE("case-a latent chain is exactly stationary uniform on [0,1]") {
    // x' = x/2 + 1/4 +- 1/4 maps U[0,1] to U[0,1]; with no burn-in the whole
    // path is stationary: mean 1/2, variance 1/12.
    const auto s = preset_case_a(100000, 0.5, ErrorKind::Laplace);
    RngStream rng = RngStream::seeded(31337);
    const auto traj = simulate(s, rng);
    for (double v : traj.x) REQUIRE((v >= 0.0 && v <= 1.0));
    const auto m = test_util::moments(traj.x);
    // AR(1) dependence inflates Var(mean) by (1+a)/(1-a) = 3.
    const double se_mean = std::sqrt(3.0 / (12.0 * 1e5));
    CHECK(std::abs(m.mean - 0.5) < 5.0 * se_mean);
    CHECK(m.var == doctest::Approx(1.0 / 12.0).epsilon(0.03));
}

TEST_CASE("case-b latent chain has the Cantor-type stationary variance 1/8") {
    const auto s = preset_case_b(100000, 0.5, ErrorKind::Laplace);
    RngStream rng = RngStream::seeded(99);
    const auto traj = simulate(s, rng);
    const auto m = test_util::moments(traj.x);
    CHECK(std::abs(m.mean - 0.5) < 0.01);
    CHECK(m.var == doctest::Approx(0.125).epsilon(0.04));
}

TEST_CASE("observation errors are independent of the latent path") {
    const auto s = preset_case_a(100000, 1.0, ErrorKind::Gaussian);
    RngStream rng = RngStream::seeded(7);
    const auto traj = simulate(s, rng);
    double cxy = 0.0, mx = 0.0, me = 0.0;
    std::vector<double> eps(traj.x.size());
    for (std::size_t i = 0; i < traj.x.size(); ++i) eps[i] = traj.z[i] - traj.x[i];
    for (std::size_t i = 0; i < traj.x.size(); ++i) {
        mx += traj.x[i];
        me += eps[i];
    }
    mx /= static_cast<double>(traj.x.size());
    me /= static_cast<double>(traj.x.size());
    for (std::size_t i = 0; i < traj.x.size(); ++i) cxy += (traj.x[i] - mx) * (eps[i] - me);
    cxy /= static_cast<double>(traj.x.size());
    const double corr =
        cxy / std::sqrt(test_util::moments(traj.x).var * test_util::moments(eps).var);
    CHECK(std::abs(corr) < 0.015);
}

TEST_CASE("an explosive map triggers the divergence guard") {
    Scenario s;
    s.regression = RegressionModel::linear(1.5, 1.0);
    s.innovation = InnovationModel::two_point(0.1);
    s.error = ErrorModel::laplace(0.1);
    s.init = InitKind::FixedValue;
    s.init_value = 1.0;
    s.burn_in = 0;
    s.n = 2000;
    RngStream rng = RngStream::seeded(1);
    CHECK_THROWS_AS(simulate(s, rng), DivergenceError);
}

TEST_CASE("same seed reproduces the trajectory exactly") {
    const auto s = preset_case_b(2000, 1.5, ErrorKind::Gaussian);
    RngStream r1 = RngStream::seeded(123);
    RngStream r2 = RngStream::seeded(123);
    const auto t1 = simulate(s, r1);
    const auto t2 = simulate(s, r2);
    CHECK(t1.x == t2.x);
    CHECK(t1.z == t2.z);
}

TEST_CASE("scenario JSON round-trip preserves every field") {
    Scenario s;
    s.regression = RegressionModel::cauchy(2.5);
    s.innovation = InnovationModel::gaussian(0.2);
    s.error = ErrorModel::gaussian(0.7);
    s.init = InitKind::FixedValue;
    s.init_value = -1.25;
    s.burn_in = 42;
    s.n = 314;

    const nlohmann::json j = s;
    const Scenario back = j.get<Scenario>();
    CHECK(back.regression.family == s.regression.family);
    CHECK(back.regression.p0 == s.regression.p0);
    CHECK(back.innovation.kind == s.innovation.kind);
    CHECK(back.innovation.param == s.innovation.param);
    CHECK(back.error.kind == s.error.kind);
    CHECK(back.error.sigma_eps == s.error.sigma_eps);
    CHECK(back.init == s.init);
    CHECK(back.init_value == s.init_value);
    CHECK(back.burn_in == s.burn_in);
    CHECK(back.n == s.n);

    // Malformed documents are rejected with a clear error.
    CHECK_THROWS(nlohmann::json::parse(R"({"regression": 3})").get<Scenario>());
}
