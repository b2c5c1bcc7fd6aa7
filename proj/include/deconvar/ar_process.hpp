#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deconvar/noise_models.hpp"
#include "deconvar/rng.hpp"

namespace deconvar {

enum class RegressionFamily { Linear, Cauchy };

/// Parametric regression function of the latent chain.
///
///   Linear:  f(x) = a*x + b          theta = (a, b)
///   Cauchy:  f(x) = theta / (1+x^2)  theta = (theta)
struct RegressionModel {
    RegressionFamily family = RegressionFamily::Linear;
    double p0 = 0.0; // a, or theta for the Cauchy family
    double p1 = 0.0; // b (unused for Cauchy)

    static RegressionModel linear(double a, double b);
    static RegressionModel cauchy(double theta);

    int dim() const { return family == RegressionFamily::Linear ? 2 : 1; }
    double eval(double x) const;
    std::vector<double> theta() const;
};

/// Evaluate the regression family at an arbitrary parameter point.
double eval_regression(RegressionFamily family, std::span<const double> theta, double x);

enum class InitKind { UniformUnit, FixedValue };

/// Full description of the data-generating process: latent autoregression
/// plus additive observation error.
struct Scenario {
    RegressionModel regression;
    InnovationModel innovation;
    ErrorModel error;
    InitKind init = InitKind::UniformUnit;
    double init_value = 0.0; // used when init == FixedValue
    long burn_in = 0;
    long n = 0; // number of transitions; the trajectory has n+1 points

    void validate() const;
};

struct TrajectoryPair {
    std::vector<double> x; // latent chain, size n+1
    std::vector<double> z; // observed chain, size n+1
};

/// Run the recursion x[i] = f(x[i-1]) + xi[i] after the burn-in phase and
/// attach observation errors z[i] = x[i] + eps[i].
///
/// Draw order (relied upon by replay-style tests): one uniform for a
/// UniformUnit start, then burn_in + n innovations, then n+1 errors.
/// Throws DivergenceError if the chain leaves [-1e12, 1e12].
TrajectoryPair simulate(const Scenario& scenario, RngStream& rng);

/// Linear f(x) = x/2 + 1/4 with innovations +-1/4 and a Uniform[0,1] start.
/// The chain is stationary from index 0 (stationary law Uniform[0,1],
/// Var X = 1/12), so no burn-in is applied.  sigma_eps = sqrt(s2n/12).
Scenario preset_case_a(long n, double s2n, ErrorKind error_kind = ErrorKind::Laplace);

/// Linear f(x) = x/3 + 1/3 with innovations +-1/3; stationary law is the
/// Cantor-type measure with Var X = 1/8, reached through 1000 burn-in steps.
/// sigma_eps = sqrt(s2n/8).
Scenario preset_case_b(long n, double s2n, ErrorKind error_kind = ErrorKind::Laplace);

/// Nonlinear f(x) = theta/(1+x^2) with theta = 1.5 and N(0, 0.01)
/// innovations, 1000 burn-in steps.  The stationary variance is close to
/// 0.1, and sigma_eps = sqrt(s2n * 0.1) keeps the requested noise ratio.
Scenario preset_cauchy(long n, double s2n, ErrorKind error_kind = ErrorKind::Laplace);

/// Build a preset by name: "case-a", "case-b" or "cauchy".
Scenario preset_by_name(const std::string& name, long n, double s2n,
                        ErrorKind error_kind = ErrorKind::Laplace);

} // namespace deconvar
