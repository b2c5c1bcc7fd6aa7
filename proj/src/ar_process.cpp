#include "deconvar/ar_process.hpp"

#include <cmath>
#include <string>

#include "deconvar/errors.hpp"

namespace deconvar {

namespace {
constexpr double kDivergenceBound = 1e12;
}

RegressionModel RegressionModel::linear(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw ConfigError("linear regression parameters must be finite");
    return RegressionModel{RegressionFamily::Linear, a, b};
}

RegressionModel RegressionModel::cauchy(double theta) {
    if (!std::isfinite(theta))
        throw ConfigError("cauchy regression parameter must be finite");
    return RegressionModel{RegressionFamily::Cauchy, theta, 0.0};
}

double RegressionModel::eval(double x) const {
    if (family == RegressionFamily::Linear)
        return p0 * x + p1;
    return p0 / (1.0 + x * x);
}

std::vector<double> RegressionModel::theta() const {
    if (family == RegressionFamily::Linear) return {p0, p1};
    return {p0};
}

double eval_regression(RegressionFamily family, std::span<const double> theta, double x) {
    if (family == RegressionFamily::Linear)
        return theta[0] * x + theta[1];
    return theta[0] / (1.0 + x * x);
}

void Scenario::validate() const {
    if (n < 1) throw ConfigError("scenario needs n >= 1 transitions");
    if (burn_in < 0) throw ConfigError("burn_in must be non-negative");
    if (!(error.sigma_eps > 0.0)) throw ConfigError("sigma_eps must be positive");
    if (!(innovation.param > 0.0)) throw ConfigError("innovation parameter must be positive");
    if (init == InitKind::FixedValue && !std::isfinite(init_value))
        throw ConfigError("init_value must be finite");
}

TrajectoryPair simulate(const Scenario& scenario, RngStream& rng) {
    scenario.validate();

    double x = scenario.init == InitKind::UniformUnit ? rng.next_uniform01()
                                                      : scenario.init_value;

    auto step = [&](double current) {
        const double next = scenario.regression.eval(current) + scenario.innovation.sample(rng);
        if (!(std::abs(next) <= kDivergenceBound))
            throw DivergenceError("latent chain diverged beyond 1e12");
        return next;
    };

    for (long i = 0; i < scenario.burn_in; ++i) x = step(x);

    TrajectoryPair out;
    out.x.resize(static_cast<std::size_t>(scenario.n) + 1);
    out.x[0] = x;
    for (long i = 1; i <= scenario.n; ++i)
        out.x[static_cast<std::size_t>(i)] = x = step(x);

    out.z.resize(out.x.size());
    for (std::size_t i = 0; i < out.x.size(); ++i)
        out.z[i] = out.x[i] + scenario.error.sample(rng);
    return out;
}

namespace {

ErrorModel make_error(ErrorKind kind, double sigma_eps) {
    return kind == ErrorKind::Laplace ? ErrorModel::laplace(sigma_eps)
                                      : ErrorModel::gaussian(sigma_eps);
}

void require_s2n(double s2n) {
    if (!(s2n > 0.0) || !std::isfinite(s2n))
        throw ConfigError("s2n must be a positive finite real");
}

} // namespace

Scenario preset_case_a(long n, double s2n, ErrorKind error_kind) {
    require_s2n(s2n);
    Scenario s;
    s.regression = RegressionModel::linear(0.5, 0.25);
    s.innovation = InnovationModel::two_point(0.25);
    s.error = make_error(error_kind, std::sqrt(s2n / 12.0));
    s.init = InitKind::UniformUnit;
    s.burn_in = 0;
    s.n = n;
    s.validate();
    return s;
}

Scenario preset_case_b(long n, double s2n, ErrorKind error_kind) {
    require_s2n(s2n);
    Scenario s;
    s.regression = RegressionModel::linear(1.0 / 3.0, 1.0 / 3.0);
    s.innovation = InnovationModel::two_point(1.0 / 3.0);
    s.error = make_error(error_kind, std::sqrt(s2n / 8.0));
    s.init = InitKind::UniformUnit;
    s.burn_in = 1000;
    s.n = n;
    s.validate();
    return s;
}

Scenario preset_cauchy(long n, double s2n, ErrorKind error_kind) {
    require_s2n(s2n);
    Scenario s;
    s.regression = RegressionModel::cauchy(1.5);
    s.innovation = InnovationModel::gaussian(0.1);
    s.error = make_error(error_kind, std::sqrt(s2n * 0.1));
    s.init = InitKind::UniformUnit;
    s.burn_in = 1000;
    s.n = n;
    s.validate();
    return s;
}

Scenario preset_by_name(const std::string& name, long n, double s2n, ErrorKind error_kind) {
    if (name == "case-a") return preset_case_a(n, s2n, error_kind);
    if (name == "case-b") return preset_case_b(n, s2n, error_kind);
    if (name == "cauchy") return preset_cauchy(n, s2n, error_kind);
    throw ConfigError("unknown preset '" + name + "' (expected case-a, case-b or cauchy)");
}

} // namespace deconvar
