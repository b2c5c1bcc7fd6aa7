#include "deconvar/weight_functions.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "deconvar/errors.hpp"

namespace deconvar {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

void require_sigma(const WeightSpec& w) {
    if (w.base == WeightBase::N && !(w.sigma_eps > 0.0))
        throw ConfigError("N weight needs a positive sigma");
}

} // namespace

WeightSpec WeightSpec::n(double sigma_eps) {
    WeightSpec w{WeightBase::N, false, sigma_eps};
    require_sigma(w);
    return w;
}

WeightSpec WeightSpec::sc() { return WeightSpec{WeightBase::SC, false, 0.0}; }

WeightSpec WeightSpec::n_c(double sigma_eps) {
    WeightSpec w{WeightBase::N, true, sigma_eps};
    require_sigma(w);
    return w;
}

WeightSpec WeightSpec::sc_c() { return WeightSpec{WeightBase::SC, true, 0.0}; }

std::string WeightSpec::name() const {
    std::string base_name = base == WeightBase::N ? "n" : "sc";
    return cauchy_factor ? base_name + "_c" : base_name;
}

double weight_eval(const WeightSpec& w, double x) {
    double value;
    if (w.base == WeightBase::N) {
        require_sigma(w);
        const double s2 = w.sigma_eps * w.sigma_eps;
        value = std::exp(-x * x / (4.0 * s2));
    } else {
        const double s = sinc(x);
        const double s2 = s * s;
        value = (16.0 / (2.0 * kPi)) * s2 * s2;
    }
    if (w.cauchy_factor) {
        const double c = 1.0 + x * x;
        value *= c * c;
    }
    return value;
}

// The SC transform and its first two derivatives.  Pieces, with knots at
// -4, -2, 0, 2, 4 (left piece wins at interior knots):
//   [-4,-2]:  t^3/6 + 2t^2 + 8t + 32/3
//   [-2, 0]: -t^3/2 - 2t^2       + 16/3
//   [ 0, 2]:  t^3/2 - 2t^2       + 16/3
//   [ 2, 4]: -t^3/6 + 2t^2 - 8t + 32/3
double sc_fourier(double t) {
    if (t <= -4.0 || t >= 4.0) return 0.0;
    if (t <= -2.0) return t * t * t / 6.0 + 2.0 * t * t + 8.0 * t + 32.0 / 3.0;
    if (t <= 0.0) return -t * t * t / 2.0 - 2.0 * t * t + 16.0 / 3.0;
    if (t <= 2.0) return t * t * t / 2.0 - 2.0 * t * t + 16.0 / 3.0;
    return -t * t * t / 6.0 + 2.0 * t * t - 8.0 * t + 32.0 / 3.0;
}

double sc_fourier_d1(double t) {
    if (t <= -4.0 || t >= 4.0) return 0.0;
    if (t <= -2.0) return 0.5 * t * t + 4.0 * t + 8.0;
    if (t <= 0.0) return -1.5 * t * t - 4.0 * t;
    if (t <= 2.0) return 1.5 * t * t - 4.0 * t;
    return -0.5 * t * t + 4.0 * t - 8.0;
}

double sc_fourier_d2(double t) {
    if (t <= -4.0 || t >= 4.0) return 0.0;
    if (t <= -2.0) return t + 4.0;
    if (t <= 0.0) return -3.0 * t - 4.0;
    if (t <= 2.0) return 3.0 * t - 4.0;
    return -t + 4.0;
}

namespace {

// (x^j N)*(t) for j in {0,1,2,4}; multiplying by x corresponds to (1/i) d/dt
// on the transform side, so these are scaled Hermite polynomials times the
// Gaussian N*(t) = 2 sigma sqrt(pi) exp(-sigma^2 t^2).
std::complex<double> gauss_poly_transform(double sigma, int j, double t) {
    const double s2 = sigma * sigma;
    const double amp = 2.0 * sigma * std::sqrt(kPi) * std::exp(-s2 * t * t);
    switch (j) {
        case 0: return {amp, 0.0};
        case 1: return {0.0, 2.0 * s2 * t * amp};
        case 2: return {(2.0 * s2 - 4.0 * s2 * s2 * t * t) * amp, 0.0};
        case 4: {
            const double s4 = s2 * s2;
            const double poly = 12.0 * s4 - 48.0 * s4 * s2 * t * t + 16.0 * s4 * s4 * t * t * t * t;
            return {poly * amp, 0.0};
        }
        default: throw UnsupportedCombination("unsupported monomial order");
    }
}

[[noreturn]] void throw_unsupported_pair(const WeightSpec& w, ProductFn g) {
    const char* gname = "?";
    switch (g) {
        case ProductFn::P0: gname = "1"; break;
        case ProductFn::P1: gname = "x"; break;
        case ProductFn::P2: gname = "x^2"; break;
        case ProductFn::FCauchy: gname = "1/(1+x^2)"; break;
        case ProductFn::FCauchySq: gname = "1/(1+x^2)^2"; break;
    }
    throw UnsupportedCombination("no closed transform for weight '" + w.name() +
                                 "' with factor " + gname);
}

} // namespace

std::complex<double> weighted_product_fourier(const WeightSpec& w, ProductFn g, double t) {
    require_sigma(w);
    if (!w.cauchy_factor) {
        if (g != ProductFn::P0 && g != ProductFn::P1 && g != ProductFn::P2)
            throw_unsupported_pair(w, g);
        const int j = g == ProductFn::P0 ? 0 : (g == ProductFn::P1 ? 1 : 2);
        if (w.base == WeightBase::N)
            return gauss_poly_transform(w.sigma_eps, j, t);
        switch (j) {
            case 0: return {sc_fourier(t), 0.0};
            case 1: return {0.0, -sc_fourier_d1(t)};
            default: return {-sc_fourier_d2(t), 0.0};
        }
    }

    // Cauchy-factor weights: w_c = (1+x^2)^2 w, so w_c/(1+x^2) = (1+x^2) w
    // and w_c/(1+x^2)^2 = w.  The extra x^2 w term is again a monomial
    // transform (for N) or -d^2/dt^2 of the base transform (for SC).
    if (g == ProductFn::FCauchySq) {
        if (w.base == WeightBase::N) return gauss_poly_transform(w.sigma_eps, 0, t);
        return {sc_fourier(t), 0.0};
    }
    if (g == ProductFn::FCauchy) {
        if (w.base == WeightBase::N)
            return gauss_poly_transform(w.sigma_eps, 0, t) + gauss_poly_transform(w.sigma_eps, 2, t);
        return {sc_fourier(t) - sc_fourier_d2(t), 0.0};
    }
    throw_unsupported_pair(w, g);
}

namespace {

// Trapezoid value of |psi| over [-T, T] with M intervals.
double magnitude_trapezoid(const std::function<double(double)>& magnitude, double T, long M) {
    const double h = 2.0 * T / static_cast<double>(M);
    double acc = 0.5 * (magnitude(-T) + magnitude(T));
    for (long k = 1; k < M; ++k) acc += magnitude(-T + h * static_cast<double>(k));
    return acc * h;
}

C11Integral refine_integral(std::string name, const std::function<double(double)>& magnitude,
                            bool fixed_range, double T0) {
    C11Integral out;
    out.name = std::move(name);
    double T = T0;
    long M = 2048;
    double prev = std::numeric_limits<double>::quiet_NaN();
    int small_deltas = 0;
    for (int pass = 0; pass < 14; ++pass) {
        const double value = magnitude_trapezoid(magnitude, T, M);
        if (!std::isfinite(value)) {
            out.value = value;
            out.converged = false;
            return out;
        }
        if (std::isfinite(prev)) {
            const double delta = std::abs(value - prev);
            small_deltas = delta <= 1e-6 * std::max(1.0, std::abs(value)) ? small_deltas + 1 : 0;
            if (small_deltas >= 2) {
                out.value = value;
                out.converged = true;
                return out;
            }
        }
        prev = value;
        M *= 2;
        if (!fixed_range) T *= 1.4;
    }
    out.value = prev;
    out.converged = false;
    return out;
}

} // namespace

C11Report condition_c11_report(const WeightSpec& w, const ErrorModel& err,
                               const RegressionModel& reg) {
    require_sigma(w);
    const bool linear = reg.family == RegressionFamily::Linear;
    if (linear && w.cauchy_factor)
        throw UnsupportedCombination("Cauchy-factor weights pair with the Cauchy family");
    if (!linear && !w.cauchy_factor)
        throw UnsupportedCombination("the Cauchy family needs a Cauchy-factor weight");

    const bool fixed_range = w.base == WeightBase::SC;
    const double T0 = fixed_range ? 4.0 : 10.0 / w.sigma_eps;

    auto inv_cf = [err](double t) { return 1.0 / err.cf(t); };

    C11Report report;
    if (!w.cauchy_factor) {
        const double a = reg.p0;
        const double b = reg.p1;
        auto wp = [&](ProductFn g, double t) { return weighted_product_fourier(w, g, t); };
        report.integrals.push_back(refine_integral(
            "w*/cf_eps",
            [&](double t) { return std::abs(wp(ProductFn::P0, t)) * inv_cf(t); },
            fixed_range, T0));
        report.integrals.push_back(refine_integral(
            "(f w)*/cf_eps",
            [&](double t) {
                return std::abs(a * wp(ProductFn::P1, t) + b * wp(ProductFn::P0, t)) * inv_cf(t);
            },
            fixed_range, T0));
        report.integrals.push_back(refine_integral(
            "(f^2 w)*/cf_eps",
            [&](double t) {
                return std::abs(a * a * wp(ProductFn::P2, t) + 2.0 * a * b * wp(ProductFn::P1, t) +
                                b * b * wp(ProductFn::P0, t)) *
                       inv_cf(t);
            },
            fixed_range, T0));
    } else {
        const double theta = reg.p0;
        if (w.base == WeightBase::N) {
            const double sigma = w.sigma_eps;
            report.integrals.push_back(refine_integral(
                "w*/cf_eps",
                [&, sigma](double t) {
                    const auto value = gauss_poly_transform(sigma, 0, t) +
                                       2.0 * gauss_poly_transform(sigma, 2, t) +
                                       gauss_poly_transform(sigma, 4, t);
                    return std::abs(value) * inv_cf(t);
                },
                fixed_range, T0));
        } else {
            C11Integral skipped;
            skipped.name = "w*/cf_eps";
            skipped.applicable = false;
            skipped.note = "weight not integrable; the contrast never inverts it alone";
            report.integrals.push_back(skipped);
        }
        report.integrals.push_back(refine_integral(
            "(f w)*/cf_eps",
            [&](double t) {
                return std::abs(theta * weighted_product_fourier(w, ProductFn::FCauchy, t)) * inv_cf(t);
            },
            fixed_range, T0));
        report.integrals.push_back(refine_integral(
            "(f^2 w)*/cf_eps",
            [&](double t) {
                return std::abs(theta * theta *
                                weighted_product_fourier(w, ProductFn::FCauchySq, t)) *
                       inv_cf(t);
            },
            fixed_range, T0));
    }

    report.all_converged = true;
    for (const auto& entry : report.integrals)
        if (entry.applicable && !entry.converged) report.all_converged = false;
    return report;
}

} // namespace deconvar
