#include "deconvar/deconvolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "deconvar/errors.hpp"
#include "deconvar/fft.hpp"

namespace deconvar {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kTailTau = 1e-12; // relative size of the neglected N-weight tail
}

void InversionPlan::validate() const {
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw ConfigError("t_max must be positive and finite");
    if (points < 256)
        throw ConfigError("inversion grid needs at least 256 intervals");
    if (!is_pow2(static_cast<std::size_t>(points)))
        throw ConfigError("inversion grid size must be a power of two");
}

double default_t_max(const WeightSpec& w, const ErrorModel& err) {
    (void)err; // both error laws keep the integrand sub-Gaussian in t
    if (w.base == WeightBase::SC) return 4.0;
    if (!(w.sigma_eps > 0.0)) throw ConfigError("N weight needs a positive sigma");
    return std::sqrt(2.0 * std::log(1.0 / kTailTau)) / w.sigma_eps;
}

InversionPlan default_plan(const WeightSpec& w, const ErrorModel& err, long points) {
    InversionPlan plan;
    plan.t_max = default_t_max(w, err);
    plan.points = points;
    plan.validate();
    return plan;
}

KernelSpec KernelSpec::none() { return KernelSpec{}; }

KernelSpec KernelSpec::indicator(double cutoff) {
    KernelSpec k{cutoff, 0.0};
    k.validate();
    return k;
}

KernelSpec KernelSpec::tapered(double cutoff, double delta) {
    KernelSpec k{cutoff, delta};
    k.validate();
    return k;
}

bool KernelSpec::is_identity() const {
    return std::isinf(cutoff) && delta == 0.0;
}

double KernelSpec::eval(double u) const {
    const double au = std::abs(u);
    if (au <= 1.0 - delta) return 1.0;
    if (au > 1.0) return 0.0;
    if (delta == 0.0) return 1.0; // |u| == 1 exactly
    const double s = (au - (1.0 - delta)) / delta;
    const double c = std::cos(0.5 * kPi * s);
    return c * c;
}

void KernelSpec::validate() const {
    if (std::isnan(cutoff) || !(cutoff > 0.0))
        throw ConfigError("kernel cutoff must be positive");
    if (!(delta >= 0.0) || !(delta < 1.0))
        throw ConfigError("kernel taper fraction must lie in [0, 1)");
}

double deconv_closed(const WeightSpec& w, const ErrorModel& err, ProductFn g, double z) {
    if (w.base != WeightBase::N)
        throw UnsupportedCombination("closed deconvolution forms exist for the N-family weights only");
    const double sigma = err.sigma_eps;
    if (!(sigma > 0.0)) throw ConfigError("sigma_eps must be positive");
    if (std::abs(w.sigma_eps - sigma) > 1e-12 * std::max(1.0, sigma))
        throw UnsupportedCombination("closed forms assume the N weight is built from the error sigma");

    const double s2 = sigma * sigma;
    const double z2 = z * z;

    if (!w.cauchy_factor) {
        if (g != ProductFn::P0 && g != ProductFn::P1 && g != ProductFn::P2)
            throw UnsupportedCombination("plain N weight pairs with the monomials 1, x, x^2");
        if (err.kind == ErrorKind::Laplace) {
            const double E = std::exp(-z2 / (4.0 * s2));
            switch (g) {
                case ProductFn::P0: return (1.25 - z2 / (8.0 * s2)) * E;
                case ProductFn::P1: return (1.75 * z - z2 * z / (8.0 * s2)) * E;
                default: return (-s2 + 2.25 * z2 - z2 * z2 / (8.0 * s2)) * E;
            }
        }
        const double E = std::exp(-z2 / (2.0 * s2));
        switch (g) {
            case ProductFn::P0: return kSqrt2 * E;
            case ProductFn::P1: return 2.0 * kSqrt2 * z * E;
            default: return kSqrt2 * (4.0 * z2 - 2.0 * s2) * E;
        }
    }

    if (g != ProductFn::FCauchy && g != ProductFn::FCauchySq)
        throw UnsupportedCombination("N_c pairs with 1/(1+x^2) and 1/(1+x^2)^2");
    if (err.kind == ErrorKind::Laplace) {
        const double E = std::exp(-z2 / (4.0 * s2));
        if (g == ProductFn::FCauchySq) return (1.25 - z2 / (8.0 * s2)) * E;
        return E * (10.0 * s2 - 8.0 * s2 * s2 + 18.0 * s2 * z2 - z2 - z2 * z2) / (8.0 * s2);
    }
    const double E = std::exp(-z2 / (2.0 * s2));
    if (g == ProductFn::FCauchySq) return kSqrt2 * E;
    return kSqrt2 * E * (1.0 - 2.0 * s2 + 4.0 * z2);
}

PhiStar make_product_transform(const WeightSpec& w, ProductFn g) {
    // Probe once so unsupported pairs fail at construction, not mid-grid.
    (void)weighted_product_fourier(w, g, 0.0);
    return [w, g](double t) { return weighted_product_fourier(w, g, t); };
}

namespace detail {

Integrand build_integrand(const PhiStar& phi_star, const ErrorModel& err,
                          const KernelSpec* kernel, const InversionPlan& plan) {
    plan.validate();
    if (kernel) kernel->validate();

    double t_hi = plan.t_max;
    const bool sharp = kernel && kernel->delta == 0.0 && std::isfinite(kernel->cutoff);
    if (sharp) t_hi = std::min(t_hi, kernel->cutoff);
    const bool multiply = kernel && !kernel->is_identity() && !sharp;

    const long m = plan.points;
    Integrand q;
    q.t0 = -t_hi;
    q.dt = 2.0 * t_hi / static_cast<double>(m);
    q.coeff.resize(static_cast<std::size_t>(m) + 1);
    const double scale = q.dt / (2.0 * kPi);
    for (long k = 0; k <= m; ++k) {
        const double t = q.t0 + q.dt * static_cast<double>(k);
        std::complex<double> psi = phi_star(t) / err.cf(-t);
        if (multiply) psi *= kernel->eval(t / kernel->cutoff);
        psi *= (k == 0 || k == m ? 0.5 : 1.0) * scale;
        if (!std::isfinite(psi.real()) || !std::isfinite(psi.imag()))
            throw NumericError("non-finite integrand sample at t = " + std::to_string(t));
        q.coeff[static_cast<std::size_t>(k)] = psi;
    }
    return q;
}

DeconvValue eval_direct_one_debug(const Integrand& q, double z) {
    // e^{-i t_k z} tracked by one rotation per grid step.
    const std::complex<double> rot = std::polar(1.0, -q.dt * z);
    std::complex<double> phase = std::polar(1.0, -q.t0 * z);
    std::complex<double> acc{0.0, 0.0};
    for (const auto& c : q.coeff) {
        acc += c * phase;
        phase *= rot;
    }
    return {acc.real(), acc.imag()};
}

double eval_direct_one(const Integrand& q, double z) {
    return eval_direct_one_debug(q, z).value;
}

std::vector<double> eval_direct_serial(const Integrand& q, std::span<const double> z) {
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = eval_direct_one(q, z[i]);
    return out;
}

std::vector<double> eval_direct_parallel(const Integrand& q, std::span<const double> z) {
    std::vector<double> out(z.size());
    const std::int64_t n = static_cast<std::int64_t>(z.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = eval_direct_one(q, z[static_cast<std::size_t>(i)]);
    return out;
}

std::vector<double> eval_fft_batch(const Integrand& q, std::span<const double> z) {
    if (z.empty()) return {};
    const std::size_t m1 = q.coeff.size();
    const std::size_t m = m1 - 1;

    const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
    const double zmin = *lo_it;
    const double zmax = *hi_it;

    // Oversample the lattice ~64x relative to the integrand bandwidth; the
    // cubic interpolation error is then a few 1e-8 of the value scale.
    std::size_t L = next_pow2(std::max<std::size_t>(64 * m, m1));
    if (L < 4096) L = 4096;
    const double dz = 2.0 * kPi / (static_cast<double>(L) * q.dt);

    // The lattice is periodic with period L*dz; fall back to the direct
    // kernel for batches spread wider than that (never the case for the
    // z-ranges this library works on).
    if (zmax - zmin > 0.9 * static_cast<double>(L) * dz)
        return eval_direct_parallel(q, z);

    const double anchor = zmin - 2.0 * dz;
    const std::size_t window =
        static_cast<std::size_t>(std::ceil((zmax - anchor) / dz)) + 4;

    std::vector<std::complex<double>> buf(L, {0.0, 0.0});
    for (std::size_t k = 0; k < m1; ++k) {
        const double t = q.t0 + q.dt * static_cast<double>(k);
        buf[k] = q.coeff[k] * std::polar(1.0, -t * anchor);
    }
    fft_pow2(buf, -1);

    std::vector<double> lattice(window);
    for (std::size_t j = 0; j < window; ++j) {
        const double shift = -q.t0 * (static_cast<double>(j) * dz);
        lattice[j] = (std::polar(1.0, shift) * buf[j]).real();
    }

    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double u = (z[i] - anchor) / dz;
        const std::size_t j = static_cast<std::size_t>(u);
        const double s = u - static_cast<double>(j);
        const double p0 = lattice[j - 1];
        const double p1 = lattice[j];
        const double p2 = lattice[j + 1];
        const double p3 = lattice[j + 2];
        out[i] = p1 + 0.5 * s *
                          (p2 - p0 +
                           s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                s * (3.0 * (p1 - p2) + p3 - p0)));
    }
    return out;
}

namespace {

std::vector<double> route_batch(const Integrand& q, std::span<const double> z,
                                BatchStrategy strategy) {
    switch (strategy) {
        case BatchStrategy::Direct: return eval_direct_parallel(q, z);
        case BatchStrategy::Fft: return eval_fft_batch(q, z);
        case BatchStrategy::Auto:
        default:
            return z.size() >= 64 ? eval_fft_batch(q, z) : eval_direct_parallel(q, z);
    }
}

} // namespace

} // namespace detail

double deconv_numeric(const PhiStar& phi_star, const ErrorModel& err, double z,
                      const InversionPlan& plan) {
    const auto q = detail::build_integrand(phi_star, err, nullptr, plan);
    return detail::eval_direct_one(q, z);
}

DeconvValue deconv_numeric_debug(const PhiStar& phi_star, const ErrorModel& err, double z,
                                 const InversionPlan& plan) {
    const auto q = detail::build_integrand(phi_star, err, nullptr, plan);
    return detail::eval_direct_one_debug(q, z);
}

std::vector<double> deconv_numeric_batch(const PhiStar& phi_star, const ErrorModel& err,
                                         std::span<const double> z, const InversionPlan& plan) {
    const auto q = detail::build_integrand(phi_star, err, nullptr, plan);
    return detail::route_batch(q, z, plan.batch);
}

double kernel_deconv(const PhiStar& phi_star, const ErrorModel& err, double z,
                     const KernelSpec& kernel, const InversionPlan& plan) {
    const auto q = detail::build_integrand(phi_star, err, &kernel, plan);
    return detail::eval_direct_one(q, z);
}

std::vector<double> kernel_deconv_batch(const PhiStar& phi_star, const ErrorModel& err,
                                        std::span<const double> z, const KernelSpec& kernel,
                                        const InversionPlan& plan) {
    const auto q = detail::build_integrand(phi_star, err, &kernel, plan);
    return detail::route_batch(q, z, plan.batch);
}

double laplace_shortcut(const std::function<double(double)>& phi,
                        const std::function<double(double)>& phi_dd, const ErrorModel& err,
                        double z) {
    if (err.kind != ErrorKind::Laplace)
        throw UnsupportedCombination("the differential shortcut holds for Laplace errors only");
    const double s2 = err.sigma_eps * err.sigma_eps;
    return phi(z) - 0.5 * s2 * phi_dd(z);
}

} // namespace deconvar
