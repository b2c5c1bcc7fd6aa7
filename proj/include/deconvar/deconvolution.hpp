#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "deconvar/noise_models.hpp"
#include "deconvar/weight_functions.hpp"

namespace deconvar {

enum class EvalMode { ClosedForm, NumericGrid };
enum class BatchStrategy { Auto, Direct, Fft };

/// Grid description for the numeric Fourier inversion
///
///   I(z) = (1/2pi) Re integral phi*(t) / cf_eps(-t) e^{-itz} dt
///
/// evaluated by the trapezoid rule on [-t_max, t_max] with `points`
/// intervals.  `points` must be a power of two (>= 256) so the batched
/// evaluation can always switch to an FFT.  `mode` tells estimators whether
/// to prefer the closed-form integrals where they exist; the numeric
/// routines themselves ignore it.
struct InversionPlan {
    double t_max = 4.0;
    long points = 4096;
    EvalMode mode = EvalMode::ClosedForm;
    BatchStrategy batch = BatchStrategy::Auto;

    void validate() const;
};

/// Plan with the natural range for the weight: the SC transform is supported
/// on [-4, 4] exactly; the N transform is cut where the integrand drops
/// below 1e-12, at t_max = sqrt(2 ln 1e12) / sigma.
InversionPlan default_plan(const WeightSpec& w, const ErrorModel& err, long points = 4096);
double default_t_max(const WeightSpec& w, const ErrorModel& err);

/// Spectral cutoff multiplier K*(t / cutoff) applied to the integrand.
/// K*(u) = 1 for |u| <= 1-delta, 0 for |u| > 1, cosine-tapered between.
/// delta = 0 gives the sharp indicator, which is implemented as plain grid
/// truncation to [-min(t_max, cutoff), +min(t_max, cutoff)].  An infinite
/// cutoff with delta = 0 leaves the integrand untouched bit for bit.
struct KernelSpec {
    double cutoff = std::numeric_limits<double>::infinity();
    double delta = 0.0;

    static KernelSpec none();
    static KernelSpec indicator(double cutoff);
    static KernelSpec tapered(double cutoff, double delta);

    bool is_identity() const;
    double eval(double u) const;
    void validate() const;
};

/// Closed form of the deconvolution integral for the N-family weights, for
/// both supported error laws.  Available pairs mirror
/// weighted_product_fourier: P0/P1/P2 for the plain N weight, FCauchy and
/// FCauchySq for N_c.  The weight must be built from the error sigma.
double deconv_closed(const WeightSpec& w, const ErrorModel& err, ProductFn g, double z);

using PhiStar = std::function<std::complex<double>(double)>;

/// Transform of g.w as a callable, for feeding the numeric inversion.
PhiStar make_product_transform(const WeightSpec& w, ProductFn g);

double deconv_numeric(const PhiStar& phi_star, const ErrorModel& err, double z,
                      const InversionPlan& plan);

struct DeconvValue {
    double value = 0.0;
    double imag_residual = 0.0; // should vanish for symmetric integrands
};

DeconvValue deconv_numeric_debug(const PhiStar& phi_star, const ErrorModel& err, double z,
                                 const InversionPlan& plan);

/// Batched inversion sharing one integrand pass across all z.  Strategy
/// Auto uses the FFT lattice for large batches and the direct kernel
/// otherwise.
std::vector<double> deconv_numeric_batch(const PhiStar& phi_star, const ErrorModel& err,
                                         std::span<const double> z, const InversionPlan& plan);

double kernel_deconv(const PhiStar& phi_star, const ErrorModel& err, double z,
                     const KernelSpec& kernel, const InversionPlan& plan);

std::vector<double> kernel_deconv_batch(const PhiStar& phi_star, const ErrorModel& err,
                                        std::span<const double> z, const KernelSpec& kernel,
                                        const InversionPlan& plan);

/// Laplace errors invert in closed form for any twice-differentiable phi:
/// 1/cf_eps(-t) = 1 + sigma^2 t^2 / 2, and the t^2 factor is -phi'' after
/// inversion, so I(z) = phi(z) - (sigma^2/2) phi''(z).  Used as an
/// independent cross-check of the grid path.
double laplace_shortcut(const std::function<double(double)>& phi,
                        const std::function<double(double)>& phi_dd, const ErrorModel& err,
                        double z);

namespace detail {

/// Trapezoid-ready integrand samples: coeff[k] already carries the trapezoid
/// weight, the kernel multiplier and the 1/2pi factor, so an inversion is
/// just Re sum coeff[k] e^{-i t_k z} with t_k = t0 + k dt.
struct Integrand {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<std::complex<double>> coeff;
};

Integrand build_integrand(const PhiStar& phi_star, const ErrorModel& err,
                          const KernelSpec* kernel, const InversionPlan& plan);

double eval_direct_one(const Integrand& q, double z);
DeconvValue eval_direct_one_debug(const Integrand& q, double z);

/// Reference loop over the batch, one z at a time.
std::vector<double> eval_direct_serial(const Integrand& q, std::span<const double> z);
/// Same computation with the z loop parallelised; results are bit-identical
/// to the serial kernel for any thread count since iterations are independent.
std::vector<double> eval_direct_parallel(const Integrand& q, std::span<const double> z);
/// Evaluate on a zero-padded FFT lattice and interpolate (Catmull-Rom).
std::vector<double> eval_fft_batch(const Integrand& q, std::span<const double> z);

} // namespace detail

} // namespace deconvar
