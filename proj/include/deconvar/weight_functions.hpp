#pragma once

#include <complex>
#include <string>
#include <vector>

#include "deconvar/ar_process.hpp"
#include "deconvar/noise_models.hpp"

namespace deconvar {

// Fourier convention used throughout: phi*(t) = integral phi(x) e^{itx} dx,
// inverted by phi(x) = (1/2pi) integral phi*(t) e^{-itx} dt.

enum class WeightBase { N, SC };

/// Weight function of the least-squares contrast.
///
///   N:  w(x) = exp(-x^2 / (4 sigma^2)), built from the error sigma so that
///       products with the error characteristic function stay integrable.
///   SC: w(x) = (1/2pi) (2 sin(x)/x)^4, whose Fourier transform is a
///       piecewise cubic supported on [-4, 4].
///
/// With cauchy_factor set, the weight is multiplied by (1+x^2)^2, which
/// cancels the denominators of the Cauchy-type regression inside the
/// contrast.
struct WeightSpec {
    WeightBase base = WeightBase::SC;
    bool cauchy_factor = false;
    double sigma_eps = 0.0; // scale of the N weight; ignored for SC

    static WeightSpec n(double sigma_eps);
    static WeightSpec sc();
    static WeightSpec n_c(double sigma_eps);
    static WeightSpec sc_c();

    std::string name() const;
};

double weight_eval(const WeightSpec& w, double x);

/// Fourier transform of the SC weight: piecewise cubic on [-4,4], zero
/// outside, C^2 everywhere.  Interior piece boundaries evaluate the left
/// piece; continuity makes the choice immaterial up to rounding.
double sc_fourier(double t);
double sc_fourier_d1(double t);
double sc_fourier_d2(double t);

/// Functions multiplied by the weight before transforming.
///   P0, P1, P2      : x^0, x^1, x^2            (linear-family contrast)
///   FCauchy         : 1/(1+x^2)                (Cauchy family, with w = w_c)
///   FCauchySq       : 1/(1+x^2)^2
enum class ProductFn { P0, P1, P2, FCauchy, FCauchySq };

/// Closed form of (g . w)*(t) for the supported pairs:
///   base weights N, SC with P0, P1, P2;
///   Cauchy-factor weights N_c, SC_c with FCauchy, FCauchySq.
/// Anything else throws UnsupportedCombination.
std::complex<double> weighted_product_fourier(const WeightSpec& w, ProductFn g, double t);

struct C11Integral {
    std::string name;
    double value = 0.0;
    bool converged = false;
    bool applicable = true;
    std::string note;
};

/// Integrability diagnostic for the contrast: numerically integrates
/// |w*| / cf_eps, |(f w)*| / cf_eps and |(f^2 w)*| / cf_eps with grid (and,
/// for the N weight, range) refinement, reporting a convergence flag per
/// integral instead of failing.
///
/// The weight must match the regression family (base weights with the linear
/// family, Cauchy-factor weights with the Cauchy family).  The w* entry for
/// SC_c is reported as not applicable: that weight is not integrable and the
/// contrast never inverts it on its own.
struct C11Report {
    std::vector<C11Integral> integrals;
    bool all_converged = false;
};

C11Report condition_c11_report(const WeightSpec& w, const ErrorModel& err,
                               const RegressionModel& reg);

} // namespace deconvar
