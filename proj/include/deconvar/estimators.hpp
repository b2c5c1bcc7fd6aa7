#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "deconvar/ar_process.hpp"
#include "deconvar/deconvolution.hpp"

namespace deconvar {

enum class EstimatorTag { DeconvN, DeconvSC, DeconvGeneral, Oracle, Naive, Arma };

std::string estimator_name(EstimatorTag tag);
EstimatorTag estimator_from_name(const std::string& name);

struct EstimateRecord {
    EstimatorTag tag = EstimatorTag::Naive;
    RegressionFamily family = RegressionFamily::Linear;
    std::vector<double> theta_hat;
    std::map<std::string, double> diagnostics;
};

/// Rectangular search region for the contrast minimiser.
struct ThetaBox {
    std::vector<std::array<double, 2>> bounds;

    static ThetaBox linear_default(); // [-0.99, 0.99] x [-5, 5]
    static ThetaBox cauchy_default(); // [-10, 10]
    static ThetaBox family_default(RegressionFamily family);
    void validate(int dim) const;
};

/// Deconvolution integrals of one data set, precomputed so that evaluating
/// the contrast at a parameter point costs O(1).
///
/// Linear family: with I_j(z) the deconvolution integral of x^j w(x),
///
///   S_n(a, b) = (1/n) sum_k [ (z_k^2 + b^2 - 2 b z_k) I_0(z_{k-1})
///                             + a^2 I_2(z_{k-1}) - 2 a (z_k - b) I_1(z_{k-1}) ]
///
/// which collapses onto six scalar sums.  Cauchy family: only the
/// theta-dependent part (theta^2 sum I_{wf^2} - 2 theta sum z_k I_{wf}) / n is
/// kept: the theta-free term would invert the weight on its own, which for
/// SC_c has no integrable transform, and a constant offset never moves the
/// minimiser.
///
/// Integrals are taken from the closed forms when the plan asks for them and
/// they exist (N-family weight built from the error sigma, no spectral
/// cutoff), and from the numeric grid otherwise.
class ContrastCache {
public:
    ContrastCache(std::span<const double> z, RegressionFamily family, const WeightSpec& w,
                  const ErrorModel& err, const InversionPlan& plan,
                  const KernelSpec& kernel = KernelSpec::none());

    double value(std::span<const double> theta) const;
    /// Exact minimiser of the quadratic contrast.  Throws
    /// DegenerateDesignError when the normal system is near singular or the
    /// series is (near) constant.
    std::vector<double> closed_minimizer() const;

    RegressionFamily family() const { return family_; }
    long n() const { return n_; }
    bool used_closed_integrals() const { return closed_integrals_; }

    struct LinearSums {
        double i0 = 0.0, i1 = 0.0, i2 = 0.0;       // sums of I_j(z_{k-1})
        double z_i0 = 0.0, z_i1 = 0.0, zz_i0 = 0.0; // sums weighted by z_k, z_k^2
    };
    struct CauchySums {
        double wf2 = 0.0;     // sum I_{w f^2}(z_{k-1})
        double z_wf = 0.0;    // sum z_k I_{w f}(z_{k-1})
        double abs_wf2 = 0.0; // sum |I_{w f^2}|, scale for the degeneracy test
    };
    const LinearSums& linear_sums() const;
    const CauchySums& cauchy_sums() const;

private:
    RegressionFamily family_ = RegressionFamily::Linear;
    long n_ = 0;
    bool closed_integrals_ = false;
    LinearSums lin_{};
    CauchySums cau_{};
    double z_mean_ = 0.0;
    double z_var_ = 0.0;
};

/// Contrast value at theta (builds the cache internally; use ContrastCache
/// directly when evaluating at many parameter points).
double contrast(std::span<const double> theta, std::span<const double> z,
                RegressionFamily family, const WeightSpec& w, const ErrorModel& err,
                const InversionPlan& plan);

/// Exact minimiser for the linear family.
EstimateRecord estimate_linear_closed(std::span<const double> z, const WeightSpec& w,
                                      const ErrorModel& err, const InversionPlan& plan);

/// Exact minimiser for the Cauchy family.
EstimateRecord estimate_cauchy_closed(std::span<const double> z, const WeightSpec& w,
                                      const ErrorModel& err, const InversionPlan& plan);

/// Generic minimiser: coarse 21-points-per-axis scan of the box, then
/// Nelder-Mead polish.  Ties in the scan resolve to the lexicographically
/// smallest point.  Results on the box boundary are flagged in diagnostics.
EstimateRecord estimate_argmin(std::span<const double> z, RegressionFamily family,
                               const ThetaBox& box, const WeightSpec& w, const ErrorModel& err,
                               const InversionPlan& plan,
                               const KernelSpec& kernel = KernelSpec::none());

/// Spectral-cutoff variant: same contrast with the integrand multiplied by
/// K*(t/cutoff).  With the identity kernel this is exactly estimate_argmin.
EstimateRecord estimate_general(std::span<const double> z, RegressionFamily family,
                                const ThetaBox& box, const WeightSpec& w, const ErrorModel& err,
                                const KernelSpec& kernel, const InversionPlan& plan);

/// Least squares on the observed series, ignoring the measurement error.
EstimateRecord estimate_naive(std::span<const double> z, RegressionFamily family);

/// Least squares on the latent series (available in simulations only).
EstimateRecord estimate_oracle(std::span<const double> x, RegressionFamily family);

/// Linear family baseline: conditional-sum-of-squares fit of the ARMA(1,1)
/// representation z_i - a z_{i-1} = b + eta_i - beta eta_{i-1} implied by
/// AR(1) dynamics under additive observation error.  Non-convergence is
/// flagged in diagnostics rather than thrown; near-cancellation of the AR
/// and MA roots is flagged as weak identification.
EstimateRecord estimate_arma(std::span<const double> z);

} // namespace deconvar
