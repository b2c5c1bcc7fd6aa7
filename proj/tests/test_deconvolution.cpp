#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "deconvar/deconvolution.hpp"
#include "deconvar/errors.hpp"
#include "deconvar/fft.hpp"
#include "deconvar/rng.hpp"
#include "deconvar/weight_functions.hpp"
#include "test_util.hpp"

using namespace deconvar;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
    return out;
}

// Closed-form references computed directly in the test from the algebraic
// expressions, independent of the library's dispatch.
double ref_laplace_p0(double s, double z) {
    return (1.25 - z * z / (8.0 * s * s)) * std::exp(-z * z / (4.0 * s * s));
}
double ref_laplace_p1(double s, double z) {
    return (1.75 * z - z * z * z / (8.0 * s * s)) * std::exp(-z * z / (4.0 * s * s));
}
double ref_laplace_p2(double s, double z) {
    return (-s * s + 2.25 * z * z - z * z * z * z / (8.0 * s * s)) *
           std::exp(-z * z / (4.0 * s * s));
}
double ref_gauss_p0(double s, double z) {
    return std::sqrt(2.0) * std::exp(-z * z / (2.0 * s * s));
}
double ref_gauss_p1(double s, double z) { return 2.0 * z * ref_gauss_p0(s, z); }
double ref_gauss_p2(double s, double z) {
    return (4.0 * z * z - 2.0 * s * s) * ref_gauss_p0(s, z);
}

} // namespace

TEST_CASE("plan and kernel validation") {
    InversionPlan plan;
    plan.t_max = 4.0;
    plan.points = 4096;
    plan.validate(); // fine
    plan.points = 1000; // not a power of two
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan.points = 64; // too small
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan.points = 4096;
    plan.t_max = -1.0;
    CHECK_THROWS_AS(plan.validate(), ConfigError);

    CHECK_THROWS_AS(KernelSpec::indicator(-2.0).validate(), ConfigError);
    CHECK_THROWS_AS(KernelSpec::tapered(2.0, 1.0).validate(), ConfigError);
    CHECK(KernelSpec::none().is_identity());
    CHECK_FALSE(KernelSpec::indicator(2.0).is_identity());

    const auto taper = KernelSpec::tapered(2.0, 0.5);
    CHECK(taper.eval(0.3) == 1.0);
    CHECK(taper.eval(0.5) == 1.0);
    CHECK(taper.eval(1.1) == 0.0);
    CHECK(taper.eval(0.75) == doctest::Approx(0.5).epsilon(1e-12)); // midpoint of taper
    CHECK(taper.eval(-0.75) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("default plan ranges") {
    const auto err = ErrorModel::laplace(0.5);
    CHECK(default_t_max(WeightSpec::sc(), err) == doctest::Approx(4.0));
    CHECK(default_t_max(WeightSpec::sc_c(), err) == doctest::Approx(4.0));
    // N transform decays like exp(-sigma^2 t^2): cut where it reaches 1e-12.
    const double expected = std::sqrt(2.0 * std::log(1e12)) / 0.5;
    CHECK(default_t_max(WeightSpec::n(0.5), err) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("closed-form deconvolution spot values") {
    CHECK(deconv_closed(WeightSpec::n(1.0), ErrorModel::gaussian(1.0), ProductFn::P0, 0.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(deconv_closed(WeightSpec::n(0.7), ErrorModel::laplace(0.7), ProductFn::P0, 0.0) ==
          doctest::Approx(1.25).epsilon(1e-15));
    CHECK(deconv_closed(WeightSpec::n_c(1.0), ErrorModel::laplace(1.0), ProductFn::FCauchy,
                        0.0) == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(deconv_closed(WeightSpec::n_c(1.0), ErrorModel::gaussian(1.0), ProductFn::FCauchy,
                        0.0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
    // P1 vanishes at z = 0 by symmetry
    CHECK(deconv_closed(WeightSpec::n(0.5), ErrorModel::laplace(0.5), ProductFn::P1, 0.0) ==
          doctest::Approx(0.0));

    // full z-dependence against the in-test algebra
    for (double s : {0.4, 1.0}) {
        for (double z : {-1.7, -0.3, 0.8, 2.2}) {
            const auto wl = WeightSpec::n(s);
            const auto lap = ErrorModel::laplace(s);
            CHECK(deconv_closed(wl, lap, ProductFn::P0, z) ==
                  doctest::Approx(ref_laplace_p0(s, z)).epsilon(1e-13));
            CHECK(deconv_closed(wl, lap, ProductFn::P1, z) ==
                  doctest::Approx(ref_laplace_p1(s, z)).epsilon(1e-13));
            CHECK(deconv_closed(wl, lap, ProductFn::P2, z) ==
                  doctest::Approx(ref_laplace_p2(s, z)).epsilon(1e-13));
            const auto gau = ErrorModel::gaussian(s);
            CHECK(deconv_closed(wl, gau, ProductFn::P0, z) ==
                  doctest::Approx(ref_gauss_p0(s, z)).epsilon(1e-13));
            CHECK(deconv_closed(wl, gau, ProductFn::P1, z) ==
                  doctest::Approx(ref_gauss_p1(s, z)).epsilon(1e-13));
            CHECK(deconv_closed(wl, gau, ProductFn::P2, z) ==
                  doctest::Approx(ref_gauss_p2(s, z)).epsilon(1e-13));
        }
    }
}

TEST_CASE("closed form requires the weight built from the error sigma") {
    CHECK_THROWS_AS(
        deconv_closed(WeightSpec::n(0.5), ErrorModel::laplace(0.6), ProductFn::P0, 0.0),
        UnsupportedCombination);
    CHECK_THROWS_AS(
        deconv_closed(WeightSpec::sc(), ErrorModel::laplace(0.5), ProductFn::P0, 0.0),
        UnsupportedCombination);
}

TEST_CASE("numeric inversion reproduces the closed forms") {
    for (double s : {0.5, 1.0}) {
        const auto lap = ErrorModel::laplace(s);
        const auto gau = ErrorModel::gaussian(s);
        const auto w = WeightSpec::n(s);
        const auto wc = WeightSpec::n_c(s);
        const InversionPlan plan = default_plan(w, lap, 16384);
        for (double z : linspace(-3.0, 3.0, 13)) {
            for (auto g : {ProductFn::P0, ProductFn::P1, ProductFn::P2}) {
                const auto phi = make_product_transform(w, g);
                CHECK(std::abs(deconv_numeric(phi, lap, z, plan) - deconv_closed(w, lap, g, z)) <
                      1e-6);
                CHECK(std::abs(deconv_numeric(phi, gau, z, plan) - deconv_closed(w, gau, g, z)) <
                      1e-6);
            }
            for (auto g : {ProductFn::FCauchy, ProductFn::FCauchySq}) {
                const auto phi = make_product_transform(wc, g);
                CHECK(std::abs(deconv_numeric(phi, lap, z, plan) -
                               deconv_closed(wc, lap, g, z)) < 1e-6);
                CHECK(std::abs(deconv_numeric(phi, gau, z, plan) -
                               deconv_closed(wc, gau, g, z)) < 1e-6);
            }
        }
    }
}

TEST_CASE("with (near) zero noise the inversion returns the weight itself") {
    const auto err = ErrorModel::laplace(1e-9);
    const auto phi = make_product_transform(WeightSpec::sc(), ProductFn::P0);
    InversionPlan plan;
    plan.t_max = 4.0;
    plan.points = 16384;
    for (double z : {0.0, 0.5, 1.9, 3.3}) {
        const double expected = weight_eval(WeightSpec::sc(), z);
        CHECK(std::abs(deconv_numeric(phi, err, z, plan) - expected) < 1e-5);
    }
}

TEST_CASE("Laplace shortcut agrees with both closed and grid paths") {
    SUBCASE("N weight") {
        const double s = 0.7;
        const auto err = ErrorModel::laplace(s);
        auto phi = [s](double x) { return std::exp(-x * x / (4.0 * s * s)); };
        auto phi_dd = [s, phi](double x) {
            return (x * x / (4.0 * s * s * s * s) - 1.0 / (2.0 * s * s)) * phi(x);
        };
        for (double z : {-1.5, 0.0, 0.4, 2.0}) {
            const double shortcut = laplace_shortcut(phi, phi_dd, err, z);
            CHECK(shortcut == doctest::Approx(deconv_closed(WeightSpec::n(s), err,
                                                            ProductFn::P0, z))
                                  .epsilon(1e-12));
        }
    }
    SUBCASE("SC weight, second derivative by finite differences") {
        const double s = 0.35;
        const auto err = ErrorModel::laplace(s);
        const auto w = WeightSpec::sc();
        auto phi = [&](double x) { return weight_eval(w, x); };
        auto phi_dd = [&](double x) {
            const double h = 1e-4;
            return (phi(x + h) - 2.0 * phi(x) + phi(x - h)) / (h * h);
        };
        const auto phi_star = make_product_transform(w, ProductFn::P0);
        InversionPlan plan;
        plan.t_max = 4.0;
        plan.points = 16384;
        for (double z : {-2.4, -0.8, 0.0, 1.2, 2.9}) {
            const double shortcut = laplace_shortcut(phi, phi_dd, err, z);
            const double numeric = deconv_numeric(phi_star, err, z, plan);
            CHECK(std::abs(shortcut - numeric) < 1e-5);
        }
    }
}

TEST_CASE("spectral truncation") {
    const auto err = ErrorModel::laplace(0.4);
    const auto phi = make_product_transform(WeightSpec::sc(), ProductFn::P0);
    InversionPlan plan;
    plan.t_max = 4.0;
    plan.points = 4096;

    SUBCASE("a sharp cutoff inside the range equals a plan with that range") {
        InversionPlan narrow = plan;
        narrow.t_max = 2.0;
        for (double z : {-1.2, 0.0, 0.7, 2.5}) {
            const double truncated =
                kernel_deconv(phi, err, z, KernelSpec::indicator(2.0), plan);
            const double direct = deconv_numeric(phi, err, z, narrow);
            CHECK(truncated == direct); // bit-identical by construction
        }
    }
    SUBCASE("a cutoff at or beyond the range is the identity") {
        for (double z : {-0.9, 0.3, 1.8}) {
            const double base = deconv_numeric(phi, err, z, plan);
            CHECK(kernel_deconv(phi, err, z, KernelSpec::indicator(4.0), plan) ==
                  doctest::Approx(base).epsilon(1e-10));
            CHECK(kernel_deconv(phi, err, z, KernelSpec::indicator(17.0), plan) == base);
            CHECK(kernel_deconv(phi, err, z, KernelSpec::none(), plan) == base);
        }
    }
    SUBCASE("a taper changes the value but stays close for wide cutoffs") {
        const double z = 0.6;
        const double base = deconv_numeric(phi, err, z, plan);
        const double tapered =
            kernel_deconv(phi, err, z, KernelSpec::tapered(3.9, 0.1), plan);
        CHECK(tapered != base);
        CHECK(std::abs(tapered - base) < 0.05);
    }
}

TEST_CASE("grid refinement is converged at the default resolution") {
    const auto err = ErrorModel::gaussian(0.5);
    const auto w = WeightSpec::n(0.5);
    const auto phi = make_product_transform(w, ProductFn::P2);
    const InversionPlan coarse = default_plan(w, err, 4096);
    InversionPlan fine = coarse;
    fine.points = 16384;
    for (double z : {-2.0, -0.4, 0.9, 3.0})
        CHECK(std::abs(deconv_numeric(phi, err, z, coarse) -
                       deconv_numeric(phi, err, z, fine)) < 1e-8);
}

TEST_CASE("batched strategies agree") {
    const auto err = ErrorModel::laplace(0.3);
    const auto phi = make_product_transform(WeightSpec::sc(), ProductFn::P1);
    InversionPlan direct_plan;
    direct_plan.t_max = 4.0;
    direct_plan.points = 4096;
    direct_plan.batch = BatchStrategy::Direct;
    InversionPlan fft_plan = direct_plan;
    fft_plan.batch = BatchStrategy::Fft;

    RngStream rng = RngStream::seeded(5150);
    std::vector<double> z(2000);
    for (auto& v : z) v = 6.0 * rng.next_uniform01() - 3.0;

    const auto direct = deconv_numeric_batch(phi, err, z, direct_plan);
    const auto fft = deconv_numeric_batch(phi, err, z, fft_plan);
    REQUIRE(direct.size() == fft.size());
    double max_diff = 0.0, max_mag = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(direct[i] - fft[i]));
        max_mag = std::max(max_mag, std::abs(direct[i]));
    }
    CHECK(max_diff < 1e-6 * std::max(1.0, max_mag));

    // the one-at-a-time API agrees with the batch
    for (std::size_t i : {0u, 500u, 1999u})
        CHECK(deconv_numeric(phi, err, z[i], direct_plan) == direct[i]);

    // Auto routes small batches through the direct kernel
    InversionPlan auto_plan = direct_plan;
    auto_plan.batch = BatchStrategy::Auto;
    const std::vector<double> small{z.begin(), z.begin() + 5};
    const auto small_auto = deconv_numeric_batch(phi, err, small, auto_plan);
    const auto small_direct = deconv_numeric_batch(phi, err, small, direct_plan);
    CHECK(small_auto == small_direct);
}

TEST_CASE("FFT batch falls back gracefully for very wide z spans") {
    const auto err = ErrorModel::laplace(0.3);
    const auto phi = make_product_transform(WeightSpec::sc(), ProductFn::P0);
    InversionPlan plan;
    plan.t_max = 4.0;
    plan.points = 256; // small grid -> small lattice period
    plan.batch = BatchStrategy::Fft;
    std::vector<double> z;
    for (int i = 0; i < 200; ++i) z.push_back(-4000.0 + 40.0 * i); // span 8000
    const auto fft = deconv_numeric_batch(phi, err, z, plan);
    InversionPlan direct = plan;
    direct.batch = BatchStrategy::Direct;
    const auto ref = deconv_numeric_batch(phi, err, z, direct);
    for (std::size_t i = 0; i < z.size(); ++i)
        CHECK(std::abs(fft[i] - ref[i]) < 1e-9);
}

TEST_CASE("unbiasedness on synthetic draws (small n sanity check)") {
    // I_w(Z) with Z = X + eps is an unbiased estimate of E w(X): compare the
    // sample mean over noisy draws with a quadrature of w over the X law.
    RngStream rng = RngStream::seeded(808);
    const double s = 0.5;
    const auto err = ErrorModel::laplace(s);
    const auto w = WeightSpec::sc();
    const auto phi = make_product_transform(w, ProductFn::P0);
    InversionPlan plan;
    plan.t_max = 4.0;
    plan.points = 4096;

    const std::size_t n = 20000;
    std::vector<double> z(n);
    for (auto& v : z) v = rng.next_uniform01() + err.sample(rng); // X ~ U[0,1]
    const auto vals = deconv_numeric_batch(phi, err, z, plan);

    const double target = test_util::trapezoid(
        [&](double x) { return weight_eval(w, x); }, 0.0, 1.0, 20000);
    const auto m = test_util::moments(vals);
    const double se = std::sqrt(m.var / static_cast<double>(n));
    CHECK(std::abs(m.mean - target) < 4.0 * se);
}

TEST_CASE("non-finite integrand samples raise a numeric error") {
    const auto err = ErrorModel::laplace(0.5);
    PhiStar bad = [](double t) {
        return std::complex<double>(t == 0.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0,
                                    0.0);
    };
    InversionPlan plan;
    plan.t_max = 4.0;
    plan.points = 4096;
    CHECK_THROWS_AS(kernel_deconv(bad, err, 0.0, KernelSpec::none(), plan), NumericError);
}

TEST_CASE("imaginary residual of symmetric integrands vanishes") {
    const auto err = ErrorModel::gaussian(0.6);
    const auto w = WeightSpec::n(0.6);
    const auto phi = make_product_transform(w, ProductFn::P0);
    const InversionPlan plan = default_plan(w, err, 4096);
    for (double z : {-1.0, 0.0, 2.3}) {
        const auto dv = deconv_numeric_debug(phi, err, z, plan);
        CHECK(std::abs(dv.imag_residual) < 1e-8);
    }
}

TEST_CASE("unsupported product transforms fail at construction") {
    CHECK_THROWS_AS(make_product_transform(WeightSpec::sc_c(), ProductFn::P0),
                    UnsupportedCombination);
    CHECK_THROWS_AS(make_product_transform(WeightSpec::sc(), ProductFn::FCauchy),
                    UnsupportedCombination);
}

TEST_CASE("radix-2 transform matches a brute-force DFT") {
    RngStream rng = RngStream::seeded(99);
    const std::size_t L = 64;
    std::vector<std::complex<double>> x(L);
    for (auto& v : x)
        v = {2.0 * rng.next_uniform01() - 1.0, 2.0 * rng.next_uniform01() - 1.0};

    auto brute = [&](int sign) {
        std::vector<std::complex<double>> out(L);
        for (std::size_t m = 0; m < L; ++m) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t k = 0; k < L; ++k) {
                const double angle = sign * 2.0 * 3.14159265358979323846 *
                                     static_cast<double>(k * m) / static_cast<double>(L);
                acc += x[k] * std::polar(1.0, angle);
            }
            out[m] = acc;
        }
        return out;
    };

    auto forward = x;
    fft_pow2(forward, -1);
    const auto ref = brute(-1);
    for (std::size_t m = 0; m < L; ++m) CHECK(std::abs(forward[m] - ref[m]) < 1e-11);

    // unnormalised inverse: applying both directions scales by L
    auto roundtrip = forward;
    fft_pow2(roundtrip, +1);
    for (std::size_t k = 0; k < L; ++k)
        CHECK(std::abs(roundtrip[k] / static_cast<double>(L) - x[k]) < 1e-12);

    CHECK(is_pow2(64));
    CHECK_FALSE(is_pow2(96));
    CHECK(next_pow2(1000) == 1024);
    CHECK(next_pow2(1024) == 1024);
}
