// Benchmark comparing the deconvolution evaluation kernels:
//   direct-serial    reference loop, one rotation recurrence per point
//   direct-parallel  same arithmetic, OpenMP across evaluation points
//   fft-batch        one FFT shared by the whole batch + cubic interpolation
// and the end-to-end Monte Carlo driver with 1 thread vs the default team.
//
// The serial kernel is the reference the tests compare against; this tool
// shows what the parallel and FFT paths buy on top of it.

#include <chrono>
#include <cstdio>
#include <vector>

#include "deconvar/ar_process.hpp"
#include "deconvar/deconvolution.hpp"
#include "deconvar/monte_carlo.hpp"
#include "deconvar/rng.hpp"
#include "deconvar/weight_functions.hpp"

namespace {

using namespace deconvar;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

double checksum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

void bench_batch_kernels() {
    std::printf("-- batch deconvolution kernels (SC weight, Laplace error) --\n");
    std::printf("%10s  %14s  %14s  %14s\n", "batch", "direct-serial", "direct-parallel",
                "fft-batch");

    const auto err = ErrorModel::laplace(0.5);
    const auto weight = WeightSpec::sc();
    const InversionPlan plan = default_plan(weight, err, 4096);
    const auto phi = make_product_transform(weight, ProductFn::P0);
    const auto q = detail::build_integrand(phi, err, nullptr, plan);

    RngStream rng = RngStream::seeded(7);
    for (std::size_t batch : {256u, 2048u, 16384u, 131072u}) {
        std::vector<double> z(batch);
        for (auto& v : z) v = 6.0 * rng.next_uniform01() - 3.0;

        auto t0 = clock_type::now();
        const auto serial = detail::eval_direct_serial(q, z);
        const double s_serial = seconds_since(t0);

        t0 = clock_type::now();
        const auto parallel = detail::eval_direct_parallel(q, z);
        const double s_parallel = seconds_since(t0);

        t0 = clock_type::now();
        const auto fft = detail::eval_fft_batch(q, z);
        const double s_fft = seconds_since(t0);

        std::printf("%10zu  %12.4f s  %12.4f s  %12.4f s   (checksums %.6g / %.6g / %.6g)\n",
                    batch, s_serial, s_parallel, s_fft, checksum(serial),
                    checksum(parallel), checksum(fft));
    }
}

void bench_mc_threads() {
    std::printf("\n-- Monte Carlo driver, serial vs default thread team --\n");
    MCConfig config;
    config.preset = "case-a";
    config.n = 2000;
    config.s2n = 0.5;
    config.reps = 20;
    config.master_seed = 42;
    config.estimators = {EstimatorTag::DeconvSC, EstimatorTag::Naive};
    config.setup.mode = EvalMode::NumericGrid;

    config.threads = 1;
    auto t0 = clock_type::now();
    const auto serial_report = run_mc(config);
    const double s_serial = seconds_since(t0);

    config.threads = 0;
    t0 = clock_type::now();
    const auto parallel_report = run_mc(config);
    const double s_parallel = seconds_since(t0);

    const double serial_mean = serial_report.estimators.at(0).mean.at(0);
    const double parallel_mean = parallel_report.estimators.at(0).mean.at(0);
    std::printf("threads=1:       %.3f s (mean slope %.6f)\n", s_serial, serial_mean);
    std::printf("threads=default: %.3f s (mean slope %.6f)\n", s_parallel, parallel_mean);
    std::printf("results identical: %s\n", serial_mean == parallel_mean ? "yes" : "NO");
}

} // namespace

int main() {
    bench_batch_kernels();
    bench_mc_threads();
    return 0;
}
