#include "deconvar/fft.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "deconvar/errors.hpp"

namespace deconvar {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

namespace {

using Table = std::vector<std::complex<double>>;

// Forward twiddles exp(-2 pi i j / L) for j < L/2, cached per size.
std::shared_ptr<const Table> twiddle_table(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const Table>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto table = std::make_shared<Table>(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        (*table)[j] = std::polar(1.0, angle);
    }
    cache[n] = table;
    return table;
}

} // namespace

void fft_pow2(std::vector<std::complex<double>>& data, int sign) {
    const std::size_t n = data.size();
    if (!is_pow2(n)) throw ConfigError("fft length must be a power of two");
    if (n < 2) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const auto table = twiddle_table(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t block = 0; block < n; block += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> w = (*table)[j * step];
                if (sign > 0) w = std::conj(w);
                const auto u = data[block + j];
                const auto v = data[block + j + len / 2] * w;
                data[block + j] = u + v;
                data[block + j + len / 2] = u - v;
            }
        }
    }
}

} // namespace deconvar
