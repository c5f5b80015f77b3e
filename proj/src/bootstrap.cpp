// bootstrap.cpp

#include "fluxonium/bootstrap.hpp"

#include "fluxonium/errors.hpp"
#include "fluxonium/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace fluxonium {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t seed, std::uint64_t k) {
    if (n == 0) throw ValidationError("resample_indices: empty dataset");
    std::mt19937_64 rng(splitmix64(seed + k));
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng() % n);
    return idx;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw ValidationError("percentile: no values");
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("percentile: q must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

BootstrapSamples run_bootstrap(
    std::size_t n_records, int n, std::uint64_t seed,
    const std::function<std::optional<Eigen::VectorXd>(const std::vector<std::size_t>&)>& fit) {
    if (n < 1) throw ValidationError("run_bootstrap: n must be positive");
    std::vector<std::optional<Eigen::VectorXd>> slots(static_cast<std::size_t>(n));
    parallel_for(slots.size(), [&](std::size_t k) {
        try {
            slots[k] = fit(resample_indices(n_records, seed, k));
        } catch (const std::exception&) {
            slots[k].reset();
        }
    });
    BootstrapSamples out;
    for (auto& s : slots) {
        if (s) out.estimates.push_back(std::move(*s));
        else ++out.failures;
    }
    if (out.failures > n / 5) {
        std::ostringstream os;
        os << "bootstrap: " << out.failures << " of " << n << " resample fits failed";
        throw NumericalError(os.str());
    }
    return out;
}

}  // namespace fluxonium
