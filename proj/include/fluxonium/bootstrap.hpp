// bootstrap.hpp: resampling with replacement and percentile intervals.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace fluxonium {

/// splitmix64 step; used to derive independent per-resample seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Indices of one resample of n records, drawn from stream k of seed.
std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t seed, std::uint64_t k);

/// Linear-interpolation percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

struct BootstrapSamples {
    std::vector<Eigen::VectorXd> estimates;  // successful resamples, in resample order
    int failures{0};
};

/// Runs fit on n resamples. fit returns nullopt (or throws) on failure.
/// More than 20% failures throws NumericalError.
BootstrapSamples run_bootstrap(
    std::size_t n_records, int n, std::uint64_t seed,
    const std::function<std::optional<Eigen::VectorXd>(const std::vector<std::size_t>&)>& fit);

}  // namespace fluxonium
