#ifndef MCTAIL_ESTIMATOR_HPP
#define MCTAIL_ESTIMATOR_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "mctail/grid.hpp"

namespace mctail {

// Result of matching an empirical Hill curve against a simulated surface.
struct McEstimate {
  double alpha_hat = 0.0;  // always one of grid_meta.alpha0_values
  double loss = 0.0;       // attained minimum of the matching objective
  std::map<double, double> quantiles;  // level -> simulated quantile
  GridSpec grid_meta;

  // Metadata of the quantile simulation, when one was attached.
  std::size_t ci_replications = 0;
  std::size_t ci_failures = 0;
  std::uint64_t ci_seed = 0;
};

// {0.005, 0.025, 0.05, 0.95, 0.975, 0.995}
const std::vector<double>& default_ci_levels();

// Point estimate: Hill curve of s (after the grid's tail transform) on the
// grid's k values, then
//   alpha_hat = argmin over alpha0 of sum_k |emp_k - mean(alpha0, k)|,
// ties broken toward the smallest alpha0. The sample length must equal the
// grid's n exactly; the Hill bias being matched is length-dependent.
McEstimate estimate(const Sample& s, const GridSurface& g);

// The argmin step alone, for callers that already hold a curve on the
// grid's k values (and for tests that inject synthetic curves).
McEstimate estimate_from_curve(std::span<const double> empirical_curve,
                               const GridSurface& g);

// Empirical quantiles (nearest-rank) of the estimator at a known tail
// exponent: simulates `replications` fresh samples from the grid's stable
// law with the exponent swapped to alpha_point, estimates each against g,
// and reads order statistics. Replications that fail are excluded and
// counted in *failures. Streams are domain-separated from grid streams, so
// any seed is safe.
std::map<double, double> confidence_quantiles(
    double alpha_point, const GridSurface& g, std::span<const double> levels,
    std::size_t replications, std::uint64_t seed,
    std::size_t* failures = nullptr, unsigned workers = 0);

// estimate() plus confidence_quantiles() at the point estimate.
McEstimate estimate_with_ci(const Sample& s, const GridSurface& g,
                            std::span<const double> levels,
                            std::size_t replications, std::uint64_t seed,
                            unsigned workers = 0);

}  // namespace mctail

#endif  // MCTAIL_ESTIMATOR_HPP
