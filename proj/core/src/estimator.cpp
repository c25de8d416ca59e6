#include "mctail/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mctail/parallel.hpp"
#include "mctail/stable.hpp"
#include "mctail/stats.hpp"

namespace mctail {

namespace {

// Stream tag for confidence simulations; grid cells use their row index
// here, so the two families can never collide under a shared seed.
constexpr std::uint64_t kCiStreamTag = ~std::uint64_t{0};

std::vector<double> empirical_hill_curve(const Sample& s, const GridSurface& g) {
  const TailTransformResult transformed = tail_transform(s, g.spec.tail_mode);
  const auto& ascending = transformed.sample.ascending();

  std::vector<double> curve;
  curve.reserve(g.kgrid.size());
  for (std::size_t k : g.kgrid.k_values()) {
    double sum = 0.0;
    const auto status = detail::hill_log2_spacing_sum(ascending, k, sum);
    if (status == detail::HillStatus::BadK) {
      // The transform removed the non-positive observations, so running out
      // of order statistics here means the raw sample lacked k+1 positives.
      throw Error(ErrorCode::NotEnoughPositive,
                  "only " + std::to_string(ascending.size()) +
                      " usable observations after the " +
                      std::string(to_string(g.spec.tail_mode)) +
                      " transform; k = " + std::to_string(k) +
                      " needs k+1 of them");
    }
    if (status != detail::HillStatus::Ok) {
      hill_estimate(transformed.sample, k);  // throws the precise category
    }
    curve.push_back(detail::hill_from_log2_sum(k, sum));
  }
  return curve;
}

}  // namespace

const std::vector<double>& default_ci_levels() {
  static const std::vector<double> levels{0.005, 0.025, 0.05,
                                          0.95,  0.975, 0.995};
  return levels;
}

McEstimate estimate_from_curve(std::span<const double> empirical_curve,
                               const GridSurface& g) {
  if (empirical_curve.size() != g.cols()) {
    throw Error(ErrorCode::LengthMismatch,
                "curve has " + std::to_string(empirical_curve.size()) +
                    " values but the grid has " + std::to_string(g.cols()) +
                    " k values");
  }

  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_row = 0;
  for (std::size_t row = 0; row < g.rows(); ++row) {
    double loss = 0.0;
    const double* grid_row = g.mean_curve.data() + row * g.cols();
    for (std::size_t col = 0; col < g.cols(); ++col) {
      loss += std::fabs(empirical_curve[col] - grid_row[col]);
    }
    if (loss < best_loss) {  // strict: ties keep the smallest alpha0
      best_loss = loss;
      best_row = row;
    }
  }

  McEstimate result;
  result.alpha_hat = g.spec.alpha0_values[best_row];
  result.loss = best_loss;
  result.grid_meta = g.spec;
  return result;
}

McEstimate estimate(const Sample& s, const GridSurface& g) {
  if (s.size() != g.spec.n) {
    throw Error(ErrorCode::LengthMismatch,
                "sample length " + std::to_string(s.size()) +
                    " does not match the grid's n = " + std::to_string(g.spec.n));
  }
  return estimate_from_curve(empirical_hill_curve(s, g), g);
}

std::map<double, double> confidence_quantiles(
    double alpha_point, const GridSurface& g, std::span<const double> levels,
    std::size_t replications, std::uint64_t seed, std::size_t* failures,
    unsigned workers) {
  if (!(alpha_point > 1.0 && alpha_point <= 2.0)) {
    throw Error(ErrorCode::DomainError,
                "alpha_point must be in (1,2], got " + std::to_string(alpha_point));
  }
  if (replications < 2) {
    throw Error(ErrorCode::DomainError,
                "quantile simulation needs at least 2 replications");
  }
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw Error(ErrorCode::DomainError,
                  "quantile level must be in (0,1), got " + std::to_string(level));
    }
  }

  const StableParams params{alpha_point, g.spec.beta, g.spec.gamma, g.spec.delta};
  std::vector<double> estimates(replications, 0.0);
  std::vector<unsigned char> usable(replications, 0);

  parallel_for_index(replications, workers, [&](std::size_t rep) {
    const RngStream stream{seed, kCiStreamTag, rep};
    try {
      const Sample draw = sample(params, g.spec.n, stream);
      estimates[rep] = estimate(draw, g).alpha_hat;
      usable[rep] = 1;
    } catch (const Error&) {
      usable[rep] = 0;
    }
  });

  std::vector<double> kept;
  kept.reserve(replications);
  for (std::size_t rep = 0; rep < replications; ++rep) {
    if (usable[rep]) kept.push_back(estimates[rep]);
  }
  if (failures) *failures = replications - kept.size();
  if (kept.empty()) {
    throw Error(ErrorCode::EmptyResult,
                "every confidence replication failed to estimate");
  }
  std::sort(kept.begin(), kept.end());

  std::map<double, double> quantiles;
  for (double level : levels) {
    quantiles[level] = nearest_rank_quantile(kept, level);
  }
  return quantiles;
}

McEstimate estimate_with_ci(const Sample& s, const GridSurface& g,
                            std::span<const double> levels,
                            std::size_t replications, std::uint64_t seed,
                            unsigned workers) {
  McEstimate result = estimate(s, g);
  std::size_t failures = 0;
  result.quantiles = confidence_quantiles(result.alpha_hat, g, levels,
                                          replications, seed, &failures, workers);
  result.ci_replications = replications;
  result.ci_failures = failures;
  result.ci_seed = seed;
  return result;
}

}  // namespace mctail
