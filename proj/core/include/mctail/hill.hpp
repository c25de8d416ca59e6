#ifndef MCTAIL_HILL_HPP
#define MCTAIL_HILL_HPP

#include <cstddef>
#include <vector>

#include "mctail/sample.hpp"

namespace mctail {

// The set of truncation counts a Hill curve is evaluated on.
class KGrid {
 public:
  // Every integer k in [ceil(lo*n), floor(hi*n)], with the lower end clamped
  // to 1. Fraction arithmetic is fuzzed so that e.g. 0.01 * 1000 lands on
  // k = 10 rather than 11.
  static KGrid from_fractions(std::size_t n, double lo = 0.01, double hi = 0.20);

  // Every integer k in [k_lo, k_hi].
  static KGrid from_bounds(std::size_t n, std::size_t k_lo, std::size_t k_hi);

  std::size_t n() const noexcept { return n_; }
  const std::vector<std::size_t>& k_values() const noexcept { return k_values_; }
  std::size_t size() const noexcept { return k_values_.size(); }

 private:
  KGrid(std::size_t n, std::vector<std::size_t> k_values);

  std::size_t n_;
  std::vector<std::size_t> k_values_;  // strictly increasing, 1 <= k < n
};

// Hill estimates over a k-grid with per-k asymptotic confidence bounds.
struct HillCurve {
  KGrid kgrid;
  double level;                 // confidence level of the bounds
  std::vector<double> estimates;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
};

enum class TailMode { Abs, Upper };

const char* to_string(TailMode mode) noexcept;
TailMode tail_mode_from_string(const std::string& text);

struct TailTransformResult {
  Sample sample;
  std::size_t dropped;  // non-positive observations removed
};

// Hill estimate from the k + 1 largest order statistics:
//   alpha_hat = k / sum_{i=1..k} log(X_(n-i+1) / X_(n-k))
// with ascending order statistics, i.e. the mean log-excess of the k largest
// values over the (k+1)-th largest. The sum is taken of log2 of the exact
// ratios and rescaled once, which keeps the estimate bit-identical under
// power-of-two rescaling of the data.
//
// Throws NotEnoughPositive when fewer than k+1 values are strictly positive,
// DegenerateTail when the k+1 largest values are all equal.
double hill_estimate(const Sample& s, std::size_t k);

// hill_estimate at every k of the grid, plus normal-approximation confidence
// bounds from the asymptotic variance alpha_hat^2 / k. Errors from individual
// k are rethrown annotated with the offending k.
HillCurve hill_curve(const Sample& s, const KGrid& grid, double level = 0.95);

// Abs: magnitudes of all observations; Upper: positive observations only.
// Non-positive results are dropped and counted. Throws EmptyResult when
// nothing survives.
TailTransformResult tail_transform(const Sample& s, TailMode mode);

namespace detail {

enum class HillStatus { Ok, BadK, NotEnoughPositive, DegenerateTail };

// Core of hill_estimate operating on ascending order statistics; shared with
// the grid simulator so simulated and public estimates are bit-identical.
HillStatus hill_log2_spacing_sum(const std::vector<double>& ascending,
                                 std::size_t k, double& sum_out);

inline double hill_from_log2_sum(std::size_t k, double sum) {
  constexpr double ln2 = 0.6931471805599453;
  return static_cast<double>(k) / (sum * ln2);
}

}  // namespace detail

}  // namespace mctail

#endif  // MCTAIL_HILL_HPP
