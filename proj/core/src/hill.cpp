#include "mctail/hill.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mctail/stats.hpp"

namespace mctail {

namespace {

std::size_t fuzzy_ceil(double x) {
  const double nudge = 1e-9 * std::fmax(1.0, std::fabs(x));
  return static_cast<std::size_t>(std::ceil(x - nudge));
}

std::size_t fuzzy_floor(double x) {
  const double nudge = 1e-9 * std::fmax(1.0, std::fabs(x));
  return static_cast<std::size_t>(std::floor(x + nudge));
}

}  // namespace

KGrid::KGrid(std::size_t n, std::vector<std::size_t> k_values)
    : n_(n), k_values_(std::move(k_values)) {}

KGrid KGrid::from_fractions(std::size_t n, double lo, double hi) {
  if (!(lo >= 0.0 && hi > 0.0 && lo <= hi && hi < 1.0)) {
    throw Error(ErrorCode::DomainError,
                "k fraction interval must satisfy 0 <= lo <= hi < 1");
  }
  std::size_t k_lo = fuzzy_ceil(lo * static_cast<double>(n));
  if (k_lo < 1) k_lo = 1;
  const std::size_t k_hi = fuzzy_floor(hi * static_cast<double>(n));
  return from_bounds(n, k_lo, k_hi);
}

KGrid KGrid::from_bounds(std::size_t n, std::size_t k_lo, std::size_t k_hi) {
  if (k_lo < 1 || k_hi < k_lo || k_hi >= n) {
    throw Error(ErrorCode::DomainError,
                "k grid needs 1 <= k_lo <= k_hi < n, got [" +
                    std::to_string(k_lo) + ", " + std::to_string(k_hi) +
                    ") for n = " + std::to_string(n));
  }
  std::vector<std::size_t> ks(k_hi - k_lo + 1);
  for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = k_lo + i;
  return KGrid(n, std::move(ks));
}

const char* to_string(TailMode mode) noexcept {
  return mode == TailMode::Abs ? "abs" : "upper";
}

TailMode tail_mode_from_string(const std::string& text) {
  if (text == "abs") return TailMode::Abs;
  if (text == "upper") return TailMode::Upper;
  throw Error(ErrorCode::DomainError, "unknown tail mode '" + text +
                                          "' (expected abs or upper)");
}

namespace detail {

HillStatus hill_log2_spacing_sum(const std::vector<double>& ascending,
                                 std::size_t k, double& sum_out) {
  const std::size_t n = ascending.size();
  if (k < 1 || k >= n) return HillStatus::BadK;

  const double threshold = ascending[n - 1 - k];  // (k+1)-th largest
  if (!(threshold > 0.0)) return HillStatus::NotEnoughPositive;

  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    sum += std::log2(ascending[n - i] / threshold);
  }
  if (sum == 0.0) return HillStatus::DegenerateTail;
  sum_out = sum;
  return HillStatus::Ok;
}

}  // namespace detail

double hill_estimate(const Sample& s, std::size_t k) {
  double sum = 0.0;
  switch (detail::hill_log2_spacing_sum(s.ascending(), k, sum)) {
    case detail::HillStatus::Ok:
      return detail::hill_from_log2_sum(k, sum);
    case detail::HillStatus::BadK:
      throw Error(ErrorCode::DomainError,
                  "k must satisfy 1 <= k < n, got k = " + std::to_string(k) +
                      " for n = " + std::to_string(s.size()));
    case detail::HillStatus::NotEnoughPositive:
      throw Error(ErrorCode::NotEnoughPositive,
                  "need at least k+1 = " + std::to_string(k + 1) +
                      " strictly positive values");
    case detail::HillStatus::DegenerateTail:
      throw Error(ErrorCode::DegenerateTail,
                  "the k+1 = " + std::to_string(k + 1) +
                      " largest values are all equal; estimate is infinite");
  }
  return 0.0;  // unreachable
}

HillCurve hill_curve(const Sample& s, const KGrid& grid, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::DomainError,
                "confidence level must be in (0,1), got " + std::to_string(level));
  }
  const double z = normal_quantile(0.5 * (1.0 + level));
  const auto& ascending = s.ascending();

  HillCurve curve{grid, level, {}, {}, {}};
  curve.estimates.reserve(grid.size());
  curve.ci_low.reserve(grid.size());
  curve.ci_high.reserve(grid.size());

  for (std::size_t k : grid.k_values()) {
    double sum = 0.0;
    const auto status = detail::hill_log2_spacing_sum(ascending, k, sum);
    if (status != detail::HillStatus::Ok) {
      try {
        hill_estimate(s, k);  // rethrows with the precise category
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (at k = " +
                                  std::to_string(k) + ")");
      }
    }
    const double est = detail::hill_from_log2_sum(k, sum);
    const double half_width = z * est / std::sqrt(static_cast<double>(k));
    curve.estimates.push_back(est);
    curve.ci_low.push_back(est - half_width);
    curve.ci_high.push_back(est + half_width);
  }
  return curve;
}

TailTransformResult tail_transform(const Sample& s, TailMode mode) {
  std::vector<double> kept;
  kept.reserve(s.size());
  for (double v : s.values()) {
    const double candidate = (mode == TailMode::Abs) ? std::fabs(v) : v;
    if (candidate > 0.0) kept.push_back(candidate);
  }
  if (kept.empty()) {
    throw Error(ErrorCode::EmptyResult,
                std::string("tail transform (") + to_string(mode) +
                    ") left no positive observations");
  }
  const std::size_t dropped = s.size() - kept.size();
  return TailTransformResult{Sample(std::move(kept)), dropped};
}

}  // namespace mctail
