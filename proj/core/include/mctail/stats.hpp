#ifndef MCTAIL_STATS_HPP
#define MCTAIL_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace mctail {

// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
// Throws ErrorCode::DomainError unless 0 < p < 1.
double normal_quantile(double p);

// Standard normal density.
double normal_pdf(double x);

// Nearest-rank empirical quantile: the ceil(p*m)-th smallest of m sorted
// values, rank clamped to [1, m]. `sorted` must be ascending.
double nearest_rank_quantile(std::span<const double> sorted, double p);

double sample_mean(std::span<const double> values);

// Unbiased (n-1) sample variance, two-pass.
double sample_variance(std::span<const double> values);

// Streaming mean/variance accumulator (Welford). Update order defines the
// result bit-for-bit, so callers that need reproducibility must feed values
// in a fixed order.
class RunningMoments {
 public:
  void add(double x) noexcept {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;
  double stddev() const noexcept;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace mctail

#endif  // MCTAIL_STATS_HPP
