#ifndef MCTAIL_SAMPLE_HPP
#define MCTAIL_SAMPLE_HPP

#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include "mctail/error.hpp"

namespace mctail {

// An observation series. Immutable after construction; order statistics are
// computed on first use and cached, so repeated estimator calls on the same
// sample sort only once. Safe to share across threads by const reference.
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  Sample(const Sample& other) : values_(other.values_) {}
  Sample& operator=(const Sample& other) {
    if (this != &other) {
      values_ = other.values_;
      std::lock_guard<std::mutex> lock(cache_mutex_);
      ascending_.reset();
    }
    return *this;
  }
  Sample(Sample&& other) noexcept : values_(std::move(other.values_)) {}
  Sample& operator=(Sample&& other) noexcept {
    values_ = std::move(other.values_);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    ascending_.reset();
    return *this;
  }

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

  // Ascending order statistics of values().
  const std::vector<double>& ascending() const;

 private:
  std::vector<double> values_;
  mutable std::mutex cache_mutex_;
  mutable std::shared_ptr<const std::vector<double>> ascending_;
};

}  // namespace mctail

#endif  // MCTAIL_SAMPLE_HPP
