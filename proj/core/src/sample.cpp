#include "mctail/sample.hpp"

#include <algorithm>
#include <cmath>

namespace mctail {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorCode::DomainError, "a sample needs at least one observation");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::DomainError, "sample contains a non-finite value");
    }
  }
}

const std::vector<double>& Sample::ascending() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (!ascending_) {
    auto sorted = std::make_shared<std::vector<double>>(values_);
    std::sort(sorted->begin(), sorted->end());
    ascending_ = std::move(sorted);
  }
  return *ascending_;
}

}  // namespace mctail
