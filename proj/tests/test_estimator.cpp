#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mctail/estimator.hpp"
#include "mctail/stable.hpp"
#include "mctail/stats.hpp"

using namespace mctail;

namespace {

// One shared small surface: n = 400, alpha0 in {1.1, ..., 2.0}.
const GridSurface& fixture_grid() {
  static const GridSurface surface = [] {
    GridSpec spec;
    spec.n = 400;
    spec.alpha0_values = {1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};
    spec.replications = 200;
    spec.master_seed = 99;
    return simulate_grid(spec, {}, 2);
  }();
  return surface;
}

std::vector<double> grid_row(const GridSurface& g, std::size_t row) {
  return {g.mean_curve.begin() + row * g.cols(),
          g.mean_curve.begin() + (row + 1) * g.cols()};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::DomainError;
}

}  // namespace

TEST_CASE("estimate_from_curve: an exact grid row identifies itself with zero loss") {
  const GridSurface& g = fixture_grid();
  const auto injected = grid_row(g, 1);  // alpha0 = 1.20
  const McEstimate est = estimate_from_curve(injected, g);
  CHECK(est.alpha_hat == 1.2);
  CHECK(est.loss == 0.0);

  // Any perturbation makes the loss strictly positive.
  auto perturbed = injected;
  perturbed[5] += 1e-9;
  const McEstimate off = estimate_from_curve(perturbed, g);
  CHECK(off.loss > 0.0);
  CHECK(off.alpha_hat == 1.2);
}

TEST_CASE("estimate_from_curve: ties break toward the smaller alpha0") {
  GridSurface g = fixture_grid();
  // Duplicate the alpha0 = 1.2 row into the 1.9 slot.
  const auto row = grid_row(g, 1);
  std::copy(row.begin(), row.end(), g.mean_curve.begin() + 8 * g.cols());
  const McEstimate est = estimate_from_curve(row, g);
  CHECK(est.alpha_hat == 1.2);
  CHECK(est.loss == 0.0);
}

TEST_CASE("estimate: length must match the grid exactly") {
  const GridSurface& g = fixture_grid();
  const Sample wrong = sample({1.5, 0.0, kDefaultGamma, 0.0}, 399, {1, 0, 0});
  try {
    estimate(wrong, g);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
    const std::string msg = e.what();
    CHECK(msg.find("399") != std::string::npos);
    CHECK(msg.find("400") != std::string::npos);
  }
}

TEST_CASE("estimate: sane on matching-length stable data") {
  const GridSurface& g = fixture_grid();
  const Sample s = sample({1.5, 0.0, kDefaultGamma, 0.0}, 400, {555, 0, 0});
  const McEstimate est = estimate(s, g);
  CHECK(est.loss > 0.0);
  CHECK(std::find(g.spec.alpha0_values.begin(), g.spec.alpha0_values.end(),
                  est.alpha_hat) != g.spec.alpha0_values.end());
  CHECK(est.alpha_hat > 1.1);
  CHECK(est.alpha_hat < 2.0);
  CHECK(est.grid_meta.master_seed == g.spec.master_seed);
}

TEST_CASE("estimate: dyadic rescaling changes neither estimate nor loss") {
  const GridSurface& g = fixture_grid();
  const Sample s = sample({1.4, 0.0, kDefaultGamma, 0.0}, 400, {556, 0, 0});
  const McEstimate base = estimate(s, g);
  for (double c : {0.125, 4.0, 1024.0}) {
    std::vector<double> scaled = s.values();
    for (auto& v : scaled) v *= c;
    const McEstimate alt = estimate(Sample(std::move(scaled)), g);
    CHECK(alt.alpha_hat == base.alpha_hat);
    CHECK(alt.loss == base.loss);
  }
}

TEST_CASE("estimate: permutation invariant") {
  const GridSurface& g = fixture_grid();
  std::vector<double> values =
      sample({1.7, 0.0, kDefaultGamma, 0.0}, 400, {557, 0, 0}).values();
  const McEstimate base = estimate(Sample(values), g);
  std::reverse(values.begin(), values.end());
  const McEstimate reversed = estimate(Sample(std::move(values)), g);
  CHECK(reversed.alpha_hat == base.alpha_hat);
  CHECK(reversed.loss == base.loss);
}

TEST_CASE("confidence quantiles: median is the 50% order statistic of reruns") {
  const GridSurface& g = fixture_grid();
  const std::size_t reps = 31;
  const std::uint64_t seed = 1234;
  std::size_t failures = 7;
  const std::vector<double> levels{0.25, 0.5, 0.9};
  const auto q = confidence_quantiles(1.6, g, levels, reps, seed, &failures, 2);
  CHECK(failures == 0);

  // Recompute through the public surface on the documented streams.
  std::vector<double> estimates;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const RngStream stream{seed, ~std::uint64_t{0}, rep};
    const Sample draw = sample({1.6, g.spec.beta, g.spec.gamma, g.spec.delta},
                               g.spec.n, stream);
    estimates.push_back(estimate(draw, g).alpha_hat);
  }
  std::sort(estimates.begin(), estimates.end());
  CHECK(q.at(0.5) == nearest_rank_quantile(estimates, 0.5));
  CHECK(q.at(0.25) == nearest_rank_quantile(estimates, 0.25));
  CHECK(q.at(0.9) == nearest_rank_quantile(estimates, 0.9));
  CHECK(q.at(0.25) <= q.at(0.5));
  CHECK(q.at(0.5) <= q.at(0.9));
}

TEST_CASE("confidence quantiles: the grid's upper edge caps every level") {
  const GridSurface& g = fixture_grid();
  const auto q = confidence_quantiles(2.0, g, default_ci_levels(), 40, 5, nullptr, 2);
  for (const auto& [level, value] : q) {
    CHECK(value <= 2.0);
  }
}

TEST_CASE("confidence quantiles: input validation") {
  const GridSurface& g = fixture_grid();
  const std::vector<double> ok_levels{0.5};
  CHECK(code_of([&] { confidence_quantiles(2.3, g, ok_levels, 10, 1); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([&] { confidence_quantiles(1.0, g, ok_levels, 10, 1); }) ==
        ErrorCode::DomainError);
  CHECK(code_of([&] { confidence_quantiles(1.5, g, ok_levels, 1, 1); }) ==
        ErrorCode::DomainError);
  const std::vector<double> bad_levels{0.0};
  CHECK(code_of([&] { confidence_quantiles(1.5, g, bad_levels, 10, 1); }) ==
        ErrorCode::DomainError);
}

TEST_CASE("estimate_with_ci: composition keeps the point estimate and attaches quantiles") {
  const GridSurface& g = fixture_grid();
  const Sample s = sample({1.8, 0.0, kDefaultGamma, 0.0}, 400, {558, 0, 0});
  const McEstimate point = estimate(s, g);
  const McEstimate full =
      estimate_with_ci(s, g, default_ci_levels(), 50, 77, 2);

  CHECK(full.alpha_hat == point.alpha_hat);
  CHECK(full.loss == point.loss);
  CHECK(full.ci_replications == 50);
  CHECK(full.ci_seed == 77);
  REQUIRE(full.quantiles.size() == 6);

  double prev = 0.0;
  for (const auto& [level, value] : full.quantiles) {
    CHECK(value >= prev);
    prev = value;
  }

  // Rerunning with the same seed reproduces the quantiles exactly.
  const McEstimate rerun =
      estimate_with_ci(s, g, default_ci_levels(), 50, 77, 1);
  CHECK(rerun.quantiles == full.quantiles);
}

TEST_CASE("estimate: respects the grid's tail mode") {
  GridSpec spec;
  spec.n = 400;
  spec.alpha0_values = {1.3, 1.6, 1.9};
  spec.replications = 120;
  spec.master_seed = 3;
  spec.tail_mode = TailMode::Abs;
  const GridSurface abs_grid = simulate_grid(spec, {}, 2);
  spec.tail_mode = TailMode::Upper;
  const GridSurface upper_grid = simulate_grid(spec, {}, 2);

  // The folded tail uses twice the observations, so the surfaces differ.
  CHECK(abs_grid.mean_curve != upper_grid.mean_curve);

  // A sample whose positive half is too short for the largest k still
  // estimates under abs (which folds the magnitudes back in).
  std::vector<double> mostly_negative;
  Xoshiro256 rng({9, 9, 9});
  for (std::size_t i = 0; i < 400; ++i) {
    const double mag = std::pow(1.0 - rng.next_open01(), -1.0 / 1.5);
    mostly_negative.push_back(i < 40 ? mag : -mag);
  }
  const Sample s(mostly_negative);
  CHECK_NOTHROW(estimate(s, abs_grid));
  CHECK(code_of([&] { estimate(s, upper_grid); }) == ErrorCode::NotEnoughPositive);
}
