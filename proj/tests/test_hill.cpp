#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mctail/hill.hpp"
#include "mctail/grid.hpp"
#include "mctail/rng.hpp"
#include "mctail/stable.hpp"
#include "mctail/stats.hpp"

using namespace mctail;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::DomainError;
}

// Fisher-Yates with our deterministic generator.
void shuffle_values(std::vector<double>& v, Xoshiro256& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.next_u64() % i]);
  }
}

std::vector<double> random_positive_sample(Xoshiro256& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) {
    // Log-uniform over about 17 decades.
    v.size();
    x = std::exp(40.0 * (rng.next_open01() - 0.5));
  }
  return v;
}

}  // namespace

TEST_CASE("k grid: fraction construction matches the integer arithmetic") {
  const KGrid g1 = KGrid::from_fractions(1000);
  CHECK(g1.k_values().front() == 10);   // ceil(0.01 * 1000)
  CHECK(g1.k_values().back() == 200);   // floor(0.20 * 1000)
  CHECK(g1.size() == 191);

  const KGrid g2 = KGrid::from_fractions(10000);
  CHECK(g2.k_values().front() == 100);
  CHECK(g2.k_values().back() == 2000);

  const KGrid g3 = KGrid::from_fractions(350, 0.013, 0.19);
  CHECK(g3.k_values().front() == 5);    // ceil(4.55)
  CHECK(g3.k_values().back() == 66);    // floor(66.5)

  // Lower end clamps to 1 when the fraction rounds to zero.
  CHECK(KGrid::from_fractions(150, 0.0, 0.02).k_values().front() == 1);

  CHECK(code_of([] { KGrid::from_fractions(100, 0.2, 0.1); }) == ErrorCode::DomainError);
  CHECK(code_of([] { KGrid::from_bounds(10, 3, 10); }) == ErrorCode::DomainError);
  CHECK(code_of([] { KGrid::from_bounds(10, 0, 5); }) == ErrorCode::DomainError);
}

TEST_CASE("hill estimate: hand-derived geometric value, any order") {
  std::vector<double> values{std::exp(3.0), std::exp(2.0), std::exp(1.0), 1.0};
  CHECK(hill_estimate(Sample(values), 3) == doctest::Approx(0.5).epsilon(1e-13));

  Xoshiro256 rng({1, 0, 0});
  for (int i = 0; i < 8; ++i) {
    shuffle_values(values, rng);
    CHECK(hill_estimate(Sample(values), 3) ==
          hill_estimate(Sample({std::exp(3.0), std::exp(2.0), std::exp(1.0), 1.0}), 3));
  }
}

TEST_CASE("hill estimate: scale invariance is exact under dyadic factors") {
  Xoshiro256 rng({2, 0, 0});
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 5 + rng.next_u64() % 120;
    const std::vector<double> base = random_positive_sample(rng, n);
    const std::size_t k = 1 + rng.next_u64() % (n - 1);
    const int m = static_cast<int>(rng.next_u64() % 61) - 30;
    const double c = std::ldexp(1.0, m);

    std::vector<double> scaled(base);
    for (auto& x : scaled) x *= c;

    const double original = hill_estimate(Sample(base), k);
    CHECK(hill_estimate(Sample(std::move(scaled)), k) == original);
  }
}

TEST_CASE("hill estimate: power transform divides the estimate, exactly") {
  Xoshiro256 rng({3, 0, 0});
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 6 + rng.next_u64() % 60;
    // Values 2^(4a) with small integer a: powers up to 4 and roots down
    // to 1/4 stay exactly representable.
    std::vector<double> base(n);
    for (auto& x : base) {
      x = std::ldexp(1.0, 4 * (static_cast<int>(rng.next_u64() % 13) - 6));
    }
    const std::size_t k = 1 + rng.next_u64() % (n - 1);
    const double p = std::ldexp(1.0, static_cast<int>(rng.next_u64() % 5) - 2);

    std::vector<double> transformed(n);
    for (std::size_t i = 0; i < n; ++i) transformed[i] = std::pow(base[i], p);

    double original = 0.0, powered = 0.0;
    bool ok = true;
    try {
      original = hill_estimate(Sample(base), k);
      powered = hill_estimate(Sample(std::move(transformed)), k);
    } catch (const Error& e) {
      // Random integer exponents occasionally tie across the whole top
      // k+1 block; both sides must then agree that the tail is degenerate.
      CHECK(e.code() == ErrorCode::DegenerateTail);
      ok = false;
    }
    if (ok) CHECK(powered == original / p);
  }
}

TEST_CASE("hill estimate: positivity and degeneracy error paths") {
  // Four positive values admit k <= 3.
  const Sample mixed(std::vector<double>{-5.0, -4.0, 1.0, 2.0, 3.0, 4.0});
  CHECK_NOTHROW(hill_estimate(mixed, 3));
  CHECK(code_of([&] { hill_estimate(mixed, 4); }) == ErrorCode::NotEnoughPositive);

  const Sample flat(std::vector<double>{5.0, 5.0, 5.0, 5.0, 1.0});
  CHECK(code_of([&] { hill_estimate(flat, 3); }) == ErrorCode::DegenerateTail);

  // Ties below the top block are fine.
  const Sample tied(std::vector<double>{5.0, 5.0, 5.0, 2.0, 1.0});
  CHECK(hill_estimate(tied, 3) > 0.0);

  CHECK(code_of([&] { hill_estimate(tied, 0); }) == ErrorCode::DomainError);
  CHECK(code_of([&] { hill_estimate(tied, 5); }) == ErrorCode::DomainError);
}

TEST_CASE("hill estimate: consistent on exact Pareto draws") {
  // Inverse-CDF Pareto with P(X > x) = x^(-alpha): the estimate should sit
  // within 4 asymptotic standard errors on at least 99 of 100 seeds.
  const std::size_t n = 100000;
  const std::size_t k = 316;  // floor(sqrt(n))
  for (double alpha : {1.1, 1.5, 1.9}) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Xoshiro256 rng({seed, 17, 0});
      std::vector<double> draws(n);
      for (auto& d : draws) d = std::pow(1.0 - rng.next_open01(), -1.0 / alpha);
      const double est = hill_estimate(Sample(std::move(draws)), k);
      if (std::fabs(est - alpha) <= 4.0 * alpha / std::sqrt(static_cast<double>(k))) {
        ++hits;
      }
    }
    CHECK(hits >= 99);
  }
}

TEST_CASE("hill curve: geometric closed form and confidence band shape") {
  // Sample e^n, ..., e, 1: the mean log-excess over the (k+1)-th largest
  // is (k+1)/2, so the curve is 2/(k+1).
  const std::size_t n = 41;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = std::exp(static_cast<double>(n - 1 - i));
  }
  const Sample s(values);
  const KGrid grid = KGrid::from_bounds(n, 1, 30);
  const HillCurve curve = hill_curve(s, grid, 0.95);

  REQUIRE(curve.estimates.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double k = static_cast<double>(grid.k_values()[i]);
    CHECK(curve.estimates[i] == doctest::Approx(2.0 / (k + 1.0)).epsilon(1e-12));
    CHECK(curve.estimates[i] == hill_estimate(s, grid.k_values()[i]));

    // Width of the normal band: 2 * 1.96 * estimate / sqrt(k).
    const double width = curve.ci_high[i] - curve.ci_low[i];
    CHECK(width == doctest::Approx(2.0 * 1.96 * curve.estimates[i] / std::sqrt(k))
                       .epsilon(1e-4));
    CHECK(curve.ci_low[i] < curve.estimates[i]);
    CHECK(curve.estimates[i] < curve.ci_high[i]);
  }

  // Estimates are non-increasing here, so widths must shrink strictly in k.
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(curve.ci_high[i] - curve.ci_low[i] <
          curve.ci_high[i - 1] - curve.ci_low[i - 1]);
  }
}

TEST_CASE("hill curve: failures annotated with the offending k") {
  const Sample s(std::vector<double>{-1.0, -2.0, 3.0, 4.0, 5.0, 6.0, 7.0});
  const KGrid grid = KGrid::from_bounds(7, 2, 6);
  try {
    hill_curve(s, grid);
    FAIL("expected NotEnoughPositive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotEnoughPositive);
    CHECK(std::string(e.what()).find("k = 5") != std::string::npos);
  }
}

TEST_CASE("tail transform: abs, upper, and the empty case") {
  const Sample s(std::vector<double>{-2.0, 1.0, -3.0});

  const auto abs_result = tail_transform(s, TailMode::Abs);
  CHECK(abs_result.sample.values() == std::vector<double>{2.0, 1.0, 3.0});
  CHECK(abs_result.dropped == 0);

  const auto upper_result = tail_transform(s, TailMode::Upper);
  CHECK(upper_result.sample.values() == std::vector<double>{1.0});
  CHECK(upper_result.dropped == 2);

  // Zeros carry no magnitude information in either mode.
  const auto with_zero = tail_transform(Sample({0.0, -2.0, 5.0}), TailMode::Abs);
  CHECK(with_zero.sample.values() == std::vector<double>{2.0, 5.0});
  CHECK(with_zero.dropped == 1);

  CHECK(code_of([] { tail_transform(Sample({0.0, 0.0}), TailMode::Upper); }) ==
        ErrorCode::EmptyResult);
}

TEST_CASE("hill estimate: permutation invariance is bitwise") {
  Xoshiro256 rng({4, 0, 0});
  std::vector<double> values = random_positive_sample(rng, 200);
  const double reference = hill_estimate(Sample(values), 40);
  for (int i = 0; i < 5; ++i) {
    shuffle_values(values, rng);
    CHECK(hill_estimate(Sample(values), 40) == reference);
  }
}

TEST_CASE("hill estimate: overestimates stable tails near alpha = 2") {
  // k-averaged mean over the 1%-20% band at alpha0 = 1.8, n = 1000; the
  // upward bias is large, so 150 replications give a decisive margin.
  const KGrid grid = KGrid::from_fractions(1000);
  RunningMoments overall;
  for (std::uint64_t rep = 0; rep < 150; ++rep) {
    const Sample draws = sample({1.8, 0.0, kDefaultGamma, 0.0}, 1000, {23, 0, rep});
    const Sample tail = tail_transform(draws, TailMode::Upper).sample;
    for (std::size_t k : grid.k_values()) {
      overall.add(hill_estimate(tail, k));
    }
  }
  CHECK(overall.mean() > 1.8);
}

TEST_CASE("sample: validation and cached order statistics") {
  CHECK_THROWS_AS(Sample(std::vector<double>{}), Error);
  CHECK_THROWS_AS(Sample({1.0, std::nan("")}), Error);

  const Sample s(std::vector<double>{3.0, 1.0, 2.0});
  CHECK(s.ascending() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(s.values() == std::vector<double>{3.0, 1.0, 2.0});
}
