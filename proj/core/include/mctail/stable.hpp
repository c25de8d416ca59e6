#ifndef MCTAIL_STABLE_HPP
#define MCTAIL_STABLE_HPP

#include <complex>
#include <cstddef>
#include <optional>

#include "mctail/rng.hpp"
#include "mctail/sample.hpp"

namespace mctail {

// Parameters of the stable law S(alpha, beta, gamma, delta) in the
// parametrization that is jointly continuous in all four parameters
// (location-scale form of the characteristic function with the
// |gamma u|^(1-alpha) - 1 skewness term).
struct StableParams {
  double alpha;  // characteristic exponent, 0 < alpha <= 2
  double beta;   // skewness, -1 <= beta <= 1
  double gamma;  // scale, > 0
  double delta;  // location, finite

  // Throws ErrorCode::DomainError when any invariant is violated.
  void validate() const;
};

enum class TailSide { Upper, Lower };

// phi(u) = E exp(iuX), both the alpha != 1 and alpha = 1 branches.
// |phi(u)| <= 1 and phi(0) = 1 for every valid parameter set.
std::complex<double> characteristic_function(const StableParams& p, double u);

// n i.i.d. draws from S(alpha, beta, gamma, delta), deterministic given
// (p, n, stream). Uses the Chambers-Mallows-Stuck transform in the classical
// parametrization, then shifts the location so the output matches the
// characteristic function above.
Sample sample(const StableParams& p, std::size_t n, const RngStream& stream);

// The constant of the asymptotic power tail,
//   lim x^alpha P(X > x)  = c_alpha (1 + beta) gamma^alpha   (upper)
//   lim x^alpha P(X < -x) = c_alpha (1 - beta) gamma^alpha   (lower)
// with c_alpha = sin(pi alpha / 2) Gamma(alpha) / pi.
// Rejects alpha = 2 (no power tail) and |beta| = 1 (one-sided law).
double tail_constant(const StableParams& p, TailSide side);

// EX = delta - beta gamma tan(pi alpha / 2) for 1 < alpha <= 2;
// nullopt when alpha <= 1 (mean not finite or undefined).
std::optional<double> stable_mean(const StableParams& p);

}  // namespace mctail

#endif  // MCTAIL_STABLE_HPP
