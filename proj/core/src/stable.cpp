#include "mctail/stable.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "mctail/error.hpp"

namespace mctail {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// The alpha = 1 characteristic-function branch (and the matching sampler
// branch) is also used inside this window, where tan(pi*alpha/2) is too
// ill-conditioned to be useful.
constexpr double kAlphaOneWindow = 1e-8;

bool near_one(double alpha) { return std::fabs(alpha - 1.0) < kAlphaOneWindow; }

// tan(pi*alpha/2) without the precision loss of evaluating tan near its
// pole: for alpha > 1 use tan(x + pi/2) = -1/tan(x). Exactly zero at
// alpha = 2, matching the vanishing skewness correction there.
double tan_half_pi_alpha(double alpha) {
  if (alpha == 2.0) return 0.0;
  if (alpha > 1.0) return -1.0 / std::tan(0.5 * kPi * (alpha - 1.0));
  return std::tan(0.5 * kPi * alpha);
}

}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw Error(ErrorCode::DomainError,
                "alpha must be in (0,2], got " + std::to_string(alpha));
  }
  if (!(beta >= -1.0 && beta <= 1.0)) {
    throw Error(ErrorCode::DomainError,
                "beta must be in [-1,1], got " + std::to_string(beta));
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::DomainError,
                "gamma must be positive and finite, got " + std::to_string(gamma));
  }
  if (!std::isfinite(delta)) {
    throw Error(ErrorCode::DomainError, "delta must be finite");
  }
}

std::complex<double> characteristic_function(const StableParams& p, double u) {
  p.validate();
  if (u == 0.0) return {1.0, 0.0};

  const double au = std::fabs(u);
  const double sign_u = (u > 0.0) ? 1.0 : -1.0;

  double re, im;
  if (near_one(p.alpha)) {
    const double scale = p.gamma * au;
    re = -scale;
    im = -scale * p.beta * (2.0 / kPi) * sign_u * std::log(p.gamma * au) +
         p.delta * u;
  } else {
    const double scale = std::pow(p.gamma, p.alpha) * std::pow(au, p.alpha);
    const double skew = p.beta * tan_half_pi_alpha(p.alpha) * sign_u *
                        (std::pow(p.gamma * au, 1.0 - p.alpha) - 1.0);
    re = -scale;
    im = -scale * skew + p.delta * u;
  }
  return std::exp(std::complex<double>(re, im));
}

Sample sample(const StableParams& p, std::size_t n, const RngStream& stream) {
  p.validate();
  if (n < 1) {
    throw Error(ErrorCode::DomainError, "sample length must be at least 1");
  }

  Xoshiro256 rng(stream);
  std::vector<double> draws(n);

  if (near_one(p.alpha)) {
    // Chambers-Mallows-Stuck, alpha = 1 branch. The scaled draw
    // gamma*Z + delta already has the alpha = 1 characteristic function
    // of this parametrization; no location correction applies.
    const double half_pi = 0.5 * kPi;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = kPi * (rng.next_open01() - 0.5);
      const double w = -std::log(rng.next_open01());
      double z;
      if (p.beta == 0.0) {
        z = std::tan(v);
      } else {
        const double a = half_pi + p.beta * v;
        z = (a * std::tan(v) -
             p.beta * std::log((half_pi * w * std::cos(v)) / a)) /
            half_pi;
      }
      draws[i] = p.gamma * z + p.delta;
    }
  } else {
    // Chambers-Mallows-Stuck, alpha != 1. Generates in the classical
    // parametrization, then shifts location by -beta*gamma*tan(pi*alpha/2)
    // to land on the continuous parametrization used everywhere here.
    const double tan_pa = tan_half_pi_alpha(p.alpha);
    const double bt = p.beta * tan_pa;
    const double theta0 = std::atan(bt) / p.alpha;
    const double scale_s = std::pow(1.0 + bt * bt, 0.5 / p.alpha);
    const double inv_alpha = 1.0 / p.alpha;
    const double exponent = (1.0 - p.alpha) * inv_alpha;
    const double shift = p.delta - p.beta * p.gamma * tan_pa;

    for (std::size_t i = 0; i < n; ++i) {
      const double v = kPi * (rng.next_open01() - 0.5);
      const double w = -std::log(rng.next_open01());
      const double va = p.alpha * (v + theta0);
      const double z = scale_s * std::sin(va) /
                       std::pow(std::cos(v), inv_alpha) *
                       std::pow(std::cos(v - va) / w, exponent);
      draws[i] = p.gamma * z + shift;
    }
  }
  return Sample(std::move(draws));
}

double tail_constant(const StableParams& p, TailSide side) {
  p.validate();
  if (p.alpha >= 2.0) {
    throw Error(ErrorCode::DomainError,
                "tail_constant requires alpha < 2 (no power tail at alpha = 2)");
  }
  if (std::fabs(p.beta) >= 1.0) {
    throw Error(ErrorCode::DomainError,
                "tail_constant requires -1 < beta < 1 (law is one-sided at |beta| = 1)");
  }
  const double c_alpha =
      std::sin(0.5 * kPi * p.alpha) * std::tgamma(p.alpha) / kPi;
  const double skew = (side == TailSide::Upper) ? (1.0 + p.beta) : (1.0 - p.beta);
  return c_alpha * skew * std::pow(p.gamma, p.alpha);
}

std::optional<double> stable_mean(const StableParams& p) {
  p.validate();
  if (p.alpha <= 1.0) return std::nullopt;
  return p.delta - p.beta * p.gamma * tan_half_pi_alpha(p.alpha);
}

}  // namespace mctail
