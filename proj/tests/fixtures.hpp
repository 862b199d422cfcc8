#pragma once

#include "mdecon/distributions.hpp"
#include "mdecon/estimator.hpp"

#include <cmath>
#include <vector>

namespace fixtures {

//! Y = X U with X ~ Gamma(4, scale 2) and U ~ Uniform(0, 1), streams (seed, r).
inline mdecon::SampleMatrix
gamma_uniform(std::size_t n, std::uint64_t seed, std::uint64_t replicate = 0)
{
  using namespace mdecon;
  const auto f = DistributionModel::parse("gamma(shape=4,scale=2)");
  const auto g = DistributionModel::parse("uniform()");
  return contaminate(sample(f, n, StreamKey{ seed, replicate, 0 }),
                     sample(g, n, StreamKey{ seed, replicate, 1 }));
}

//! f1(x) = x^3 exp(-x/2) / 96.
inline double
f1(double x)
{
  return x * x * x * std::exp(-0.5 * x) / 96.0;
}

//! log-spaced Simpson rule on [lo, hi] with `ppd` points per decade.
struct LogRule
{
  std::vector<double> x;
  std::vector<double> w;
};

inline LogRule
log_rule(double lo, double hi, double ppd)
{
  const auto axis = mdecon::LogAxis::make(lo, hi, ppd);
  return { axis.nodes(), axis.weights() };
}

//! 48 decades around 1: wide enough for the slowly decaying estimate tails,
//! narrow enough to stay clear of the Simpson aliasing images at
//! |log x| = pi / step (27.3 decades for step 0.05).
inline LogRule
spatial_rule()
{
  return log_rule(1e-24, 1e24, 100.0);
}

//! int (a(x) - b(x))^2 x^{2c-1} dx for two 1-d estimates on a wide grid.
inline double
spatial_distance_sq(const mdecon::DensityEstimate& a,
                    const mdecon::DensityEstimate& b,
                    double c,
                    const LogRule& rule)
{
  const auto va = a.estimate_on_tensor({ rule.x });
  const auto vb = b.estimate_on_tensor({ rule.x });
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double d = va[i] - vb[i];
    s += rule.w[i] * d * d * std::pow(rule.x[i], 2.0 * c - 1.0);
  }
  return s;
}

} // namespace fixtures
