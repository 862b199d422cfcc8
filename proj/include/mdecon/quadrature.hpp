#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mdecon {

//! Composite Simpson weights for `intervals` (even) equal steps of width h.
std::vector<double>
simpson_weights(std::size_t intervals, double h);

//! Uniform frequency lattice t_i = i * h, i = -m..m, covering [-k, k].
//!
//! Every frequency integral in the library is built from this axis. The
//! spacing is derived from the requested step so that all integer cut-offs
//! share one lattice anchored at t = 0, and every unit interval is a whole
//! number of Simpson panels. Integrals over nested cuboids are therefore sums
//! of the same panel contributions.
struct FrequencyAxis
{
  double k{ 0.0 };
  double h{ 0.0 };
  int half{ 0 }; // m, an even number of intervals on [0, k]

  static FrequencyAxis for_cutoff(double k, double step);

  std::size_t size() const { return static_cast<std::size_t>(2 * half + 1); }
  double node(std::size_t idx) const
  {
    return (static_cast<int>(idx) - half) * h;
  }
  std::vector<double> nodes() const;
  std::vector<double> weights() const;
};

//! Number of Simpson panels per unit frequency for a requested step.
int
panels_per_unit(double step);

//! Log-spaced spatial axis on [lo, hi]: x_i = exp(log(lo) + i * du). The
//! Simpson weights returned by `weights()` include the Jacobian x_i, so
//! sum_i w_i g(x_i) approximates int_lo^hi g(x) dx.
struct LogAxis
{
  double lo{ 0.0 };
  double hi{ 0.0 };
  std::size_t intervals{ 0 };

  static LogAxis make(double lo, double hi, double points_per_decade);

  double du() const;
  std::size_t size() const { return intervals + 1; }
  std::vector<double> nodes() const;
  std::vector<double> weights() const;
  bool empty() const { return !(hi > lo); }
};

//! Calls f(index) for every multi-index of a tensor grid with the given
//! extents, last axis fastest.
void
for_each_index(std::span<const std::size_t> extents,
               const std::function<void(std::span<const std::size_t>)>& f);

} // namespace mdecon
