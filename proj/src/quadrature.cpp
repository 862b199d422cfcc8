#include "mdecon/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace mdecon {

std::vector<double>
simpson_weights(std::size_t intervals, double h)
{
  if (intervals == 0 || intervals % 2 != 0) {
    throw std::invalid_argument("simpson_weights: need an even number of intervals");
  }
  std::vector<double> w(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    if (i == 0 || i == intervals) {
      w[i] = h / 3.0;
    } else {
      w[i] = (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    }
  }
  return w;
}

int
panels_per_unit(double step)
{
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("frequency step must be positive");
  }
  return static_cast<int>(std::ceil(1.0 / (2.0 * step) - 1e-9));
}

FrequencyAxis
FrequencyAxis::for_cutoff(double k, double step)
{
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("cut-off must be finite and positive");
  }
  const int ppu = panels_per_unit(step);
  const int panels = std::max(1, static_cast<int>(std::ceil(k * ppu - 1e-9)));
  FrequencyAxis axis;
  axis.k = k;
  axis.half = 2 * panels;
  axis.h = k / axis.half;
  return axis;
}

std::vector<double>
FrequencyAxis::nodes() const
{
  std::vector<double> t(size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = node(i);
  }
  return t;
}

std::vector<double>
FrequencyAxis::weights() const
{
  return simpson_weights(static_cast<std::size_t>(2 * half), h);
}

LogAxis
LogAxis::make(double lo, double hi, double points_per_decade)
{
  if (!(points_per_decade > 0.0)) {
    throw std::invalid_argument("points_per_decade must be positive");
  }
  LogAxis axis;
  axis.lo = lo;
  axis.hi = hi;
  if (!(hi > lo) || !(lo > 0.0)) {
    return axis;
  }
  auto n = static_cast<std::size_t>(
    std::ceil(std::log10(hi / lo) * points_per_decade - 1e-9));
  n = std::max<std::size_t>(n, 2);
  axis.intervals = n + (n % 2);
  return axis;
}

double
LogAxis::du() const
{
  return (std::log(hi) - std::log(lo)) / static_cast<double>(intervals);
}

std::vector<double>
LogAxis::nodes() const
{
  std::vector<double> x(size());
  const double l0 = std::log(lo);
  const double step = du();
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::exp(l0 + static_cast<double>(i) * step);
  }
  x.front() = lo;
  x.back() = hi;
  return x;
}

std::vector<double>
LogAxis::weights() const
{
  auto w = simpson_weights(intervals, du());
  const auto x = nodes();
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] *= x[i];
  }
  return w;
}

void
for_each_index(std::span<const std::size_t> extents,
               const std::function<void(std::span<const std::size_t>)>& f)
{
  const std::size_t d = extents.size();
  for (auto e : extents) {
    if (e == 0) {
      return;
    }
  }
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    f(idx);
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (++idx[axis] < extents[axis]) {
        break;
      }
      idx[axis] = 0;
      if (axis == 0) {
        return;
      }
    }
    if (d == 0) {
      return;
    }
  }
}

} // namespace mdecon
