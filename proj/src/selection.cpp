#include "mdecon/selection.hpp"
#include "mdecon/text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdecon {

namespace {

std::vector<int>
as_ints(const CutoffVector& k)
{
  std::vector<int> out(k.dim());
  for (std::size_t j = 0; j < k.dim(); ++j) {
    const double r = std::round(k[j]);
    if (r != k[j]) {
      throw std::invalid_argument("selection grids contain integer cut-offs only, got " +
                                  format_double(k[j]));
    }
    out[j] = static_cast<int>(r);
  }
  return out;
}

std::vector<std::vector<int>>
lattice(const std::vector<int>& bounds)
{
  std::vector<std::vector<int>> out;
  std::vector<int> k(bounds.size(), 1);
  while (true) {
    out.push_back(k);
    std::size_t j = bounds.size();
    while (j > 0) {
      --j;
      if (++k[j] <= bounds[j]) {
        break;
      }
      k[j] = 1;
      if (j == 0) {
        return out;
      }
    }
  }
}

CutoffVector
to_cutoff(const std::vector<int>& k)
{
  return CutoffVector(std::vector<double>(k.begin(), k.end()));
}

} // namespace

void
SelectionConfig::validate() const
{
  if (!(chi1 > 0.0) || !std::isfinite(chi1)) {
    throw std::invalid_argument("selection: chi1 must be positive");
  }
  if (!(chi2 >= chi1) || !std::isfinite(chi2)) {
    throw std::invalid_argument("selection: chi2 must be at least chi1");
  }
  if (grid_cap < 1) {
    throw std::invalid_argument("selection: grid_cap must be at least 1");
  }
}

std::vector<int>
cutoff_grid_bounds(std::size_t n, std::span<const double> gamma, int cap)
{
  if (n < 1) {
    throw std::invalid_argument("cutoff_grid: n must be at least 1");
  }
  if (cap < 1) {
    throw std::invalid_argument("cutoff_grid: cap must be at least 1");
  }
  const double log_n = std::log(static_cast<double>(n));
  std::vector<int> bounds;
  for (double g : gamma) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("cutoff_grid: decay exponents must be nonnegative");
    }
    const double p = 2.0 * g + 1.0;
    // floor(n^{1/p}) without trusting pow near integers: b^p <= n < (b+1)^p
    double b = std::floor(std::exp(log_n / p));
    while (b >= 1.0 && p * std::log(b) > log_n + 1e-12) {
      b -= 1.0;
    }
    while (p * std::log(b + 1.0) <= log_n + 1e-12) {
      b += 1.0;
    }
    if (b < 1.0) {
      throw std::invalid_argument("cutoff_grid: n = " + std::to_string(n) +
                                  " is too small for a nonempty grid");
    }
    bounds.push_back(static_cast<int>(std::min<double>(b, cap)));
  }
  return bounds;
}

std::vector<CutoffVector>
cutoff_grid(std::size_t n, std::span<const double> gamma, int cap)
{
  std::vector<CutoffVector> out;
  for (const auto& k : lattice(cutoff_grid_bounds(n, gamma, cap))) {
    out.push_back(to_cutoff(k));
  }
  return out;
}

double
sigma_hat(const SampleMatrix& sample, const MellinContext& ctx)
{
  if (sample.dim() != ctx.dim()) {
    throw std::invalid_argument("sigma_hat: dimension mismatch");
  }
  bool unit = true;
  for (double c : ctx.c()) {
    unit = unit && c == 1.0;
  }
  if (unit) {
    return 1.0;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    double e = 0.0;
    for (std::size_t j = 0; j < ctx.dim(); ++j) {
      e += (2.0 * ctx.c(j) - 2.0) * std::log(sample(i, j));
    }
    sum += std::exp(e);
  }
  return sum / static_cast<double>(sample.n());
}

double
v_theoretical(double sigma,
              const DistributionModel& noise,
              const MellinContext& ctx,
              const CutoffVector& k,
              std::size_t n,
              const QuadratureConfig& quad)
{
  if (n < 1) {
    throw std::invalid_argument("v_hat: n must be at least 1");
  }
  return sigma * delta_g(noise, ctx, k, quad) / static_cast<double>(n);
}

double
v_hat(double sigma_hat_value,
      const DistributionModel& noise,
      const MellinContext& ctx,
      const CutoffVector& k,
      std::size_t n,
      const QuadratureConfig& quad)
{
  return 2.0 * v_theoretical(sigma_hat_value, noise, ctx, k, n, quad);
}

double
a_hat(const SampleMatrix& sample,
      const DistributionModel& noise,
      const MellinContext& ctx,
      const CutoffVector& k,
      const std::vector<CutoffVector>& grid,
      double chi1,
      const QuadratureConfig& quad)
{
  if (grid.empty()) {
    throw std::invalid_argument("a_hat: the grid is empty");
  }
  std::vector<int> bounds = as_ints(grid.front());
  for (const auto& g : grid) {
    const auto gi = as_ints(g);
    for (std::size_t j = 0; j < bounds.size(); ++j) {
      bounds[j] = std::max(bounds[j], gi[j]);
    }
  }
  const auto ki = as_ints(k);
  for (std::size_t j = 0; j < ki.size(); ++j) {
    bounds[j] = std::max(bounds[j], ki[j]);
  }
  const CuboidTable table(sample, noise, ctx, bounds, quad);
  const double s = sigma_hat(sample, ctx);
  const double n = static_cast<double>(sample.n());
  double best = 0.0;
  for (const auto& g : grid) {
    const auto gi = as_ints(g);
    const double v = 2.0 * s * table.delta(gi) / n;
    best = std::max(best, table.set_difference(gi, ki) - chi1 * v);
  }
  return best;
}

std::size_t
first_argmin(std::span<const double> values)
{
  if (values.empty()) {
    throw std::invalid_argument("first_argmin: no values");
  }
  std::size_t arg = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isnan(values[i]) && (arg == values.size() || values[i] < values[arg])) {
      arg = i;
    }
  }
  if (arg == values.size()) {
    throw std::domain_error("first_argmin: every value is NaN");
  }
  return arg;
}

SelectionTrace
select_cutoff(const CuboidTable& table,
              const SampleMatrix& sample,
              const MellinContext& ctx,
              const SelectionConfig& config)
{
  config.validate();
  const auto points = lattice(table.bounds());
  const std::size_t size = points.size();
  SelectionTrace trace;
  trace.sigma_hat = sigma_hat(sample, ctx);
  const double n = static_cast<double>(sample.n());
  trace.v_hat.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    trace.v_hat[i] = 2.0 * trace.sigma_hat * table.delta(points[i]) / n;
  }
  trace.a_hat.assign(size, 0.0);
  trace.objective.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    double best = 0.0;
    for (std::size_t q = 0; q < size; ++q) {
      best = std::max(best, table.set_difference(points[q], points[i]) -
                              config.chi1 * trace.v_hat[q]);
    }
    trace.a_hat[i] = best;
    trace.objective[i] = best + config.chi2 * trace.v_hat[i];
  }
  // the grid is in lexicographic order, so the first argmin is the smallest
  const std::size_t arg = first_argmin(trace.objective);
  trace.grid.reserve(size);
  for (const auto& p : points) {
    trace.grid.push_back(to_cutoff(p));
  }
  trace.selected = arg;
  trace.k_selected = trace.grid[arg];
  return trace;
}

SelectionTrace
select_cutoff(const SampleMatrix& sample,
              const DistributionModel& noise,
              const MellinContext& ctx,
              const SelectionConfig& config,
              const QuadratureConfig& quad)
{
  config.validate();
  const auto profile = decay_profile(noise);
  const auto bounds = cutoff_grid_bounds(sample.n(), profile.gamma(), config.grid_cap);
  const CuboidTable table(sample, noise, ctx, bounds, quad);
  return select_cutoff(table, sample, ctx, config);
}

} // namespace mdecon
