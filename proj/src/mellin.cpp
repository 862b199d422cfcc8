#include "mdecon/mellin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mdecon {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string
format_point(std::span<const double> p)
{
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t j = 0; j < p.size(); ++j) {
    os << (j ? ", " : "") << p[j];
  }
  os << ")";
  return os.str();
}

void
check_dim(std::size_t expected, std::size_t got, const char* what)
{
  if (expected != got) {
    std::ostringstream os;
    os << what << ": expected dimension " << expected << ", got " << got;
    throw std::invalid_argument(os.str());
  }
}

// Visits every node of a tensor grid with its point and product weight.
template<class F>
void
visit_tensor(const std::vector<std::vector<double>>& nodes,
             const std::vector<std::vector<double>>& weights,
             F&& f)
{
  const std::size_t d = nodes.size();
  std::vector<std::size_t> extents(d);
  for (std::size_t j = 0; j < d; ++j) {
    extents[j] = nodes[j].size();
  }
  std::vector<double> point(d);
  for_each_index(extents, [&](std::span<const std::size_t> idx) {
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      point[j] = nodes[j][idx[j]];
      w *= weights[j][idx[j]];
    }
    f(std::span<const double>(point), w);
  });
}

struct TensorGrid
{
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> weights;
  bool empty{ false };
};

TensorGrid
frequency_grid(const CutoffVector& k, const QuadratureConfig& quad)
{
  TensorGrid g;
  for (const auto& axis : frequency_axes(k, quad)) {
    g.nodes.push_back(axis.nodes());
    g.weights.push_back(axis.weights());
  }
  return g;
}

TensorGrid
spatial_grid(const std::vector<LogAxis>& axes)
{
  TensorGrid g;
  for (const auto& axis : axes) {
    if (axis.empty()) {
      g.empty = true;
      return g;
    }
    g.nodes.push_back(axis.nodes());
    g.weights.push_back(axis.weights());
  }
  return g;
}

double
cuboid_integral(const FrequencyFunction& H,
                const CutoffVector& k,
                const QuadratureConfig& quad)
{
  const auto grid = frequency_grid(k, quad);
  double sum = 0.0;
  visit_tensor(grid.nodes, grid.weights, [&](std::span<const double> t, double w) {
    const cplx v = H.eval(t);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::domain_error("frequency function is not finite at t = " +
                              format_point(t));
    }
    sum += w * std::norm(v);
  });
  return sum;
}

} // namespace

MellinContext::MellinContext(std::vector<double> c)
  : c_(std::move(c))
{
  if (c_.empty()) {
    throw std::invalid_argument("MellinContext: dimension must be at least 1");
  }
  for (double v : c_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("MellinContext: development point must be finite");
    }
  }
}

void
QuadratureConfig::validate() const
{
  if (!(step_t > 0.0) || !std::isfinite(step_t)) {
    throw std::invalid_argument("quadrature: step_t must be positive");
  }
  if (!(tol_zero > 0.0)) {
    throw std::invalid_argument("quadrature: tol_zero must be positive");
  }
  if (!(points_per_decade > 0.0)) {
    throw std::invalid_argument("quadrature: points_per_decade must be positive");
  }
  if (!(decades > 0.0)) {
    throw std::invalid_argument("quadrature: decades must be positive");
  }
  if (!(auto_factor > 0.0)) {
    throw std::invalid_argument("quadrature: auto_factor must be positive");
  }
  for (double v : x_max) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("quadrature: x_max must be positive");
    }
  }
}

QuadratureConfig
QuadratureConfig::calibrated(const SampleMatrix& sample) const
{
  QuadratureConfig out = *this;
  if (!is_auto()) {
    return out;
  }
  out.x_max.resize(sample.dim());
  for (std::size_t j = 0; j < sample.dim(); ++j) {
    out.x_max[j] = auto_factor * empirical_quantile(sample, j, 0.999);
  }
  return out;
}

double
QuadratureConfig::x_max_for(std::size_t axis) const
{
  if (is_auto()) {
    throw std::invalid_argument(
      "quadrature: x_max is 'auto' but no sample was given to calibrate it");
  }
  return x_max.size() == 1 ? x_max[0] : x_max.at(axis);
}

Interval
SpatialFunction::support_of(std::size_t axis) const
{
  if (support.empty()) {
    return {};
  }
  return support.size() == 1 ? support[0] : support.at(axis);
}

CutoffVector::CutoffVector(std::vector<double> k)
  : k_(std::move(k))
{
  if (k_.empty()) {
    throw std::invalid_argument("cut-off vector must not be empty");
  }
  for (double v : k_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("cut-off entries must be finite and positive");
    }
  }
}

CutoffVector
CutoffVector::meet(const CutoffVector& a, const CutoffVector& b)
{
  check_dim(a.dim(), b.dim(), "CutoffVector::meet");
  std::vector<double> m(a.dim());
  for (std::size_t j = 0; j < m.size(); ++j) {
    m[j] = std::min(a[j], b[j]);
  }
  return CutoffVector(std::move(m));
}

bool
CutoffVector::dominates(const CutoffVector& other) const
{
  check_dim(dim(), other.dim(), "CutoffVector::dominates");
  for (std::size_t j = 0; j < dim(); ++j) {
    if (k_[j] < other[j]) {
      return false;
    }
  }
  return true;
}

std::vector<FrequencyAxis>
frequency_axes(const CutoffVector& k, const QuadratureConfig& quad)
{
  std::vector<FrequencyAxis> axes;
  axes.reserve(k.dim());
  for (std::size_t j = 0; j < k.dim(); ++j) {
    axes.push_back(FrequencyAxis::for_cutoff(k[j], quad.step_t));
  }
  return axes;
}

std::vector<LogAxis>
spatial_axes(std::size_t dim,
             const QuadratureConfig& quad,
             std::span<const Interval> support)
{
  std::vector<LogAxis> axes;
  axes.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const double xm = quad.x_max_for(j);
    double lo = xm * std::pow(10.0, -quad.decades);
    double hi = xm;
    if (!support.empty()) {
      const auto& s = support.size() == 1 ? support[0] : support[j];
      lo = std::max(lo, s.lo);
      hi = std::min(hi, s.hi);
    }
    axes.push_back(LogAxis::make(lo, hi, quad.points_per_decade));
  }
  return axes;
}

cplx
mellin_forward(const SpatialFunction& h,
               const MellinContext& ctx,
               std::span<const double> t,
               const QuadratureConfig& quad)
{
  check_dim(ctx.dim(), h.dim, "mellin_forward");
  check_dim(ctx.dim(), t.size(), "mellin_forward");
  for (double v : t) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("mellin_forward: frequency must be finite");
    }
  }
  std::vector<Interval> support(ctx.dim());
  for (std::size_t j = 0; j < ctx.dim(); ++j) {
    support[j] = h.support_of(j);
  }
  const auto grid = spatial_grid(spatial_axes(ctx.dim(), quad, support));
  if (grid.empty) {
    return 0.0;
  }
  cplx sum = 0.0;
  visit_tensor(grid.nodes, grid.weights, [&](std::span<const double> x, double w) {
    const double hv = h.eval(x);
    if (!std::isfinite(hv)) {
      throw std::domain_error("mellin_forward: integrand is not finite at x = " +
                              format_point(x));
    }
    if (hv == 0.0) {
      return;
    }
    double log_mod = 0.0;
    double phase = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double lx = std::log(x[j]);
      log_mod += (ctx.c(j) - 1.0) * lx;
      phase += t[j] * lx;
    }
    sum += w * hv * std::exp(log_mod) * cplx(std::cos(phase), std::sin(phase));
  });
  return sum;
}

InverseValue
mellin_inverse(const FrequencyFunction& H,
               const MellinContext& ctx,
               const CutoffVector& k,
               std::span<const double> x,
               const QuadratureConfig& quad)
{
  check_dim(ctx.dim(), k.dim(), "mellin_inverse");
  check_dim(ctx.dim(), x.size(), "mellin_inverse");
  for (double v : x) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("mellin_inverse: x must be strictly positive");
    }
  }
  const auto grid = frequency_grid(k, quad);
  std::vector<double> log_x(x.size());
  double scale = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    log_x[j] = std::log(x[j]);
    scale *= std::exp(-ctx.c(j) * log_x[j]) / two_pi;
  }
  cplx sum = 0.0;
  visit_tensor(grid.nodes, grid.weights, [&](std::span<const double> t, double w) {
    const cplx v = H.eval(t);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::domain_error("mellin_inverse: H is not finite at t = " +
                              format_point(t));
    }
    double phase = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      phase -= t[j] * log_x[j];
    }
    sum += w * v * cplx(std::cos(phase), std::sin(phase));
  });
  sum *= scale;
  return { sum.real(), sum.imag() };
}

double
mult_convolve(const SpatialFunction& h1,
              const SpatialFunction& h2,
              std::span<const double> y,
              const QuadratureConfig& quad)
{
  check_dim(h1.dim, h2.dim, "mult_convolve");
  check_dim(h1.dim, y.size(), "mult_convolve");
  const std::size_t d = y.size();
  std::vector<LogAxis> axes;
  for (std::size_t j = 0; j < d; ++j) {
    if (!(y[j] > 0.0)) {
      throw std::invalid_argument("mult_convolve: y must be strictly positive, got " +
                                  format_point(y));
    }
    const auto s1 = h1.support_of(j);
    const auto s2 = h2.support_of(j);
    double lo = std::max(s2.lo, y[j] / s1.hi);
    double hi = s1.lo > 0.0 ? std::min(s2.hi, y[j] / s1.lo) : s2.hi;
    if (quad.is_auto()) {
      if (!std::isfinite(hi) || !(lo > 0.0)) {
        throw std::invalid_argument(
          "mult_convolve: unbounded support needs an explicit x_max");
      }
    } else {
      const double xm = quad.x_max_for(j);
      lo = std::max(lo, xm * std::pow(10.0, -quad.decades));
      hi = std::min(hi, xm);
    }
    axes.push_back(LogAxis::make(lo, hi, quad.points_per_decade));
  }
  const auto grid = spatial_grid(axes);
  if (grid.empty) {
    return 0.0;
  }
  std::vector<double> ratio(d);
  double sum = 0.0;
  visit_tensor(grid.nodes, grid.weights, [&](std::span<const double> x, double w) {
    double inv = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      ratio[j] = y[j] / x[j];
      inv /= x[j];
    }
    const double a = h2.eval(x);
    if (a == 0.0) {
      return;
    }
    sum += w * h1.eval(ratio) * a * inv;
  });
  return sum;
}

SpatialFunction
convolved(SpatialFunction h1, SpatialFunction h2, QuadratureConfig quad)
{
  check_dim(h1.dim, h2.dim, "convolved");
  SpatialFunction out;
  out.dim = h1.dim;
  out.support.resize(h1.dim);
  for (std::size_t j = 0; j < h1.dim; ++j) {
    const auto s1 = h1.support_of(j);
    const auto s2 = h2.support_of(j);
    out.support[j] = { s1.lo * s2.lo, s1.hi * s2.hi };
  }
  out.eval = [h1 = std::move(h1), h2 = std::move(h2), quad = std::move(quad)](
               std::span<const double> y) {
    return mult_convolve(h1, h2, y, quad);
  };
  return out;
}

double
plancherel_norm_sq(const FrequencyFunction& H,
                   const CutoffVector& k,
                   const MellinContext& ctx,
                   const QuadratureConfig& quad)
{
  check_dim(ctx.dim(), k.dim(), "plancherel_norm_sq");
  return cuboid_integral(H, k, quad) / std::pow(two_pi, static_cast<double>(ctx.dim()));
}

double
plancherel_norm_sq(const FrequencyFunction& H,
                   const CuboidDifference& region,
                   const MellinContext& ctx,
                   const QuadratureConfig& quad)
{
  const auto inner = CutoffVector::meet(region.inner, region.outer);
  if (inner == region.outer) {
    return 0.0;
  }
  const double outer_val = plancherel_norm_sq(H, region.outer, ctx, quad);
  const double inner_val = plancherel_norm_sq(H, inner, ctx, quad);
  return std::max(0.0, outer_val - inner_val);
}

double
weighted_l2_norm_sq(const SpatialFunction& h,
                    const MellinContext& ctx,
                    const QuadratureConfig& quad)
{
  check_dim(ctx.dim(), h.dim, "weighted_l2_norm_sq");
  // the squared function vanishes outside the support as well
  std::vector<Interval> support(ctx.dim());
  for (std::size_t j = 0; j < ctx.dim(); ++j) {
    support[j] = h.support_of(j);
  }
  const auto grid = spatial_grid(spatial_axes(ctx.dim(), quad, support));
  if (grid.empty) {
    return 0.0;
  }
  double sum = 0.0;
  visit_tensor(grid.nodes, grid.weights, [&](std::span<const double> x, double w) {
    const double hv = h.eval(x);
    if (!std::isfinite(hv)) {
      throw std::domain_error("weighted_l2_norm_sq: function is not finite at x = " +
                              format_point(x));
    }
    double weight = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      weight *= std::pow(x[j], 2.0 * ctx.c(j) - 1.0);
    }
    sum += w * hv * hv * weight;
  });
  return sum;
}

double
sobolev_seminorm_sq(const FrequencyFunction& H,
                    std::span<const double> s,
                    const MellinContext& ctx,
                    const CutoffVector& k_max,
                    const QuadratureConfig& quad)
{
  check_dim(ctx.dim(), s.size(), "sobolev_seminorm_sq");
  check_dim(ctx.dim(), k_max.dim(), "sobolev_seminorm_sq");
  const auto grid = frequency_grid(k_max, quad);
  double sum = 0.0;
  visit_tensor(grid.nodes, grid.weights, [&](std::span<const double> t, double w) {
    const double mod2 = std::norm(H.eval(t));
    double factor = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      factor += std::pow(1.0 + t[j] * t[j], s[j]);
    }
    sum += w * factor * mod2;
  });
  return sum / std::pow(two_pi, static_cast<double>(ctx.dim()));
}

} // namespace mdecon
