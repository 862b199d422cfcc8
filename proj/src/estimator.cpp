#include "mdecon/estimator.hpp"
#include "mdecon/text.hpp"

#include "nodes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mdecon {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double
inv_two_pi_pow(std::size_t d)
{
  return std::pow(two_pi, -static_cast<double>(d));
}

void
require_dim(std::size_t expected, std::size_t got, const char* what)
{
  if (expected != got) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(expected) + ", got " + std::to_string(got));
  }
}

// per-axis noise transform on the nodes of one axis, with the [G0] check
// deferred to the caller
std::vector<cplx>
axis_transform(const Univariate& u, double c, const FrequencyAxis& axis)
{
  std::vector<cplx> v(axis.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = u.is_degenerate() ? cplx(1.0) : u.mellin(c, axis.node(i));
  }
  return v;
}

// the [G0] check for a separable transform: the smallest product modulus is
// the product of per-axis minima
void
check_nonvanishing(const std::vector<std::vector<cplx>>& g,
                   const std::vector<FrequencyAxis>& axes,
                   double tol_zero)
{
  double prod = 1.0;
  std::vector<double> at(axes.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < g[j].size(); ++i) {
      if (std::abs(g[j][i]) < std::abs(g[j][arg])) {
        arg = i;
      }
    }
    prod *= std::abs(g[j][arg]);
    at[j] = axes[j].node(arg);
  }
  if (!(prod >= tol_zero)) {
    std::string t = "(";
    for (std::size_t j = 0; j < at.size(); ++j) {
      t += (j ? ", " : "") + format_double(at[j]);
    }
    throw std::domain_error("noise Mellin transform |M_c[g](t)| = " + format_double(prod) +
                            " is below tol_zero at t = " + t + ")");
  }
}

// Simpson weights of each node split over unit rings |t| in [m, m + 1).
detail::RMatrix
ring_matrix(const FrequencyAxis& axis, int rings, int per_unit, bool fold)
{
  const int m = axis.half;
  detail::RMatrix full = detail::RMatrix::Zero(rings, axis.size());
  const double h = axis.h;
  for (int p = -rings * per_unit; p < rings * per_unit; ++p) {
    const int block = p >= 0 ? p / per_unit : -((-p - 1) / per_unit) - 1;
    const int ring = block >= 0 ? block : -block - 1;
    const int i0 = 2 * p + m;
    full(ring, i0) += h / 3.0;
    full(ring, i0 + 1) += 4.0 * h / 3.0;
    full(ring, i0 + 2) += h / 3.0;
  }
  if (!fold) {
    return full;
  }
  detail::RMatrix half(rings, m + 1);
  for (int r = 0; r < rings; ++r) {
    half(r, 0) = full(r, m);
    for (int i = 1; i <= m; ++i) {
      half(r, i) = full(r, m + i) + full(r, m - i);
    }
  }
  return half;
}

void
cumulate(std::vector<double>& data, const std::vector<std::size_t>& extents)
{
  std::size_t stride = data.size();
  for (std::size_t j = 0; j < extents.size(); ++j) {
    const std::size_t len = extents[j];
    stride /= len;
    for (std::size_t base = 0; base < data.size(); ++base) {
      const std::size_t pos = (base / stride) % len;
      if (pos > 0) {
        data[base] += data[base - stride];
      }
    }
  }
}

double
axis_norm_sq(const Univariate& u, double c)
{
  const double e = 2.0 * c - 1.0;
  const auto s = u.support();
  const bool lo_open = !(s.lo > 0.0);
  const bool hi_open = !std::isfinite(s.hi);
  auto integral = [&](double widen) {
    const double lo = lo_open ? u.quantile(1e-12) * 1e-3 / widen : s.lo;
    const double hi = hi_open ? u.quantile(1.0 - 1e-12) * 1e3 * widen : s.hi;
    const auto axis = LogAxis::make(lo, hi, 400.0);
    const auto x = axis.nodes();
    const auto w = axis.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double f = u.density(x[i]);
      if (f != 0.0) {
        sum += w[i] * f * f * std::pow(x[i], e);
      }
    }
    return sum;
  };
  const double a = integral(1.0);
  const double b = integral(100.0);
  if (!std::isfinite(a) || std::abs(a - b) > 1e-3 * std::abs(b)) {
    throw std::domain_error("the weighted norm of " + u.str() +
                            " does not converge for c = " + format_double(c));
  }
  return b;
}

double
axis_moment(const Univariate& u, double exponent, const char* role)
{
  if (exponent == 0.0 || u.is_degenerate()) {
    return 1.0;
  }
  if (!u.mellin_valid(exponent + 1.0)) {
    throw std::domain_error(std::string("sigma = E[Y^(2c-2)] is infinite: the ") + role + " " +
                            u.str() + " has no moment of order " + format_double(exponent) +
                            "; choose a different development point c");
  }
  return u.mellin(exponent + 1.0, 0.0).real();
}

} // namespace

cplx
empirical_mellin(const SampleMatrix& sample, const MellinContext& ctx, std::span<const double> t)
{
  require_dim(ctx.dim(), sample.dim(), "empirical_mellin");
  require_dim(ctx.dim(), t.size(), "empirical_mellin");
  cplx sum = 0.0;
  for (std::size_t i = 0; i < sample.n(); ++i) {
    cplx e = 0.0;
    for (std::size_t j = 0; j < ctx.dim(); ++j) {
      e += cplx(ctx.c(j) - 1.0, t[j]) * std::log(sample(i, j));
    }
    sum += std::exp(e);
  }
  return sum / static_cast<double>(sample.n());
}

double
delta_g(const DistributionModel& noise,
        const MellinContext& ctx,
        const CutoffVector& k,
        const QuadratureConfig& quad)
{
  require_dim(ctx.dim(), noise.dim(), "delta_g");
  require_dim(ctx.dim(), k.dim(), "delta_g");
  quad.validate();
  const auto axes = frequency_axes(k, quad);
  std::vector<std::vector<cplx>> g;
  for (std::size_t j = 0; j < axes.size(); ++j) {
    g.push_back(axis_transform(noise.axis(j), ctx.c(j), axes[j]));
  }
  check_nonvanishing(g, axes, quad.tol_zero);
  double value = inv_two_pi_pow(ctx.dim());
  for (std::size_t j = 0; j < axes.size(); ++j) {
    const auto w = axes[j].weights();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      s += w[i] / std::norm(g[j][i]);
    }
    value *= s;
  }
  return value;
}

double
target_norm_sq(const DistributionModel& target, const MellinContext& ctx)
{
  require_dim(ctx.dim(), target.dim(), "target_norm_sq");
  double v = 1.0;
  for (std::size_t j = 0; j < target.dim(); ++j) {
    v *= axis_norm_sq(target.axis(j), ctx.c(j));
  }
  return v;
}

DensityEstimate::DensityEstimate(SampleMatrix sample,
                                 DistributionModel noise,
                                 MellinContext ctx,
                                 CutoffVector k,
                                 QuadratureConfig quad)
  : sample_(std::move(sample))
  , noise_(std::move(noise))
  , ctx_(std::move(ctx))
  , k_(std::move(k))
  , quad_(std::move(quad))
{
  require_dim(ctx_.dim(), sample_.dim(), "DensityEstimate sample");
  require_dim(ctx_.dim(), noise_.dim(), "DensityEstimate noise");
  require_dim(ctx_.dim(), k_.dim(), "DensityEstimate cut-off");
  quad_.validate();
  axes_ = frequency_axes(k_, quad_);
  detail::NodeLayout half{ axes_, true };
  auto values = detail::empirical_on_nodes(sample_, ctx_.c(), half);
  detail::divide_by_noise(values, noise_, ctx_.c(), half, quad_.tol_zero);
  ratio_ = detail::mirror_half(values, axes_.front().size());
  finish();
}

DensityEstimate::DensityEstimate(SampleMatrix sample,
                                 DistributionModel noise,
                                 MellinContext ctx,
                                 CutoffVector k,
                                 QuadratureConfig quad,
                                 NodeMatrix ratio)
  : sample_(std::move(sample))
  , noise_(std::move(noise))
  , ctx_(std::move(ctx))
  , k_(std::move(k))
  , quad_(std::move(quad))
  , axes_(frequency_axes(k_, quad_))
  , ratio_(std::move(ratio))
{
  finish();
}

DensityEstimate
DensityEstimate::from_transform(const FrequencyFunction& observation_transform,
                                DistributionModel noise,
                                MellinContext ctx,
                                CutoffVector k,
                                QuadratureConfig quad)
{
  require_dim(ctx.dim(), noise.dim(), "DensityEstimate noise");
  require_dim(ctx.dim(), k.dim(), "DensityEstimate cut-off");
  quad.validate();
  detail::NodeLayout full{ frequency_axes(k, quad), false };
  NodeMatrix values(full.rows(), full.cols());
  for (std::size_t r = 0; r < full.rows(); ++r) {
    for (std::size_t col = 0; col < full.cols(); ++col) {
      const auto t = full.point(r, col);
      const cplx v = observation_transform.eval(t);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw std::domain_error("observation transform is not finite on the grid");
      }
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = v;
    }
  }
  detail::divide_by_noise(values, noise, ctx.c(), full, quad.tol_zero);
  return DensityEstimate(SampleMatrix{}, std::move(noise), std::move(ctx), std::move(k),
                         std::move(quad), std::move(values));
}

void
DensityEstimate::finish()
{
  detail::NodeLayout full{ axes_, false };
  weighted_ = ratio_.cwiseProduct(detail::node_weights(full).cast<cplx>());
}

InverseValue
DensityEstimate::evaluate(std::span<const double> x) const
{
  require_dim(ctx_.dim(), x.size(), "estimate_at");
  double scale = inv_two_pi_pow(ctx_.dim());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] > 0.0)) {
      throw std::invalid_argument("estimate_at: x must be strictly positive");
    }
    scale *= std::pow(x[j], -ctx_.c(j));
  }
  // phase vector of the remaining axes, flattened like the columns
  Eigen::VectorXcd rest = Eigen::VectorXcd::Ones(1);
  for (std::size_t j = 1; j < x.size(); ++j) {
    const auto e = detail::phase_matrix(x.subspan(j, 1), axes_[j]);
    Eigen::VectorXcd next(rest.size() * e.cols());
    for (Eigen::Index a = 0; a < rest.size(); ++a) {
      next.segment(a * e.cols(), e.cols()) = rest(a) * e.row(0).transpose();
    }
    rest = std::move(next);
  }
  const auto first = detail::phase_matrix(x.first(1), axes_[0]);
  const Eigen::VectorXcd inner = weighted_ * rest;
  const cplx v = (first.row(0) * inner)(0) * scale;
  return { v.real(), v.imag() };
}

double
DensityEstimate::estimate_at(std::span<const double> x) const
{
  return evaluate(x).value;
}

std::vector<double>
DensityEstimate::estimate_on_grid(const std::vector<std::vector<double>>& points) const
{
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    out.push_back(estimate_at(p));
  }
  return out;
}

std::vector<double>
DensityEstimate::estimate_on_tensor(const std::vector<std::vector<double>>& grid_axes) const
{
  require_dim(ctx_.dim(), grid_axes.size(), "estimate_on_tensor");
  std::vector<std::size_t> extents;
  for (const auto& a : axes_) {
    extents.push_back(a.size());
  }
  std::vector<cplx> data(weighted_.data(), weighted_.data() + weighted_.size());
  for (std::size_t j = 0; j < grid_axes.size(); ++j) {
    if (grid_axes[j].empty()) {
      return {};
    }
    for (double v : grid_axes[j]) {
      if (!(v > 0.0)) {
        throw std::invalid_argument("estimate_on_tensor: x must be strictly positive");
      }
    }
    data = detail::mode_product(data, extents, j, detail::phase_matrix(grid_axes[j], axes_[j]));
  }
  // spatial scale x^{-c} / (2 pi)^d, separable over axes
  std::vector<std::vector<double>> scale(grid_axes.size());
  for (std::size_t j = 0; j < grid_axes.size(); ++j) {
    for (double v : grid_axes[j]) {
      scale[j].push_back(std::pow(v, -ctx_.c(j)) / two_pi);
    }
  }
  std::vector<double> out(data.size());
  std::vector<std::size_t> idx(extents.size(), 0);
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    double s = 1.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      s *= scale[j][idx[j]];
    }
    out[flat] = data[flat].real() * s;
    for (std::size_t j = idx.size(); j-- > 0;) {
      if (++idx[j] < extents[j]) {
        break;
      }
      idx[j] = 0;
    }
  }
  return out;
}

double
DensityEstimate::spectral_risk(const DistributionModel& target) const
{
  require_dim(ctx_.dim(), target.dim(), "spectral_risk");
  detail::NodeLayout full{ axes_, false };
  const auto [f_first, f_rest] = detail::separable_transform(target, ctx_.c(), full);
  const auto w = detail::node_weights(full);
  double sum = 0.0;
  for (Eigen::Index r = 0; r < ratio_.rows(); ++r) {
    for (Eigen::Index col = 0; col < ratio_.cols(); ++col) {
      const cplx mf = f_first[static_cast<std::size_t>(r)] * f_rest[static_cast<std::size_t>(col)];
      sum += w(r, col) * (std::norm(mf - ratio_(r, col)) - std::norm(mf));
    }
  }
  return std::max(0.0, sum * inv_two_pi_pow(ctx_.dim()) + target_norm_sq(target, ctx_));
}

double
sigma_theoretical(const DistributionModel& target,
                  const DistributionModel& noise,
                  const MellinContext& ctx)
{
  require_dim(ctx.dim(), target.dim(), "sigma_theoretical");
  require_dim(ctx.dim(), noise.dim(), "sigma_theoretical");
  double sigma = 1.0;
  for (std::size_t j = 0; j < ctx.dim(); ++j) {
    const double e = 2.0 * ctx.c(j) - 2.0;
    sigma *= axis_moment(target.axis(j), e, "target") * axis_moment(noise.axis(j), e, "noise");
  }
  return sigma;
}

RiskDecomposition
theoretical_risk(const DistributionModel& target,
                 const DistributionModel& noise,
                 const MellinContext& ctx,
                 const CutoffVector& k,
                 std::size_t n,
                 const QuadratureConfig& quad,
                 double k_max)
{
  require_dim(ctx.dim(), k.dim(), "theoretical_risk");
  if (n < 1) {
    throw std::invalid_argument("theoretical_risk: n must be at least 1");
  }
  RiskDecomposition out;
  out.sigma = sigma_theoretical(target, noise, ctx);

  // |M_c[f]|^2 is separable, so both cuboid integrals are products of 1-d sums
  double inner = 1.0;
  double outer = 1.0;
  for (std::size_t j = 0; j < ctx.dim(); ++j) {
    auto axis_integral = [&](double kk) {
      const auto axis = FrequencyAxis::for_cutoff(kk, quad.step_t);
      const auto w = axis.weights();
      double s = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        s += w[i] * std::norm(target.axis(j).mellin(ctx.c(j), axis.node(i)));
      }
      return s;
    };
    inner *= axis_integral(k[j]);
    outer *= axis_integral(std::max(k_max, k[j]));
  }
  out.bias_sq = std::max(0.0, (outer - inner) * inv_two_pi_pow(ctx.dim()));
  out.variance_bound = out.sigma * delta_g(noise, ctx, k, quad) / static_cast<double>(n);
  return out;
}

CutoffVector
minimax_cutoff_schedule(std::span<const double> s, std::span<const double> gamma, double n)
{
  if (s.size() != gamma.size() || s.empty()) {
    throw std::invalid_argument("minimax_cutoff_schedule: s and gamma must have equal length");
  }
  if (!(n >= 1.0)) {
    throw std::invalid_argument("minimax_cutoff_schedule: n must be at least 1");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!(s[j] > 0.0) || !(gamma[j] >= 0.0)) {
      throw std::invalid_argument("minimax_cutoff_schedule: s must be positive, gamma nonnegative");
    }
    total += (2.0 * gamma[j] + 1.0) / s[j];
  }
  std::vector<double> k(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    k[i] = std::pow(n, 1.0 / (2.0 * s[i] + s[i] * total));
  }
  return CutoffVector(std::move(k));
}

CuboidTable::CuboidTable(const SampleMatrix& sample,
                         const DistributionModel& noise,
                         const MellinContext& ctx,
                         std::vector<int> bounds,
                         const QuadratureConfig& quad,
                         const std::optional<DistributionModel>& target)
  : bounds_(std::move(bounds))
  , scale_(inv_two_pi_pow(ctx.dim()))
{
  const std::size_t d = ctx.dim();
  require_dim(d, sample.dim(), "CuboidTable sample");
  require_dim(d, noise.dim(), "CuboidTable noise");
  require_dim(d, bounds_.size(), "CuboidTable bounds");
  quad.validate();
  std::vector<double> kd;
  for (int b : bounds_) {
    if (b < 1) {
      throw std::invalid_argument("CuboidTable: bounds must be at least 1");
    }
    kd.push_back(b);
  }
  const int per_unit = panels_per_unit(quad.step_t);
  const auto axes = frequency_axes(CutoffVector(kd), quad);
  detail::NodeLayout half{ axes, true };

  auto ratio = detail::empirical_on_nodes(sample, ctx.c(), half);
  detail::divide_by_noise(ratio, noise, ctx.c(), half, quad.tol_zero);

  std::vector<detail::RMatrix> rings;
  for (std::size_t j = 0; j < d; ++j) {
    rings.push_back(ring_matrix(axes[j], bounds_[j], per_unit, j == 0));
  }
  std::vector<std::size_t> grid_extents(bounds_.begin(), bounds_.end());
  auto reduce = [&](std::vector<double> data) {
    std::vector<std::size_t> extents{ half.rows() };
    for (std::size_t j = 1; j < d; ++j) {
      extents.push_back(axes[j].size());
    }
    for (std::size_t j = d; j-- > 0;) {
      data = detail::mode_product(data, extents, j, rings[j]);
    }
    cumulate(data, grid_extents);
    return data;
  };

  std::vector<double> mod2(static_cast<std::size_t>(ratio.size()));
  for (Eigen::Index i = 0; i < ratio.size(); ++i) {
    mod2[static_cast<std::size_t>(i)] = std::norm(ratio.data()[i]);
  }
  cum_ratio_ = reduce(std::move(mod2));

  if (target) {
    require_dim(d, target->dim(), "CuboidTable target");
    const auto [f_first, f_rest] = detail::separable_transform(*target, ctx.c(), half);
    std::vector<double> err(static_cast<std::size_t>(ratio.size()));
    for (Eigen::Index r = 0; r < ratio.rows(); ++r) {
      for (Eigen::Index col = 0; col < ratio.cols(); ++col) {
        const cplx mf =
          f_first[static_cast<std::size_t>(r)] * f_rest[static_cast<std::size_t>(col)];
        err[static_cast<std::size_t>(r * ratio.cols() + col)] =
          std::norm(mf - ratio(r, col)) - std::norm(mf);
      }
    }
    cum_error_ = reduce(std::move(err));
    target_norm_ = target_norm_sq(*target, ctx);
  }

  for (std::size_t j = 0; j < d; ++j) {
    const auto g = axis_transform(noise.axis(j), ctx.c(j), axes[j]);
    const auto full = ring_matrix(axes[j], bounds_[j], per_unit, false);
    std::vector<double> cum(static_cast<std::size_t>(bounds_[j]));
    for (int r = 0; r < bounds_[j]; ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        s += full(r, static_cast<Eigen::Index>(i)) / std::norm(g[i]);
      }
      cum[static_cast<std::size_t>(r)] = s + (r ? cum[static_cast<std::size_t>(r - 1)] : 0.0);
    }
    cum_delta_.push_back(std::move(cum));
  }
}

std::size_t
CuboidTable::offset(std::span<const int> k) const
{
  require_dim(bounds_.size(), k.size(), "CuboidTable");
  std::size_t off = 0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] < 1 || k[j] > bounds_[j]) {
      throw std::out_of_range("CuboidTable: cut-off " + std::to_string(k[j]) +
                              " outside 1.." + std::to_string(bounds_[j]));
    }
    off = off * static_cast<std::size_t>(bounds_[j]) + static_cast<std::size_t>(k[j] - 1);
  }
  return off;
}

double
CuboidTable::norm_sq(std::span<const int> k) const
{
  return scale_ * cum_ratio_[offset(k)];
}

double
CuboidTable::set_difference(std::span<const int> outer, std::span<const int> inner) const
{
  require_dim(outer.size(), inner.size(), "CuboidTable::set_difference");
  const std::size_t off_outer = offset(outer);
  std::size_t off_meet = 0;
  bool empty = true;
  for (std::size_t j = 0; j < outer.size(); ++j) {
    const int m = std::min(outer[j], inner[j]);
    if (m < 1) {
      throw std::out_of_range("CuboidTable: cut-off entries must be at least 1");
    }
    empty = empty && m == outer[j];
    off_meet = off_meet * static_cast<std::size_t>(bounds_[j]) + static_cast<std::size_t>(m - 1);
  }
  if (empty) {
    return 0.0;
  }
  return std::max(0.0, scale_ * (cum_ratio_[off_outer] - cum_ratio_[off_meet]));
}

double
CuboidTable::delta(std::span<const int> k) const
{
  offset(k);
  double v = scale_;
  for (std::size_t j = 0; j < k.size(); ++j) {
    v *= cum_delta_[j][static_cast<std::size_t>(k[j] - 1)];
  }
  return v;
}

double
CuboidTable::risk(std::span<const int> k) const
{
  if (!target_norm_) {
    throw std::logic_error("CuboidTable: no target density was given");
  }
  return std::max(0.0, scale_ * cum_error_[offset(k)] + *target_norm_);
}

} // namespace mdecon
