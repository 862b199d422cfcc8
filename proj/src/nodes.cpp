#include "nodes.hpp"

#include "mdecon/text.hpp"

#include <cmath>
#include <stdexcept>

namespace mdecon::detail {

namespace {

template<class T>
std::vector<T>
kron_rest(const std::vector<std::vector<T>>& per_axis)
{
  std::vector<T> out{ T(1) };
  for (std::size_t j = 1; j < per_axis.size(); ++j) {
    std::vector<T> next;
    next.reserve(out.size() * per_axis[j].size());
    for (const auto& a : out) {
      for (const auto& b : per_axis[j]) {
        next.push_back(a * b);
      }
    }
    out = std::move(next);
  }
  return out;
}

std::string
format_point(const std::vector<double>& t)
{
  std::string s = "(";
  for (std::size_t j = 0; j < t.size(); ++j) {
    s += (j ? ", " : "") + format_double(t[j]);
  }
  return s + ")";
}

} // namespace

std::size_t
NodeLayout::rows() const
{
  const auto& a = axes.front();
  return half ? static_cast<std::size_t>(a.half) + 1 : a.size();
}

std::size_t
NodeLayout::cols() const
{
  std::size_t c = 1;
  for (std::size_t j = 1; j < axes.size(); ++j) {
    c *= axes[j].size();
  }
  return c;
}

std::size_t
NodeLayout::first_index(std::size_t r) const
{
  return half ? r + static_cast<std::size_t>(axes.front().half) : r;
}

std::vector<double>
NodeLayout::point(std::size_t r, std::size_t col) const
{
  std::vector<double> t(axes.size());
  t[0] = axes[0].node(first_index(r));
  for (std::size_t j = axes.size(); j-- > 1;) {
    t[j] = axes[j].node(col % axes[j].size());
    col /= axes[j].size();
  }
  return t;
}

CMatrix
empirical_on_nodes(const SampleMatrix& sample, std::span<const double> c, const NodeLayout& layout)
{
  const std::size_t n = sample.n();
  const std::size_t d = sample.dim();
  if (c.size() != d || layout.axes.size() != d) {
    throw std::invalid_argument("empirical transform: dimension mismatch");
  }
  std::vector<double> log_y(sample.data().size());
  for (std::size_t i = 0; i < log_y.size(); ++i) {
    log_y[i] = std::log(sample.data()[i]);
  }
  std::vector<double> amp(n);
  for (std::size_t s = 0; s < n; ++s) {
    double e = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      e += (c[j] - 1.0) * log_y[s * d + j];
    }
    amp[s] = std::exp(e) / static_cast<double>(n);
  }

  const auto rows = static_cast<Eigen::Index>(layout.rows());
  CMatrix first(rows, static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double t = layout.axes[0].node(layout.first_index(static_cast<std::size_t>(r)));
    for (std::size_t s = 0; s < n; ++s) {
      const double ph = t * log_y[s * d];
      first(r, static_cast<Eigen::Index>(s)) = amp[s] * cplx(std::cos(ph), std::sin(ph));
    }
  }
  if (d == 1) {
    return first * Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(n));
  }

  // Khatri-Rao product of the remaining axes' phase factors
  CMatrix rest = CMatrix::Ones(static_cast<Eigen::Index>(n), 1);
  for (std::size_t j = 1; j < d; ++j) {
    const auto& axis = layout.axes[j];
    const auto m = static_cast<Eigen::Index>(axis.size());
    CMatrix next(static_cast<Eigen::Index>(n), rest.cols() * m);
    for (std::size_t s = 0; s < n; ++s) {
      const auto si = static_cast<Eigen::Index>(s);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double ph = axis.node(static_cast<std::size_t>(i)) * log_y[s * d + j];
        const cplx e(std::cos(ph), std::sin(ph));
        for (Eigen::Index a = 0; a < rest.cols(); ++a) {
          next(si, a * m + i) = rest(si, a) * e;
        }
      }
    }
    rest = std::move(next);
  }
  CMatrix out = first * rest;
  return out;
}

std::pair<std::vector<cplx>, std::vector<cplx>>
separable_transform(const DistributionModel& model,
                    std::span<const double> c,
                    const NodeLayout& layout)
{
  std::vector<std::vector<cplx>> per_axis(layout.axes.size());
  for (std::size_t j = 0; j < layout.axes.size(); ++j) {
    const auto& u = model.axis(j);
    const auto& axis = layout.axes[j];
    per_axis[j].resize(axis.size());
    const bool degenerate = u.is_degenerate();
    for (std::size_t i = 0; i < axis.size(); ++i) {
      per_axis[j][i] = degenerate ? cplx(1.0) : u.mellin(c[j], axis.node(i));
    }
  }
  std::vector<cplx> first(layout.rows());
  for (std::size_t r = 0; r < first.size(); ++r) {
    first[r] = per_axis[0][layout.first_index(r)];
  }
  return { std::move(first), kron_rest(per_axis) };
}

void
divide_by_noise(CMatrix& values,
                const DistributionModel& noise,
                std::span<const double> c,
                const NodeLayout& layout,
                double tol_zero)
{
  const auto [g_first, g_rest] = separable_transform(noise, c, layout);
  for (std::size_t r = 0; r < g_first.size(); ++r) {
    for (std::size_t col = 0; col < g_rest.size(); ++col) {
      const cplx g = g_first[r] * g_rest[col];
      if (!(std::abs(g) >= tol_zero)) {
        throw std::domain_error("noise Mellin transform |M_c[g](t)| = " +
                                format_double(std::abs(g)) + " is below tol_zero at t = " +
                                format_point(layout.point(r, col)));
      }
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) /= g;
    }
  }
}

CMatrix
mirror_half(const CMatrix& half_rows, std::size_t full_rows)
{
  const auto m = static_cast<Eigen::Index>(full_rows / 2);
  if (half_rows.rows() != m + 1) {
    throw std::logic_error("mirror_half: row count mismatch");
  }
  const auto cols = half_rows.cols();
  CMatrix full(static_cast<Eigen::Index>(full_rows), cols);
  for (Eigen::Index r = 0; r <= m; ++r) {
    full.row(m + r) = half_rows.row(r);
    if (r > 0) {
      full.row(m - r) = half_rows.row(r).reverse().conjugate();
    }
  }
  return full;
}

RMatrix
node_weights(const NodeLayout& layout)
{
  std::vector<std::vector<double>> per_axis;
  for (const auto& a : layout.axes) {
    per_axis.push_back(a.weights());
  }
  const auto rest = kron_rest(per_axis);
  RMatrix w(static_cast<Eigen::Index>(layout.rows()), static_cast<Eigen::Index>(rest.size()));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    const double w1 = per_axis[0][layout.first_index(static_cast<std::size_t>(r))];
    for (Eigen::Index col = 0; col < w.cols(); ++col) {
      w(r, col) = w1 * rest[static_cast<std::size_t>(col)];
    }
  }
  return w;
}

CMatrix
phase_matrix(std::span<const double> x, const FrequencyAxis& axis)
{
  CMatrix e(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(axis.size()));
  for (std::size_t p = 0; p < x.size(); ++p) {
    const double lx = std::log(x[p]);
    for (std::size_t i = 0; i < axis.size(); ++i) {
      const double ph = -axis.node(i) * lx;
      e(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)) =
        cplx(std::cos(ph), std::sin(ph));
    }
  }
  return e;
}

} // namespace mdecon::detail
