#pragma once

#include "mdecon/quadrature.hpp"
#include "mdecon/sample.hpp"
#include "mdecon/special.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace mdecon {

//! Dimension and development point c shared by all transform operations.
class MellinContext
{
public:
  explicit MellinContext(std::vector<double> c);

  std::size_t dim() const { return c_.size(); }
  const std::vector<double>& c() const { return c_; }
  double c(std::size_t j) const { return c_[j]; }

private:
  std::vector<double> c_;
};

//! Numerical settings for frequency and spatial quadrature.
struct QuadratureConfig
{
  double step_t{ 0.05 };
  double points_per_decade{ 200.0 };
  //! spatial truncation per axis (one entry is broadcast); empty means auto.
  std::vector<double> x_max{};
  //! the spatial grid spans (x_max * 10^-decades, x_max].
  double decades{ 6.0 };
  //! auto x_max is auto_factor times the 99.9% empirical quantile.
  double auto_factor{ 2.0 };
  double tol_zero{ 1e-12 };

  void validate() const;
  bool is_auto() const { return x_max.empty(); }
  //! copy with x_max resolved from the sample when it is auto.
  QuadratureConfig calibrated(const SampleMatrix& sample) const;
  //! resolved truncation for an axis; throws when x_max is auto.
  double x_max_for(std::size_t axis) const;
};

//! Closed interval of positive reals used to describe known supports.
struct Interval
{
  double lo{ 0.0 };
  double hi{ std::numeric_limits<double>::infinity() };
};

//! Real function on (0, inf)^d with optional per-axis support. Quadrature
//! grids are clipped to the support, so discontinuities at its edges do not
//! degrade the Simpson rule.
struct SpatialFunction
{
  std::size_t dim{ 1 };
  std::function<double(std::span<const double>)> eval;
  std::vector<Interval> support{};

  Interval support_of(std::size_t axis) const;
};

//! Complex function of frequency, typically a Mellin transform.
struct FrequencyFunction
{
  std::function<cplx(std::span<const double>)> eval;
  //! true when the function is the transform of a real-valued function, so
  //! H(-t) = conj(H(t)).
  bool conjugate_symmetric{ false };
};

//! Positive cut-off vector k defining the cuboid Q_k = prod_j [-k_j, k_j].
class CutoffVector
{
public:
  CutoffVector() = default;
  explicit CutoffVector(std::vector<double> k);
  CutoffVector(std::initializer_list<double> k)
    : CutoffVector(std::vector<double>(k))
  {
  }

  std::size_t dim() const { return k_.size(); }
  double operator[](std::size_t j) const { return k_[j]; }
  const std::vector<double>& values() const { return k_; }

  //! componentwise minimum k ^ k'.
  static CutoffVector meet(const CutoffVector& a, const CutoffVector& b);
  //! true when every entry of this is >= the matching entry of other.
  bool dominates(const CutoffVector& other) const;

  bool operator==(const CutoffVector& other) const = default;

private:
  std::vector<double> k_;
};

//! The set difference Q_outer \ Q_{inner ^ outer}.
struct CuboidDifference
{
  CutoffVector outer;
  CutoffVector inner;
};

//! Result of a truncated inverse transform. `imag` is the imaginary residue
//! of the integral, which should vanish for conjugate-symmetric inputs.
struct InverseValue
{
  double value{ 0.0 };
  double imag{ 0.0 };
};

//! Frequency axes covering Q_k with the shared lattice rule.
std::vector<FrequencyAxis>
frequency_axes(const CutoffVector& k, const QuadratureConfig& quad);

//! Log-spaced spatial axes for a function on the truncated domain.
std::vector<LogAxis>
spatial_axes(std::size_t dim,
             const QuadratureConfig& quad,
             std::span<const Interval> support = {});

//! int x^{c-1+it} h(x) dx by log-grid Simpson quadrature.
cplx
mellin_forward(const SpatialFunction& h,
               const MellinContext& ctx,
               std::span<const double> t,
               const QuadratureConfig& quad);

//! Real part of (2 pi)^{-d} int_{Q_k} x^{-c-it} H(t) dt.
InverseValue
mellin_inverse(const FrequencyFunction& H,
               const MellinContext& ctx,
               const CutoffVector& k,
               std::span<const double> x,
               const QuadratureConfig& quad);

//! Multiplicative convolution (h1 * h2)(y) = int h1(y/x) h2(x) x^{-1} dx.
double
mult_convolve(const SpatialFunction& h1,
              const SpatialFunction& h2,
              std::span<const double> y,
              const QuadratureConfig& quad);

//! h1 * h2 as an evaluatable function whose support is the product of the
//! supports of h1 and h2.
SpatialFunction
convolved(SpatialFunction h1, SpatialFunction h2, QuadratureConfig quad);

//! (2 pi)^{-d} int_{Q_k} |H(t)|^2 dt.
double
plancherel_norm_sq(const FrequencyFunction& H,
                   const CutoffVector& k,
                   const MellinContext& ctx,
                   const QuadratureConfig& quad);

//! (2 pi)^{-d} int over Q_{k'} \ Q_{k ^ k'} of |H|^2, computed as the
//! difference of the two cuboid integrals on the shared lattice.
double
plancherel_norm_sq(const FrequencyFunction& H,
                   const CuboidDifference& region,
                   const MellinContext& ctx,
                   const QuadratureConfig& quad);

//! int h(x)^2 x^{2c-1} dx over the truncated domain.
double
weighted_l2_norm_sq(const SpatialFunction& h,
                    const MellinContext& ctx,
                    const QuadratureConfig& quad);

//! sum_j (2 pi)^{-d} int_{Q_kmax} (1 + t_j^2)^{s_j} |H(t)|^2 dt.
double
sobolev_seminorm_sq(const FrequencyFunction& H,
                    std::span<const double> s,
                    const MellinContext& ctx,
                    const CutoffVector& k_max,
                    const QuadratureConfig& quad);

} // namespace mdecon
