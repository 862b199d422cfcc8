#pragma once

#include "mdecon/mellin.hpp"
#include "mdecon/rng.hpp"
#include "mdecon/sample.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mdecon {

//! Beta(1, b): b (1 - x)^{b-1} on (0, 1). Uniform01 is b = 1.
struct Beta1b
{
  int b{ 1 };
  bool operator==(const Beta1b&) const = default;
};

//! Scaled log-Gamma: log X - mu ~ Gamma(a, rate lambda). a = 1 is Pareto.
struct ScaledLogGamma
{
  double mu{ 0.0 };
  double a{ 1.0 };
  double lambda{ 1.0 };
  bool operator==(const ScaledLogGamma&) const = default;
};

struct GammaDist
{
  double shape{ 1.0 };
  double scale{ 1.0 };
  bool operator==(const GammaDist&) const = default;
};

//! Weibull with shape m and unit scale: m x^{m-1} exp(-x^m).
struct Weibull
{
  double m{ 1.0 };
  bool operator==(const Weibull&) const = default;
};

struct LogNormal
{
  double mu{ 0.0 };
  double lambda{ 1.0 };
  bool operator==(const LogNormal&) const = default;
};

//! scale * Beta(p, q), supported on (0, scale).
struct ScaledBeta
{
  double p{ 1.0 };
  double q{ 1.0 };
  double scale{ 1.0 };
  bool operator==(const ScaledBeta&) const = default;
};

//! Degenerate noise U = 1; Mellin transform identically one.
struct NoNoise
{
  bool operator==(const NoNoise&) const = default;
};

using Family =
  std::variant<Beta1b, ScaledLogGamma, GammaDist, Weibull, LogNormal, ScaledBeta, NoNoise>;

enum class DecayClass
{
  smooth,
  super_smooth
};

//! A single univariate family with validated parameters.
class Univariate
{
public:
  explicit Univariate(Family family);

  const Family& family() const { return family_; }
  bool is_degenerate() const { return std::holds_alternative<NoNoise>(family_); }

  double density(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;
  Interval support() const;

  //! true when the Mellin transform exists at development point c.
  bool mellin_valid(double c) const;
  //! closed-form Mellin transform; std::domain_error outside the window.
  cplx mellin(double c, double t) const;

  double draw(Rng& rng) const;

  DecayClass decay_class() const;
  //! polynomial decay exponent; throws for super smooth families.
  double decay_exponent() const;

  //! canonical spec string, e.g. "gamma(shape=4,scale=2)".
  std::string str() const;
  static Univariate parse(std::string_view spec);

  bool operator==(const Univariate&) const = default;

private:
  std::string validity_window() const;

  Family family_;
};

//! Tensor product of univariate families, one per axis.
class DistributionModel
{
public:
  DistributionModel() = default;
  explicit DistributionModel(std::vector<Univariate> axes);
  DistributionModel(Univariate single)
    : DistributionModel(std::vector<Univariate>{ std::move(single) })
  {
  }

  //! one spec string per axis; a single spec is a univariate model.
  static DistributionModel parse(const std::vector<std::string>& specs);
  static DistributionModel parse(std::string_view spec);

  std::size_t dim() const { return axes_.size(); }
  const Univariate& axis(std::size_t j) const { return axes_.at(j); }
  const std::vector<Univariate>& axes() const { return axes_; }
  std::vector<std::string> specs() const;
  std::string str() const;
  bool is_degenerate() const;

  //! the same model repeated on `dim` axes.
  DistributionModel broadcast(std::size_t dim) const;

  bool operator==(const DistributionModel&) const = default;

private:
  std::vector<Univariate> axes_;
};

struct DecayProfile
{
  DecayClass cls{ DecayClass::smooth };
  std::vector<double> exponents;

  //! [G1] exponents; throws std::logic_error for super smooth models.
  const std::vector<double>& gamma() const;
};

double
density(const DistributionModel& model, std::span<const double> x);

cplx
mellin_closed_form(const Univariate& model, double c, double t);

cplx
mellin_closed_form(const DistributionModel& model,
                   std::span<const double> c,
                   std::span<const double> t);

SampleMatrix
sample(const DistributionModel& model, std::size_t n, StreamKey key);

SampleMatrix
sample(const DistributionModel& model, std::size_t n, std::uint64_t seed);

DecayProfile
decay_profile(const DistributionModel& model);

//! E[X^e] = M_{e+1}[f](0), componentwise product over axes.
double
moment(const DistributionModel& model, std::span<const double> exponent);

//! the model density as a quadrature-ready function with its support.
SpatialFunction
as_spatial(const DistributionModel& model);

//! the closed-form transform at ctx.c() as a frequency function.
FrequencyFunction
mellin_function(const DistributionModel& model, const MellinContext& ctx);

} // namespace mdecon
