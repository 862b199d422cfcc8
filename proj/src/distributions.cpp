#include "mdecon/distributions.hpp"
#include "mdecon/text.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mdecon {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double inf = std::numeric_limits<double>::infinity();

void
require(bool ok, const std::string& msg)
{
  if (!ok) {
    throw std::invalid_argument(msg);
  }
}

std::string
kv(const char* key, double v)
{
  return std::string(key) + "=" + format_double(v);
}

using Params = std::map<std::string, double>;

double
take(Params& p, const char* key, double fallback)
{
  auto it = p.find(key);
  if (it == p.end()) {
    return fallback;
  }
  const double v = it->second;
  p.erase(it);
  return v;
}

} // namespace

Univariate::Univariate(Family family)
  : family_(std::move(family))
{
  std::visit(overloaded{
               [](const Beta1b& f) { require(f.b >= 1, "beta: b must be a positive integer"); },
               [](const ScaledLogGamma& f) {
                 require(std::isfinite(f.mu), "slgamma: mu must be finite");
                 require(f.a > 0 && std::isfinite(f.a), "slgamma: a must be positive");
                 require(f.lambda > 0 && std::isfinite(f.lambda),
                         "slgamma: lambda must be positive");
               },
               [](const GammaDist& f) {
                 require(f.shape > 0 && std::isfinite(f.shape), "gamma: shape must be positive");
                 require(f.scale > 0 && std::isfinite(f.scale), "gamma: scale must be positive");
               },
               [](const Weibull& f) {
                 require(f.m > 0 && std::isfinite(f.m), "weibull: m must be positive");
               },
               [](const LogNormal& f) {
                 require(std::isfinite(f.mu), "lognormal: mu must be finite");
                 require(f.lambda > 0 && std::isfinite(f.lambda),
                         "lognormal: lambda must be positive");
               },
               [](const ScaledBeta& f) {
                 require(f.p > 0 && f.q > 0 && std::isfinite(f.p) && std::isfinite(f.q),
                         "sbeta: p and q must be positive");
                 require(f.scale > 0 && std::isfinite(f.scale), "sbeta: scale must be positive");
               },
               [](const NoNoise&) {} },
             family_);
}

double
Univariate::density(double x) const
{
  if (!(x > 0.0)) {
    return 0.0;
  }
  return std::visit(
    overloaded{
      [x](const Beta1b& f) {
        return x <= 1.0 ? f.b * std::pow(1.0 - x, f.b - 1) : 0.0;
      },
      [x](const ScaledLogGamma& f) {
        const double lx = std::log(x);
        if (lx < f.mu) {
          return 0.0;
        }
        if (lx == f.mu) {
          // the log-Gamma density is singular at the edge for a < 1
          return f.a == 1.0 ? f.lambda * std::exp(-lx) : 0.0;
        }
        return std::exp(f.a * std::log(f.lambda) - std::lgamma(f.a) -
                        f.lambda * (lx - f.mu) - lx +
                        (f.a - 1.0) * std::log(lx - f.mu));
      },
      [x](const GammaDist& f) {
        return std::exp((f.shape - 1.0) * std::log(x) - x / f.scale -
                        std::lgamma(f.shape) - f.shape * std::log(f.scale));
      },
      [x](const Weibull& f) {
        return f.m * std::pow(x, f.m - 1.0) * std::exp(-std::pow(x, f.m));
      },
      [x](const LogNormal& f) {
        const double z = (std::log(x) - f.mu) / f.lambda;
        return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * f.lambda * x);
      },
      [x](const ScaledBeta& f) {
        const double z = x / f.scale;
        if (z > 1.0) {
          return 0.0;
        }
        return std::pow(z, f.p - 1.0) * std::pow(1.0 - z, f.q - 1.0) /
               (boost::math::beta(f.p, f.q) * f.scale);
      },
      [](const NoNoise&) -> double {
        throw std::logic_error("none(): the degenerate noise has no density");
      } },
    family_);
}

double
Univariate::cdf(double x) const
{
  if (!(x > 0.0)) {
    return 0.0;
  }
  return std::visit(
    overloaded{
      [x](const Beta1b& f) { return x >= 1.0 ? 1.0 : 1.0 - std::pow(1.0 - x, f.b); },
      [x](const ScaledLogGamma& f) {
        const double z = std::log(x) - f.mu;
        return z <= 0.0 ? 0.0 : boost::math::gamma_p(f.a, f.lambda * z);
      },
      [x](const GammaDist& f) { return boost::math::gamma_p(f.shape, x / f.scale); },
      [x](const Weibull& f) { return -std::expm1(-std::pow(x, f.m)); },
      [x](const LogNormal& f) {
        return 0.5 * std::erfc(-(std::log(x) - f.mu) / (f.lambda * std::sqrt(2.0)));
      },
      [x](const ScaledBeta& f) {
        const double z = x / f.scale;
        return z >= 1.0 ? 1.0 : boost::math::ibeta(f.p, f.q, z);
      },
      [x](const NoNoise&) { return x >= 1.0 ? 1.0 : 0.0; } },
    family_);
}

Interval
Univariate::support() const
{
  return std::visit(overloaded{ [](const Beta1b&) { return Interval{ 0.0, 1.0 }; },
                                [](const ScaledLogGamma& f) {
                                  return Interval{ std::exp(f.mu), inf };
                                },
                                [](const ScaledBeta& f) { return Interval{ 0.0, f.scale }; },
                                [](const NoNoise&) { return Interval{ 1.0, 1.0 }; },
                                [](const auto&) { return Interval{ 0.0, inf }; } },
                    family_);
}

double
Univariate::quantile(double p) const
{
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile: probability must lie in (0, 1)");
  }
  if (is_degenerate()) {
    return 1.0;
  }
  const auto s = support();
  // bisection in log(x); bracket expanded on unbounded sides
  double lo = s.lo > 0.0 ? std::log(s.lo) : -1.0;
  double hi = std::isfinite(s.hi) ? std::log(s.hi) : 1.0;
  if (!(s.lo > 0.0)) {
    while (cdf(std::exp(lo)) > p && lo > -700.0) {
      lo -= 2.0;
    }
  }
  if (!std::isfinite(s.hi)) {
    while (cdf(std::exp(hi)) < p && hi < 700.0) {
      hi += 2.0;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(std::exp(mid)) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

bool
Univariate::mellin_valid(double c) const
{
  return std::visit(overloaded{ [c](const Beta1b&) { return c > 0.0; },
                                [c](const ScaledLogGamma& f) { return c < f.lambda + 1.0; },
                                [c](const GammaDist& f) { return c > 1.0 - f.shape; },
                                [c](const Weibull& f) { return c > 1.0 - f.m; },
                                [c](const LogNormal&) { return std::isfinite(c); },
                                [c](const ScaledBeta& f) { return c > 1.0 - f.p; },
                                [c](const NoNoise&) { return std::isfinite(c); } },
                    family_);
}

std::string
Univariate::validity_window() const
{
  return std::visit(
    overloaded{ [](const Beta1b&) { return std::string("c > 0"); },
                [](const ScaledLogGamma& f) { return "c < lambda + 1 = " + format_double(f.lambda + 1); },
                [](const GammaDist& f) { return "c > 1 - shape = " + format_double(1 - f.shape); },
                [](const Weibull& f) { return "c > 1 - m = " + format_double(1 - f.m); },
                [](const ScaledBeta& f) { return "c > 1 - p = " + format_double(1 - f.p); },
                [](const auto&) { return std::string("c finite"); } },
    family_);
}

cplx
Univariate::mellin(double c, double t) const
{
  if (!mellin_valid(c)) {
    throw std::domain_error(str() + ": Mellin transform requires " + validity_window() +
                            ", got c = " + format_double(c));
  }
  const cplx s(c - 1.0, t);
  return std::visit(
    overloaded{
      [&](const Beta1b& f) {
        cplx r = 1.0;
        for (int j = 1; j <= f.b; ++j) {
          r *= static_cast<double>(j) / (s + static_cast<double>(j));
        }
        return r;
      },
      [&](const ScaledLogGamma& f) {
        return std::exp(f.a * std::log(f.lambda) + f.mu * s -
                        f.a * std::log(cplx(f.lambda) - s));
      },
      [&](const GammaDist& f) {
        return std::exp(s * std::log(f.scale) + lgamma_complex(f.shape + s) -
                        std::lgamma(f.shape));
      },
      [&](const Weibull& f) { return std::exp(lgamma_complex(1.0 + s / f.m)); },
      [&](const LogNormal& f) {
        return std::exp(f.mu * s + 0.5 * f.lambda * f.lambda * s * s);
      },
      [&](const ScaledBeta& f) {
        return std::exp(s * std::log(f.scale) + lgamma_complex(f.p + s) -
                        lgamma_complex(f.p + f.q + s) + std::lgamma(f.p + f.q) -
                        std::lgamma(f.p));
      },
      [](const NoNoise&) { return cplx(1.0, 0.0); } },
    family_);
}

double
Univariate::draw(Rng& rng) const
{
  return std::visit(
    overloaded{
      [&](const Beta1b& f) {
        const double v = rng.uniform();
        return 1.0 - std::pow(1.0 - v, 1.0 / f.b);
      },
      [&](const ScaledLogGamma& f) {
        const double g = f.a == 1.0 ? -std::log(rng.uniform()) : rng.gamma(f.a);
        return std::exp(f.mu + g / f.lambda);
      },
      [&](const GammaDist& f) { return f.scale * rng.gamma(f.shape); },
      [&](const Weibull& f) {
        return std::pow(-std::log(1.0 - rng.uniform()), 1.0 / f.m);
      },
      [&](const LogNormal& f) { return std::exp(f.mu + f.lambda * rng.normal()); },
      [&](const ScaledBeta& f) {
        const double g1 = rng.gamma(f.p);
        const double g2 = rng.gamma(f.q);
        return f.scale * g1 / (g1 + g2);
      },
      [](const NoNoise&) { return 1.0; } },
    family_);
}

DecayClass
Univariate::decay_class() const
{
  return std::visit(overloaded{ [](const GammaDist&) { return DecayClass::super_smooth; },
                                [](const Weibull&) { return DecayClass::super_smooth; },
                                [](const LogNormal&) { return DecayClass::super_smooth; },
                                [](const auto&) { return DecayClass::smooth; } },
                    family_);
}

double
Univariate::decay_exponent() const
{
  return std::visit(
    overloaded{ [](const Beta1b& f) { return static_cast<double>(f.b); },
                [](const ScaledLogGamma& f) { return f.a; },
                [](const ScaledBeta& f) { return f.q; },
                [](const NoNoise&) { return 0.0; },
                [this](const auto&) -> double {
                  throw std::logic_error(str() + " is super smooth: no polynomial decay exponent");
                } },
    family_);
}

std::string
Univariate::str() const
{
  return std::visit(
    overloaded{
      [](const Beta1b& f) {
        return f.b == 1 ? std::string("uniform()") : "beta(b=" + std::to_string(f.b) + ")";
      },
      [](const ScaledLogGamma& f) {
        return "slgamma(" + kv("mu", f.mu) + "," + kv("a", f.a) + "," + kv("lambda", f.lambda) +
               ")";
      },
      [](const GammaDist& f) {
        return "gamma(" + kv("shape", f.shape) + "," + kv("scale", f.scale) + ")";
      },
      [](const Weibull& f) { return "weibull(" + kv("m", f.m) + ")"; },
      [](const LogNormal& f) {
        return "lognormal(" + kv("mu", f.mu) + "," + kv("lambda", f.lambda) + ")";
      },
      [](const ScaledBeta& f) {
        return "sbeta(" + kv("p", f.p) + "," + kv("q", f.q) + "," + kv("scale", f.scale) + ")";
      },
      [](const NoNoise&) { return std::string("none()"); } },
    family_);
}

Univariate
Univariate::parse(std::string_view spec)
{
  const auto text = trim(spec);
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw std::invalid_argument("model spec must look like family(param=value,...): '" +
                                std::string(text) + "'");
  }
  const std::string name(trim(text.substr(0, open)));
  const auto body = text.substr(open + 1, text.size() - open - 2);
  Params params;
  if (!trim(body).empty()) {
    for (const auto& item : split(body, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("model spec parameter needs key=value: '" + item + "'");
      }
      const std::string key(trim(std::string_view(item).substr(0, eq)));
      if (params.count(key)) {
        throw std::invalid_argument("duplicate parameter '" + key + "' in '" +
                                    std::string(text) + "'");
      }
      params[key] = parse_double(std::string_view(item).substr(eq + 1));
    }
  }

  Family family;
  if (name == "uniform") {
    family = Beta1b{ 1 };
  } else if (name == "beta") {
    const double b = take(params, "b", 1.0);
    if (b != std::floor(b)) {
      throw std::invalid_argument("beta: b must be an integer");
    }
    family = Beta1b{ static_cast<int>(b) };
  } else if (name == "slgamma") {
    family = ScaledLogGamma{ take(params, "mu", 0.0), take(params, "a", 1.0),
                             take(params, "lambda", 1.0) };
  } else if (name == "pareto") {
    family = ScaledLogGamma{ take(params, "mu", 0.0), 1.0, take(params, "lambda", 1.0) };
  } else if (name == "loggamma") {
    family = ScaledLogGamma{ 0.0, take(params, "a", 1.0), take(params, "lambda", 1.0) };
  } else if (name == "gamma") {
    family = GammaDist{ take(params, "shape", 1.0), take(params, "scale", 1.0) };
  } else if (name == "weibull") {
    family = Weibull{ take(params, "m", 1.0) };
  } else if (name == "lognormal") {
    family = LogNormal{ take(params, "mu", 0.0), take(params, "lambda", 1.0) };
  } else if (name == "sbeta") {
    family = ScaledBeta{ take(params, "p", 1.0), take(params, "q", 1.0),
                         take(params, "scale", 1.0) };
  } else if (name == "none") {
    family = NoNoise{};
  } else {
    throw std::invalid_argument("unknown model family '" + name + "'");
  }
  if (!params.empty()) {
    throw std::invalid_argument("unknown parameter '" + params.begin()->first + "' for " + name);
  }
  return Univariate(family);
}

DistributionModel::DistributionModel(std::vector<Univariate> axes)
  : axes_(std::move(axes))
{
  if (axes_.empty()) {
    throw std::invalid_argument("distribution model needs at least one axis");
  }
}

DistributionModel
DistributionModel::parse(const std::vector<std::string>& specs)
{
  std::vector<Univariate> axes;
  for (const auto& s : specs) {
    axes.push_back(Univariate::parse(s));
  }
  return DistributionModel(std::move(axes));
}

DistributionModel
DistributionModel::parse(std::string_view spec)
{
  return DistributionModel(Univariate::parse(spec));
}

std::vector<std::string>
DistributionModel::specs() const
{
  std::vector<std::string> out;
  for (const auto& a : axes_) {
    out.push_back(a.str());
  }
  return out;
}

std::string
DistributionModel::str() const
{
  std::string out;
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    out += (j ? " x " : "") + axes_[j].str();
  }
  return out;
}

bool
DistributionModel::is_degenerate() const
{
  for (const auto& a : axes_) {
    if (!a.is_degenerate()) {
      return false;
    }
  }
  return true;
}

DistributionModel
DistributionModel::broadcast(std::size_t dim) const
{
  if (axes_.size() == dim) {
    return *this;
  }
  if (axes_.size() != 1) {
    throw std::invalid_argument("cannot broadcast a " + std::to_string(axes_.size()) +
                                "-axis model to " + std::to_string(dim) + " axes");
  }
  return DistributionModel(std::vector<Univariate>(dim, axes_[0]));
}

const std::vector<double>&
DecayProfile::gamma() const
{
  if (cls == DecayClass::super_smooth) {
    throw std::logic_error(
      "super smooth noise has no [G1] decay exponents; the cut-off grid is undefined");
  }
  return exponents;
}

double
density(const DistributionModel& model, std::span<const double> x)
{
  if (x.size() != model.dim()) {
    throw std::invalid_argument("density: dimension mismatch");
  }
  double v = 1.0;
  for (std::size_t j = 0; j < x.size() && v != 0.0; ++j) {
    v *= model.axis(j).density(x[j]);
  }
  return v;
}

cplx
mellin_closed_form(const Univariate& model, double c, double t)
{
  return model.mellin(c, t);
}

cplx
mellin_closed_form(const DistributionModel& model,
                   std::span<const double> c,
                   std::span<const double> t)
{
  if (c.size() != model.dim() || t.size() != model.dim()) {
    throw std::invalid_argument("mellin_closed_form: dimension mismatch");
  }
  cplx v = 1.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    v *= model.axis(j).mellin(c[j], t[j]);
  }
  return v;
}

SampleMatrix
sample(const DistributionModel& model, std::size_t n, StreamKey key)
{
  if (n < 1) {
    throw std::invalid_argument("sample: n must be at least 1");
  }
  Rng rng(key);
  std::vector<double> data(n * model.dim());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < model.dim(); ++j) {
      data[i * model.dim() + j] = model.axis(j).draw(rng);
    }
  }
  return SampleMatrix(n, model.dim(), std::move(data));
}

SampleMatrix
sample(const DistributionModel& model, std::size_t n, std::uint64_t seed)
{
  return sample(model, n, StreamKey{ seed, 0, 0 });
}

DecayProfile
decay_profile(const DistributionModel& model)
{
  DecayProfile p;
  for (const auto& a : model.axes()) {
    if (a.decay_class() == DecayClass::super_smooth) {
      p.cls = DecayClass::super_smooth;
      p.exponents.clear();
      return p;
    }
    p.exponents.push_back(a.decay_exponent());
  }
  return p;
}

double
moment(const DistributionModel& model, std::span<const double> exponent)
{
  if (exponent.size() != model.dim()) {
    throw std::invalid_argument("moment: dimension mismatch");
  }
  double v = 1.0;
  for (std::size_t j = 0; j < exponent.size(); ++j) {
    v *= model.axis(j).mellin(exponent[j] + 1.0, 0.0).real();
  }
  return v;
}

SpatialFunction
as_spatial(const DistributionModel& model)
{
  SpatialFunction f;
  f.dim = model.dim();
  for (const auto& a : model.axes()) {
    f.support.push_back(a.support());
  }
  f.eval = [model](std::span<const double> x) { return density(model, x); };
  return f;
}

FrequencyFunction
mellin_function(const DistributionModel& model, const MellinContext& ctx)
{
  if (ctx.dim() != model.dim()) {
    throw std::invalid_argument("mellin_function: dimension mismatch");
  }
  for (std::size_t j = 0; j < ctx.dim(); ++j) {
    model.axis(j).mellin(ctx.c(j), 0.0); // window check up front
  }
  FrequencyFunction H;
  H.conjugate_symmetric = true;
  H.eval = [model, c = ctx.c()](std::span<const double> t) {
    return mellin_closed_form(model, c, t);
  };
  return H;
}

} // namespace mdecon
