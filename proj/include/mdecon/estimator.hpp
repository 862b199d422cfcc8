#pragma once

#include "mdecon/distributions.hpp"
#include "mdecon/mellin.hpp"
#include "mdecon/sample.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace mdecon {

//! n^{-1} sum_j prod_i Y_{j,i}^{c_i - 1 + i t_i}.
cplx
empirical_mellin(const SampleMatrix& sample, const MellinContext& ctx, std::span<const double> t);

//! (2 pi)^{-d} int_{Q_k} |M_c[g](t)|^{-2} dt; throws std::domain_error naming
//! the node when |M_c[g]| falls below quad.tol_zero.
double
delta_g(const DistributionModel& noise,
        const MellinContext& ctx,
        const CutoffVector& k,
        const QuadratureConfig& quad);

//! int f(x)^2 x^{2c-1} dx for a tensor-product model, one axis at a time.
double
target_norm_sq(const DistributionModel& target, const MellinContext& ctx);

//! Spectral cut-off estimate of the target density from a contaminated
//! sample. The ratio of empirical and noise transforms is cached on all
//! frequency nodes of Q_k at construction, so evaluation is a contraction
//! against per-axis phase vectors.
class DensityEstimate
{
public:
  using NodeMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DensityEstimate(SampleMatrix sample,
                  DistributionModel noise,
                  MellinContext ctx,
                  CutoffVector k,
                  QuadratureConfig quad);

  //! the cut-off approximation f_k obtained by replacing the empirical
  //! transform with the exact transform of the observation density.
  static DensityEstimate from_transform(const FrequencyFunction& observation_transform,
                                        DistributionModel noise,
                                        MellinContext ctx,
                                        CutoffVector k,
                                        QuadratureConfig quad);

  double estimate_at(std::span<const double> x) const;
  //! value and imaginary residue of the inverse integral.
  InverseValue evaluate(std::span<const double> x) const;
  std::vector<double> estimate_on_grid(const std::vector<std::vector<double>>& points) const;
  //! values on the tensor grid axes[0] x ... x axes[d-1], last axis fastest.
  std::vector<double> estimate_on_tensor(const std::vector<std::vector<double>>& axes) const;

  //! ||f - f_hat||^2 in the weighted norm, by Plancherel on the cached nodes.
  double spectral_risk(const DistributionModel& target) const;

  const SampleMatrix& sample() const { return sample_; }
  const DistributionModel& noise() const { return noise_; }
  const MellinContext& ctx() const { return ctx_; }
  const CutoffVector& k() const { return k_; }
  const QuadratureConfig& quad() const { return quad_; }
  const std::vector<FrequencyAxis>& axes() const { return axes_; }
  //! M_hat / M_g on the nodes: rows are first-axis nodes, columns the
  //! remaining axes flattened with the last axis fastest.
  const NodeMatrix& ratio() const { return ratio_; }

private:
  DensityEstimate(SampleMatrix sample,
                  DistributionModel noise,
                  MellinContext ctx,
                  CutoffVector k,
                  QuadratureConfig quad,
                  NodeMatrix ratio);
  void finish();

  SampleMatrix sample_;
  DistributionModel noise_;
  MellinContext ctx_;
  CutoffVector k_;
  QuadratureConfig quad_;
  std::vector<FrequencyAxis> axes_;
  NodeMatrix ratio_;
  NodeMatrix weighted_; // ratio times the tensor Simpson weight
};

struct RiskDecomposition
{
  double bias_sq{ 0.0 };
  double variance_bound{ 0.0 };
  double sigma{ 0.0 };

  double total() const { return bias_sq + variance_bound; }
};

//! bias ||f - f_k||^2 and variance bound sigma Delta_g(k) / n. The bias is the
//! transform mass between Q_k and Q_{k_max}.
RiskDecomposition
theoretical_risk(const DistributionModel& target,
                 const DistributionModel& noise,
                 const MellinContext& ctx,
                 const CutoffVector& k,
                 std::size_t n,
                 const QuadratureConfig& quad,
                 double k_max = 200.0);

//! E[Y^{2c-2}] for Y = X U, from closed-form moments.
double
sigma_theoretical(const DistributionModel& target,
                  const DistributionModel& noise,
                  const MellinContext& ctx);

//! k_i = n^{1 / (2 s_i + s_i sum_j (2 gamma_j + 1) / s_j)}.
CutoffVector
minimax_cutoff_schedule(std::span<const double> s, std::span<const double> gamma, double n);

//! Integrals of |M_hat / M_g|^2 over every integer cuboid Q_k with
//! 1 <= k_j <= bounds_j, built from one pass over the nodes of Q_bounds.
//! Each cuboid integral is a sum of unit-block contributions, so nested
//! cuboids share their terms and Q_k \ Q_k contributes exactly zero.
class CuboidTable
{
public:
  CuboidTable(const SampleMatrix& sample,
              const DistributionModel& noise,
              const MellinContext& ctx,
              std::vector<int> bounds,
              const QuadratureConfig& quad,
              const std::optional<DistributionModel>& target = std::nullopt);

  std::size_t dim() const { return bounds_.size(); }
  const std::vector<int>& bounds() const { return bounds_; }

  //! (2 pi)^{-d} int_{Q_k} |M_hat / M_g|^2.
  double norm_sq(std::span<const int> k) const;
  //! the same integral over Q_outer \ Q_{outer ^ inner}; never negative.
  double set_difference(std::span<const int> outer, std::span<const int> inner) const;
  //! Delta_g(k) on the same lattice.
  double delta(std::span<const int> k) const;

  bool has_target() const { return target_norm_.has_value(); }
  //! spectral risk ||f - f_hat_k||^2 against the target given at construction.
  double risk(std::span<const int> k) const;

private:
  std::size_t offset(std::span<const int> k) const;

  std::vector<int> bounds_;
  double scale_{ 1.0 }; // (2 pi)^{-d}
  std::vector<double> cum_ratio_;
  std::vector<double> cum_error_;
  std::vector<std::vector<double>> cum_delta_; // per axis
  std::optional<double> target_norm_;
};

} // namespace mdecon
