#pragma once

#include "mdecon/estimator.hpp"

#include <vector>

namespace mdecon {

struct SelectionConfig
{
  double chi1{ 1.2 };
  double chi2{ 1.2 };
  int grid_cap{ 50 };
  bool nonneg_clip{ false };

  //! requires chi2 >= chi1 > 0 and a positive cap.
  void validate() const;
};

//! Every quantity of one data-driven cut-off choice, aligned with `grid`.
struct SelectionTrace
{
  std::vector<CutoffVector> grid;
  double sigma_hat{ 0.0 };
  std::vector<double> v_hat;
  std::vector<double> a_hat;
  std::vector<double> objective;
  std::size_t selected{ 0 };
  CutoffVector k_selected;
};

//! per-axis upper bounds min(floor(n^{1/(2 gamma_j + 1)}), cap).
std::vector<int>
cutoff_grid_bounds(std::size_t n, std::span<const double> gamma, int cap);

//! the integer lattice 1..bound_j per axis in lexicographic order.
std::vector<CutoffVector>
cutoff_grid(std::size_t n, std::span<const double> gamma, int cap);

//! n^{-1} sum_j prod_i Y_{j,i}^{2 c_i - 2}; exactly 1 when c = 1.
double
sigma_hat(const SampleMatrix& sample, const MellinContext& ctx);

//! 2 sigma_hat Delta_g(k) / n.
double
v_hat(double sigma_hat_value,
      const DistributionModel& noise,
      const MellinContext& ctx,
      const CutoffVector& k,
      std::size_t n,
      const QuadratureConfig& quad);

//! sigma Delta_g(k) / n.
double
v_theoretical(double sigma,
              const DistributionModel& noise,
              const MellinContext& ctx,
              const CutoffVector& k,
              std::size_t n,
              const QuadratureConfig& quad);

//! max over k' in the grid of (||f_hat_k' - f_hat_{k ^ k'}||^2 - chi1 V_hat(k'))_+,
//! with each norm taken in the Mellin domain.
double
a_hat(const SampleMatrix& sample,
      const DistributionModel& noise,
      const MellinContext& ctx,
      const CutoffVector& k,
      const std::vector<CutoffVector>& grid,
      double chi1,
      const QuadratureConfig& quad);

//! index of the first minimum; NaN entries are never selected.
std::size_t
first_argmin(std::span<const double> values);

//! argmin over the grid of A_hat(k) + chi2 V_hat(k), lexicographically
//! smallest on ties.
SelectionTrace
select_cutoff(const SampleMatrix& sample,
              const DistributionModel& noise,
              const MellinContext& ctx,
              const SelectionConfig& config,
              const QuadratureConfig& quad);

//! the same selection using a prebuilt table whose bounds define the grid.
SelectionTrace
select_cutoff(const CuboidTable& table,
              const SampleMatrix& sample,
              const MellinContext& ctx,
              const SelectionConfig& config);

} // namespace mdecon
