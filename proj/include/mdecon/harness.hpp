#pragma once

#include "mdecon/estimator.hpp"
#include "mdecon/selection.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mdecon {

//! How each replicate chooses its cut-off.
enum class CutoffMode
{
  fixed_k,  //!< k as given
  adaptive, //!< data-driven k_hat over the integer grid
  power,    //!< k_j = scale * n^{exponent_j}
  minimax   //!< the rate-optimal schedule for smoothness s and the noise decay
};

std::string
to_string(CutoffMode mode);

CutoffMode
parse_cutoff_mode(std::string_view name);

struct ModeSpec
{
  CutoffMode type{ CutoffMode::fixed_k };
  std::vector<double> k{ 4.0 };
  SelectionConfig selection{};
  double scale{ 1.0 };
  std::vector<double> exponent{};
  std::vector<double> s{};

  //! the cut-off a non-adaptive mode uses at sample size n.
  CutoffVector cutoff(std::size_t n, std::size_t dim, const DistributionModel& noise) const;
};

//! Evaluation grid for estimates and median curves. Empty bounds are taken
//! from the target's 0.1% and 99.9% quantiles.
struct EvalGridSpec
{
  std::vector<double> lo{};
  std::vector<double> hi{};
  std::vector<int> points{};
  bool log_spaced{ true };

  std::vector<std::vector<double>> resolve(const DistributionModel& target) const;
  //! the same with explicit bounds only.
  std::vector<std::vector<double>> resolve(std::size_t dim) const;
};

//! Spatial risk quadrature on a log grid centred at the target median.
struct RiskSpec
{
  bool spatial{ true };
  double half_decades{ 12.0 };
  double points_per_decade{ 40.0 };
  //! extra resolution per unit cut-off, since estimates oscillate at rate k.
  double points_per_unit_k{ 8.0 };
};

struct ExperimentConfig
{
  std::string name{ "experiment" };
  std::vector<std::string> target{ "gamma(shape=4,scale=2)" };
  std::vector<std::string> noise{ "uniform()" };
  std::vector<double> c{ 1.0 };
  std::size_t n{ 1000 };
  std::size_t replicates{ 50 };
  std::uint64_t seed{ 1 };
  ModeSpec mode{};
  EvalGridSpec eval_grid{};
  QuadratureConfig quad{};
  RiskSpec risk{};
  bool nonneg_clip{ false };
  unsigned threads{ 0 };
  std::string output{ "out" };
  bool plot_script{ false };

  //! the longest of the per-axis lists; single entries are broadcast.
  std::size_t dim() const { return std::max({ c.size(), target.size(), noise.size() }); }
  std::vector<double> c_values() const;
  DistributionModel target_model() const;
  DistributionModel noise_model() const;
  void validate() const;

  bool operator==(const ExperimentConfig& other) const;
};

//! Config file text (JSON) and back; unknown keys are rejected.
std::string
config_to_text(const ExperimentConfig& config);

ExperimentConfig
config_from_text(std::string_view text);

ExperimentConfig
load_config(const std::filesystem::path& path);

struct RiskSummary
{
  double mean{ 0.0 };
  double sd{ 0.0 };
  double se{ 0.0 };
  double min{ 0.0 };
  double q25{ 0.0 };
  double median{ 0.0 };
  double q75{ 0.0 };
  double max{ 0.0 };
};

RiskSummary
summarize(std::vector<double> values);

struct ReplicateResult
{
  std::size_t replicate{ 0 };
  CutoffVector k;
  //! ||f - f_hat||^2 by Plancherel on the frequency nodes.
  double risk{ 0.0 };
  //! the same norm by spatial quadrature; NaN when disabled.
  double spatial_risk{ 0.0 };
  std::vector<double> values;
  // adaptive mode only
  std::optional<SelectionTrace> trace;
  double risk_at_min{ 0.0 };
  double risk_at_max{ 0.0 };
  double oracle_risk{ 0.0 };
  CutoffVector oracle_k;
};

struct RunReport
{
  ExperimentConfig config;
  std::vector<std::vector<double>> eval_axes;
  std::vector<double> truth;
  std::vector<ReplicateResult> replicates;
  std::vector<double> median_curve;
  std::vector<double> q25_curve;
  std::vector<double> q75_curve;
  double wall_seconds{ 0.0 };
  unsigned threads_used{ 1 };

  std::vector<double> risks() const;
  std::vector<double> column(double ReplicateResult::*field) const;
};

//! Seeded Monte-Carlo study: replicate r draws X from stream (seed, r, 0) and
//! U from (seed, r, 1). Results do not depend on the thread count.
RunReport
run_experiment(const ExperimentConfig& config);

//! Writes risks.csv, summary.csv, median_curve.csv, selection_traces.csv
//! (adaptive), manifest.json and optionally plot.gp into `dir`.
void
write_report(const RunReport& report, const std::filesystem::path& dir);

struct RateRow
{
  std::size_t n{ 0 };
  double mean_risk{ 0.0 };
  double median_risk{ 0.0 };
  double se{ 0.0 };
};

struct RateTable
{
  std::vector<RateRow> rows;
  double slope{ 0.0 };
  double slope_lo{ 0.0 };
  double slope_hi{ 0.0 };
  std::size_t bootstrap{ 0 };
};

//! Runs the design at each n and fits log(mean risk) = a + b log(n) by least
//! squares, with a percentile bootstrap interval over replicates.
RateTable
rate_study(const ExperimentConfig& config,
           const std::vector<std::size_t>& n_list,
           std::size_t bootstrap = 1000,
           double level = 0.95);

std::string
rate_table_csv(const RateTable& table);

struct TransformRow
{
  double t{ 0.0 };
  cplx closed_form;
  cplx quadrature;
  double abs_diff{ 0.0 };
};

//! default spatial settings for transforms_report.
QuadratureConfig
report_quadrature();

std::vector<TransformRow>
transforms_report(const DistributionModel& model,
                  double c,
                  const std::vector<double>& t_list,
                  const QuadratureConfig& quad = report_quadrature());

std::string
transforms_csv(const std::vector<TransformRow>& rows);

//! Canned configurations for fig1, fig2, fig4, fig5 and fig6.
ExperimentConfig
figure_recipe(std::string_view name);

//! headered CSV of positive reals, one observation per row.
SampleMatrix
read_sample_csv(const std::filesystem::path& path);

std::string
selection_trace_csv(const SelectionTrace& trace, std::optional<std::size_t> replicate = {});

//! SHA-1 of "blob <size>\0<content>", as git names file contents.
std::string
git_blob_hash(std::string_view content);

} // namespace mdecon
