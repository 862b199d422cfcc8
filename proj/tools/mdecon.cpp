#include "mdecon/harness.hpp"
#include "mdecon/quadrature.hpp"
#include "mdecon/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

using namespace mdecon;

namespace {

//! stdout when the path is empty or "-".
void
emit(const std::string& path, const std::string& content)
{
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  out << content;
}

template<typename T>
std::vector<T>
broadcast(const std::vector<T>& v, std::size_t d, const char* what)
{
  if (v.size() == d) {
    return v;
  }
  if (v.size() == 1) {
    return std::vector<T>(d, v[0]);
  }
  throw std::invalid_argument(std::string("--") + what + " needs 1 or " + std::to_string(d) +
                              " entries");
}

struct DataOptions
{
  std::string data;
  std::vector<std::string> noise{ "none()" };
  std::vector<double> c{ 1.0 };
  double step_t{ 0.05 };
  double tol_zero{ 1e-12 };

  void add(CLI::App* app)
  {
    app->add_option("--data", data, "headered CSV of positive observations")->required();
    app->add_option("--noise", noise, "noise model per axis, e.g. uniform()")
      ->delimiter(';')
      ->capture_default_str();
    app->add_option("--c", c, "development point per axis")->delimiter(',')->capture_default_str();
    app->add_option("--step-t", step_t, "frequency quadrature step")->capture_default_str();
    app->add_option("--tol-zero", tol_zero, "smallest admissible |M_c[g]|")
      ->capture_default_str();
  }

  QuadratureConfig quad() const
  {
    QuadratureConfig q;
    q.step_t = step_t;
    q.tol_zero = tol_zero;
    q.validate();
    return q;
  }
};

struct ConfigOptions
{
  std::string config;
  std::string recipe;
  std::optional<std::size_t> n;
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> output;
  std::vector<std::string> target;
  std::vector<std::string> noise;
  std::vector<double> c;
  std::vector<double> k;
  std::optional<std::string> mode;
  std::optional<double> chi1;
  std::optional<double> chi2;
  std::optional<int> grid_cap;
  std::vector<double> exponent;
  std::vector<double> s;
  bool no_spatial{ false };
  bool spatial{ false };
  bool clip{ false };
  bool plot{ false };

  void add(CLI::App* app)
  {
    auto* src = app->add_option("--config", config, "experiment config file (JSON)");
    app->add_option("--recipe", recipe, "start from a figure recipe")->excludes(src);
    app->add_option("--n", n, "sample size");
    app->add_option("--replicates", replicates, "Monte-Carlo replicates");
    app->add_option("--seed", seed, "64-bit seed");
    app->add_option("--threads", threads, "worker threads, 0 for all cores");
    app->add_option("--output", output, "output directory");
    app->add_option("--target", target, "target model per axis")->delimiter(';');
    app->add_option("--noise", noise, "noise model per axis")->delimiter(';');
    app->add_option("--c", c, "development point per axis")->delimiter(',');
    app->add_option("--k", k, "fixed cut-off per axis (implies --mode fixed_k)")->delimiter(',');
    app->add_option("--mode", mode, "fixed_k, adaptive, power or minimax");
    app->add_option("--chi1", chi1, "selection constant chi1");
    app->add_option("--chi2", chi2, "selection constant chi2");
    app->add_option("--grid-cap", grid_cap, "per-axis cap of the selection grid");
    app->add_option("--exponent", exponent, "power mode: k_j = n^exponent_j")->delimiter(',');
    app->add_option("--s", s, "minimax mode: smoothness per axis")->delimiter(',');
    app->add_flag("--spatial-risk", spatial, "also compute the risk by spatial quadrature");
    app->add_flag("--no-spatial-risk", no_spatial, "skip the spatial risk quadrature");
    app->add_flag("--nonneg-clip", clip, "clip estimates at zero before the median curve");
    app->add_flag("--plot", plot, "write a gnuplot script");
  }

  ExperimentConfig resolve() const
  {
    ExperimentConfig cfg;
    if (!config.empty()) {
      cfg = load_config(config);
    } else if (!recipe.empty()) {
      cfg = figure_recipe(recipe);
    }
    if (n) cfg.n = *n;
    if (replicates) cfg.replicates = *replicates;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (output) cfg.output = *output;
    if (!target.empty()) cfg.target = target;
    if (!noise.empty()) cfg.noise = noise;
    if (!c.empty()) cfg.c = c;
    if (mode) cfg.mode.type = parse_cutoff_mode(*mode);
    if (!k.empty()) {
      cfg.mode.k = k;
      if (!mode) cfg.mode.type = CutoffMode::fixed_k;
    }
    if (chi1) {
      cfg.mode.selection.chi1 = *chi1;
      if (!chi2) cfg.mode.selection.chi2 = std::max(cfg.mode.selection.chi2, *chi1);
    }
    if (chi2) cfg.mode.selection.chi2 = *chi2;
    if (grid_cap) cfg.mode.selection.grid_cap = *grid_cap;
    if (!exponent.empty()) cfg.mode.exponent = exponent;
    if (!s.empty()) cfg.mode.s = s;
    if (spatial) cfg.risk.spatial = true;
    if (no_spatial) cfg.risk.spatial = false;
    if (clip) cfg.nonneg_clip = true;
    if (plot) cfg.plot_script = true;
    cfg.validate();
    return cfg;
  }
};

void
print_summary(const RunReport& report)
{
  const auto s = summarize(report.risks());
  std::cerr << report.config.name << ": " << report.replicates.size() << " replicates in "
            << format_double(report.wall_seconds) << " s, risk mean " << format_double(s.mean)
            << ", median " << format_double(s.median) << "\n";
  if (report.config.mode.type == CutoffMode::adaptive) {
    const auto o = summarize(report.column(&ReplicateResult::oracle_risk));
    std::cerr << "  oracle risk median " << format_double(o.median) << "\n";
  }
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Multiplicative deconvolution with spectral cut-off estimators" };
  app.require_subcommand(1);

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "density estimate on a grid from one dataset");
  DataOptions est_data;
  est_data.add(est_cmd);
  std::vector<double> est_k;
  est_cmd->add_option("--k", est_k, "cut-off per axis")->delimiter(',')->required();
  std::string points_file;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<int> npts;
  bool linear = false;
  std::string est_out;
  est_cmd->add_option("--points", points_file, "headered CSV of evaluation points");
  est_cmd->add_option("--lo", lo, "grid lower bound per axis")->delimiter(',');
  est_cmd->add_option("--hi", hi, "grid upper bound per axis")->delimiter(',');
  est_cmd->add_option("--grid-points", npts, "grid size per axis")->delimiter(',');
  est_cmd->add_flag("--linear", linear, "linear instead of log spacing");
  est_cmd->add_option("--out", est_out, "output CSV (default stdout)");

  // select
  auto* sel_cmd = app.add_subcommand("select", "data-driven cut-off with its full trace");
  DataOptions sel_data;
  sel_data.add(sel_cmd);
  SelectionConfig sel_cfg;
  sel_cmd->add_option("--chi1", sel_cfg.chi1)->capture_default_str();
  std::optional<double> sel_chi2;
  sel_cmd->add_option("--chi2", sel_chi2, "defaults to chi1");
  sel_cmd->add_option("--grid-cap", sel_cfg.grid_cap)->capture_default_str();
  std::string sel_out;
  sel_cmd->add_option("--out", sel_out, "output CSV (default stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "seeded Monte-Carlo study");
  ConfigOptions sim_opts;
  sim_opts.add(sim_cmd);

  // rates
  auto* rate_cmd = app.add_subcommand("rates", "risk against sample size with a fitted slope");
  ConfigOptions rate_opts;
  rate_opts.add(rate_cmd);
  std::vector<std::size_t> n_list;
  std::size_t boot = 1000;
  std::string rate_out;
  rate_cmd->add_option("--n-list", n_list, "sample sizes")->delimiter(',')->required();
  rate_cmd->add_option("--bootstrap", boot, "bootstrap resamples")->capture_default_str();
  rate_cmd->add_option("--out", rate_out, "output CSV (default stdout)");

  // transforms
  auto* tr_cmd = app.add_subcommand("transforms", "closed-form against quadrature transforms");
  std::string tr_model;
  double tr_c = 1.0;
  std::vector<double> tr_t{ -5, -2, -1, 0, 1, 2, 5 };
  std::string tr_out;
  tr_cmd->add_option("--model", tr_model, "model spec, e.g. gamma(shape=4,scale=2)")->required();
  tr_cmd->add_option("--c", tr_c)->capture_default_str();
  tr_cmd->add_option("--t", tr_t, "frequencies")->delimiter(',')->capture_default_str();
  tr_cmd->add_option("--out", tr_out, "output CSV (default stdout)");

  // recipe
  auto* rec_cmd = app.add_subcommand("recipe", "print a canned figure configuration");
  std::string rec_name;
  std::string rec_out;
  rec_cmd->add_option("name", rec_name, "fig1, fig2, fig4, fig5 or fig6")->required();
  rec_cmd->add_option("--out", rec_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*est_cmd) {
      const auto y = read_sample_csv(est_data.data);
      const std::size_t d = y.dim();
      const auto noise = DistributionModel::parse(broadcast(est_data.noise, d, "noise"));
      const DensityEstimate est(y,
                                noise,
                                MellinContext(broadcast(est_data.c, d, "c")),
                                CutoffVector(broadcast(est_k, d, "k")),
                                est_data.quad());
      std::string out;
      for (std::size_t j = 0; j < d; ++j) {
        out += "x_" + std::to_string(j + 1) + ",";
      }
      out += "estimate\n";
      if (!points_file.empty()) {
        const auto pts = read_sample_csv(points_file);
        if (pts.dim() != d) {
          throw std::invalid_argument("--points has the wrong number of columns");
        }
        for (std::size_t i = 0; i < pts.n(); ++i) {
          const auto p = pts.row(i);
          for (double v : p) {
            out += format_double(v) + ",";
          }
          out += format_double(est.estimate_at(p)) + "\n";
        }
      } else {
        EvalGridSpec spec;
        spec.log_spaced = !linear;
        spec.points = npts;
        for (std::size_t j = 0; j < d; ++j) {
          spec.lo.push_back(lo.empty() ? empirical_quantile(y, j, 0.001)
                                       : broadcast(lo, d, "lo")[j]);
          spec.hi.push_back(hi.empty() ? empirical_quantile(y, j, 0.999)
                                       : broadcast(hi, d, "hi")[j]);
        }
        const auto axes = spec.resolve(d);
        const auto values = est.estimate_on_tensor(axes);
        std::vector<std::size_t> extents;
        for (const auto& a : axes) {
          extents.push_back(a.size());
        }
        std::size_t flat = 0;
        for_each_index(extents, [&](std::span<const std::size_t> idx) {
          for (std::size_t j = 0; j < d; ++j) {
            out += format_double(axes[j][idx[j]]) + ",";
          }
          out += format_double(values[flat++]) + "\n";
        });
      }
      emit(est_out, out);
    } else if (*sel_cmd) {
      const auto y = read_sample_csv(sel_data.data);
      const std::size_t d = y.dim();
      sel_cfg.chi2 = sel_chi2.value_or(sel_cfg.chi1);
      const auto trace =
        select_cutoff(y,
                      DistributionModel::parse(broadcast(sel_data.noise, d, "noise")),
                      MellinContext(broadcast(sel_data.c, d, "c")),
                      sel_cfg,
                      sel_data.quad());
      std::string k;
      for (double v : trace.k_selected.values()) {
        k += (k.empty() ? "" : ",") + format_double(v);
      }
      std::cerr << "k_hat = (" << k << ") over " << trace.grid.size() << " grid points\n";
      emit(sel_out, selection_trace_csv(trace));
    } else if (*sim_cmd) {
      const auto cfg = sim_opts.resolve();
      const auto report = run_experiment(cfg);
      write_report(report, cfg.output);
      print_summary(report);
    } else if (*rate_cmd) {
      const auto cfg = rate_opts.resolve();
      emit(rate_out, rate_table_csv(rate_study(cfg, n_list, boot)));
    } else if (*tr_cmd) {
      const auto rows = transforms_report(DistributionModel::parse(tr_model), tr_c, tr_t);
      emit(tr_out, transforms_csv(rows));
    } else if (*rec_cmd) {
      emit(rec_out, config_to_text(figure_recipe(rec_name)));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
