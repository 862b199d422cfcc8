#include "mdecon/harness.hpp"
#include "mdecon/quadrature.hpp"
#include "mdecon/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mdecon {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

//! type 7 quantile of sorted values.
double
sorted_quantile(const std::vector<double>& v, double p)
{
  if (v.empty()) {
    return nan_v;
  }
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<int>
as_ints(const CutoffVector& k)
{
  std::vector<int> out;
  for (double v : k.values()) {
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double>
linspace(double lo, double hi, int points, bool log_spaced)
{
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = log_spaced ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    return out;
  }
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    out[i] = log_spaced ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                        : lo + f * (hi - lo);
  }
  // exact end points regardless of rounding in exp/log
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double>
density_on_tensor(const DistributionModel& model, const std::vector<std::vector<double>>& axes)
{
  std::vector<std::vector<double>> per_axis;
  std::vector<std::size_t> extents;
  for (std::size_t j = 0; j < axes.size(); ++j) {
    std::vector<double> v;
    for (double x : axes[j]) {
      v.push_back(model.axis(j).density(x));
    }
    per_axis.push_back(std::move(v));
    extents.push_back(axes[j].size());
  }
  std::vector<double> out;
  for_each_index(extents, [&](std::span<const std::size_t> idx) {
    double p = 1.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      p *= per_axis[j][idx[j]];
    }
    out.push_back(p);
  });
  return out;
}

//! ||f - f_hat||^2 by Simpson quadrature on a wide log grid. The grid stays
//! inside |log x - log m| < pi / h, where the discretised inverse repeats.
double
spatial_risk(const DensityEstimate& est,
             const DistributionModel& target,
             const RiskSpec& spec,
             bool clip)
{
  const std::size_t d = est.ctx().dim();
  std::vector<LogAxis> axes;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> w;
  for (std::size_t j = 0; j < d; ++j) {
    const double centre = std::log10(target.axis(j).quantile(0.5));
    const double image = std::numbers::pi / (est.axes()[j].h * std::numbers::ln10);
    const double half = std::min(spec.half_decades, 0.9 * image);
    const double ppd =
      std::max(spec.points_per_decade, spec.points_per_unit_k * est.k()[j]);
    auto axis = LogAxis::make(std::pow(10.0, centre - half), std::pow(10.0, centre + half), ppd);
    auto wj = axis.weights();
    auto xj = axis.nodes();
    const double e = 2.0 * est.ctx().c(j) - 1.0;
    for (std::size_t i = 0; i < xj.size(); ++i) {
      wj[i] *= std::pow(xj[i], e);
    }
    x.push_back(std::move(xj));
    w.push_back(std::move(wj));
  }
  // rows of the first axis in blocks to bound memory in d >= 2
  const std::size_t block = d == 1 ? x[0].size() : 64;
  double total = 0.0;
  for (std::size_t start = 0; start < x[0].size(); start += block) {
    const std::size_t stop = std::min(x[0].size(), start + block);
    auto sub = x;
    sub[0].assign(x[0].begin() + start, x[0].begin() + stop);
    const auto values = est.estimate_on_tensor(sub);
    const auto truth = density_on_tensor(target, sub);
    std::vector<std::size_t> extents;
    for (const auto& a : sub) {
      extents.push_back(a.size());
    }
    std::size_t flat = 0;
    for_each_index(extents, [&](std::span<const std::size_t> idx) {
      double weight = w[0][start + idx[0]];
      for (std::size_t j = 1; j < d; ++j) {
        weight *= w[j][idx[j]];
      }
      const double v = clip ? std::max(values[flat], 0.0) : values[flat];
      const double diff = v - truth[flat];
      total += weight * diff * diff;
      ++flat;
    });
  }
  return total;
}

ReplicateResult
run_replicate(const ExperimentConfig& config,
              const DistributionModel& target,
              const DistributionModel& noise,
              const MellinContext& ctx,
              const std::vector<std::vector<double>>& eval_axes,
              std::size_t r)
{
  ReplicateResult out;
  out.replicate = r;
  const auto x = sample(target, config.n, StreamKey{ config.seed, r, 0 });
  const auto u = sample(noise, config.n, StreamKey{ config.seed, r, 1 });
  const auto y = contaminate(x, u);

  if (config.mode.type == CutoffMode::adaptive) {
    const auto& sel = config.mode.selection;
    const auto bounds = cutoff_grid_bounds(y.n(), decay_profile(noise).gamma(), sel.grid_cap);
    const CuboidTable table(y, noise, ctx, bounds, config.quad, target);
    auto trace = select_cutoff(table, y, ctx, sel);
    out.k = trace.k_selected;
    out.risk = table.risk(as_ints(out.k));
    out.risk_at_min = table.risk(std::vector<int>(bounds.size(), 1));
    out.risk_at_max = table.risk(bounds);
    out.oracle_risk = std::numeric_limits<double>::infinity();
    for (const auto& k : trace.grid) {
      const double v = table.risk(as_ints(k));
      if (v < out.oracle_risk) {
        out.oracle_risk = v;
        out.oracle_k = k;
      }
    }
    out.trace = std::move(trace);
  } else {
    out.k = config.mode.cutoff(config.n, ctx.dim(), noise);
  }

  const DensityEstimate est(y, noise, ctx, out.k, config.quad);
  if (config.mode.type != CutoffMode::adaptive) {
    out.risk = est.spectral_risk(target);
  }
  out.spatial_risk = config.risk.spatial ? spatial_risk(est, target, config.risk, config.nonneg_clip)
                                         : nan_v;
  out.values = est.estimate_on_tensor(eval_axes);
  if (config.nonneg_clip) {
    for (double& v : out.values) {
      v = std::max(v, 0.0);
    }
  }
  return out;
}

std::string
csv_row(const std::vector<std::string>& cells)
{
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    line += (i ? "," : "") + cells[i];
  }
  return line + "\n";
}

std::vector<std::string>
k_headers(const std::string& prefix, std::size_t d)
{
  std::vector<std::string> out;
  for (std::size_t j = 0; j < d; ++j) {
    out.push_back(prefix + std::to_string(j + 1));
  }
  return out;
}

void
append(std::vector<std::string>& cells, const CutoffVector& k)
{
  for (double v : k.values()) {
    cells.push_back(format_double(v));
  }
}

std::string
risks_csv(const RunReport& report)
{
  const std::size_t d = report.config.dim();
  const bool adaptive = report.config.mode.type == CutoffMode::adaptive;
  std::vector<std::string> head{ "replicate" };
  for (auto& h : k_headers("k_", d)) {
    head.push_back(h);
  }
  head.push_back("risk");
  head.push_back("spatial_risk");
  if (adaptive) {
    head.push_back("risk_k_min");
    head.push_back("risk_k_max");
    head.push_back("oracle_risk");
    for (auto& h : k_headers("oracle_k_", d)) {
      head.push_back(h);
    }
  }
  std::string out = csv_row(head);
  for (const auto& r : report.replicates) {
    std::vector<std::string> cells{ std::to_string(r.replicate) };
    append(cells, r.k);
    cells.push_back(format_double(r.risk));
    cells.push_back(format_double(r.spatial_risk));
    if (adaptive) {
      cells.push_back(format_double(r.risk_at_min));
      cells.push_back(format_double(r.risk_at_max));
      cells.push_back(format_double(r.oracle_risk));
      append(cells, r.oracle_k);
    }
    out += csv_row(cells);
  }
  return out;
}

std::string
summary_csv(const RunReport& report)
{
  std::string out =
    csv_row({ "metric", "count", "mean", "sd", "se", "min", "q25", "median", "q75", "max" });
  auto row = [&](const std::string& name, const std::vector<double>& values) {
    const auto s = summarize(values);
    out += csv_row({ name,
                     std::to_string(values.size()),
                     format_double(s.mean),
                     format_double(s.sd),
                     format_double(s.se),
                     format_double(s.min),
                     format_double(s.q25),
                     format_double(s.median),
                     format_double(s.q75),
                     format_double(s.max) });
  };
  row("risk", report.risks());
  if (report.config.risk.spatial) {
    row("spatial_risk", report.column(&ReplicateResult::spatial_risk));
  }
  if (report.config.mode.type == CutoffMode::adaptive) {
    row("risk_k_min", report.column(&ReplicateResult::risk_at_min));
    row("risk_k_max", report.column(&ReplicateResult::risk_at_max));
    row("oracle_risk", report.column(&ReplicateResult::oracle_risk));
  }
  return out;
}

std::string
median_csv(const RunReport& report)
{
  const std::size_t d = report.eval_axes.size();
  std::vector<std::string> head = k_headers("x_", d);
  for (const char* h : { "truth", "median", "q25", "q75" }) {
    head.push_back(h);
  }
  std::string out = csv_row(head);
  std::vector<std::size_t> extents;
  for (const auto& a : report.eval_axes) {
    extents.push_back(a.size());
  }
  std::size_t flat = 0;
  for_each_index(extents, [&](std::span<const std::size_t> idx) {
    std::vector<std::string> cells;
    for (std::size_t j = 0; j < d; ++j) {
      cells.push_back(format_double(report.eval_axes[j][idx[j]]));
    }
    cells.push_back(format_double(report.truth[flat]));
    cells.push_back(format_double(report.median_curve[flat]));
    cells.push_back(format_double(report.q25_curve[flat]));
    cells.push_back(format_double(report.q75_curve[flat]));
    out += csv_row(cells);
    ++flat;
  });
  return out;
}

std::string
plot_script(const RunReport& report)
{
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set key autotitle columnhead\n";
  if (report.eval_axes.size() == 1) {
    s << "set xlabel 'x'\n"
      << "plot 'median_curve.csv' using 1:3:4 with filledcurves lc rgb '#dddddd' title "
         "'quartiles', \\\n"
      << "     '' using 1:2 with lines lc rgb 'black' title 'true density', \\\n"
      << "     '' using 1:3 with lines lc rgb 'red' title 'pointwise median'\n";
  } else {
    s << "set xlabel 'x_1'\nset ylabel 'x_2'\n"
      << "set dgrid3d " << report.eval_axes[0].size() << "," << report.eval_axes[1].size() << "\n"
      << "splot 'median_curve.csv' using 1:2:4 with lines lc rgb 'red' title 'pointwise "
         "median', \\\n"
      << "      '' using 1:2:3 with lines lc rgb 'black' title 'true density'\n";
  }
  s << "pause -1\n";
  return s.str();
}

void
write_file(const std::filesystem::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << content;
}

} // namespace

CutoffVector
ModeSpec::cutoff(std::size_t n, std::size_t dim, const DistributionModel& noise) const
{
  auto broadcast = [dim](const std::vector<double>& v, const char* what) {
    if (v.size() == dim) {
      return v;
    }
    if (v.size() == 1) {
      return std::vector<double>(dim, v[0]);
    }
    throw std::invalid_argument(std::string("mode: '") + what + "' needs 1 or " +
                                std::to_string(dim) + " entries");
  };
  switch (type) {
    case CutoffMode::fixed_k:
      return CutoffVector(broadcast(k, "k"));
    case CutoffMode::power: {
      auto e = broadcast(exponent, "exponent");
      for (double& v : e) {
        v = scale * std::pow(static_cast<double>(n), v);
      }
      return CutoffVector(e);
    }
    case CutoffMode::minimax: {
      const auto sv = broadcast(s, "s");
      return minimax_cutoff_schedule(sv, decay_profile(noise).gamma(), static_cast<double>(n));
    }
    case CutoffMode::adaptive:
      break;
  }
  throw std::logic_error("mode: adaptive cut-offs are chosen from the data");
}

std::vector<std::vector<double>>
EvalGridSpec::resolve(const DistributionModel& target) const
{
  EvalGridSpec filled = *this;
  if (lo.empty()) {
    for (const auto& a : target.axes()) {
      filled.lo.push_back(a.quantile(0.001));
    }
  }
  if (hi.empty()) {
    for (const auto& a : target.axes()) {
      filled.hi.push_back(a.quantile(0.999));
    }
  }
  return filled.resolve(target.dim());
}

std::vector<std::vector<double>>
EvalGridSpec::resolve(std::size_t dim) const
{
  auto pick = [dim](const auto& v, std::size_t j, const char* what) {
    if (v.size() == 1) {
      return v[0];
    }
    if (v.size() != dim) {
      throw std::invalid_argument(std::string("eval_grid: '") + what + "' needs 1 or " +
                                  std::to_string(dim) + " entries");
    }
    return v[j];
  };
  const std::vector<int> default_points{ dim == 1 ? 400 : 60 };
  std::vector<std::vector<double>> axes;
  for (std::size_t j = 0; j < dim; ++j) {
    const double a_lo = pick(lo, j, "lo");
    const double a_hi = pick(hi, j, "hi");
    const int pts = pick(points.empty() ? default_points : points, j, "points");
    if (!(a_lo > 0.0) || !(a_hi > a_lo) || pts < 1) {
      throw std::invalid_argument("eval_grid: need 0 < lo < hi and at least one point");
    }
    axes.push_back(linspace(a_lo, a_hi, pts, log_spaced));
  }
  return axes;
}

std::vector<double>
ExperimentConfig::c_values() const
{
  return c.size() == 1 ? std::vector<double>(dim(), c[0]) : c;
}

DistributionModel
ExperimentConfig::target_model() const
{
  return DistributionModel::parse(target).broadcast(dim());
}

DistributionModel
ExperimentConfig::noise_model() const
{
  return DistributionModel::parse(noise).broadcast(dim());
}

void
ExperimentConfig::validate() const
{
  const std::size_t d = dim();
  auto check_axes = [d](std::size_t size, const char* what) {
    if (size != 1 && size != d) {
      throw std::invalid_argument(std::string("config: '") + what + "' has " +
                                  std::to_string(size) + " entries, expected 1 or " +
                                  std::to_string(d));
    }
  };
  check_axes(c.size(), "c");
  check_axes(target.size(), "target");
  check_axes(noise.size(), "noise");
  if (n < 1) {
    throw std::invalid_argument("config: n must be at least 1");
  }
  if (replicates < 1) {
    throw std::invalid_argument("config: replicates must be at least 1");
  }
  quad.validate();
  if (mode.type == CutoffMode::adaptive) {
    mode.selection.validate();
  }
  if (!(risk.half_decades > 0.0) || !(risk.points_per_decade > 0.0) ||
      !(risk.points_per_unit_k >= 0.0)) {
    throw std::invalid_argument("config: risk quadrature settings must be positive");
  }
  const auto f = target_model();
  const auto g = noise_model();
  const auto cv = c_values();
  for (std::size_t j = 0; j < d; ++j) {
    if (f.axis(j).is_degenerate()) {
      throw std::invalid_argument("config: the target must be a proper density");
    }
    if (!f.axis(j).mellin_valid(cv[j]) || !g.axis(j).mellin_valid(cv[j])) {
      throw std::invalid_argument("config: c = " + format_double(cv[j]) +
                                  " is outside the Mellin window of axis " +
                                  std::to_string(j + 1));
    }
  }
  if (mode.type != CutoffMode::adaptive) {
    (void)mode.cutoff(n, d, g);
  }
}

RiskSummary
summarize(std::vector<double> values)
{
  RiskSummary s;
  if (values.empty()) {
    s.mean = s.sd = s.se = s.min = s.q25 = s.median = s.q75 = s.max = nan_v;
    return s;
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : values) {
    ss += (v - s.mean) * (v - s.mean);
  }
  s.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.se = s.sd / std::sqrt(n);
  s.min = values.front();
  s.max = values.back();
  s.q25 = sorted_quantile(values, 0.25);
  s.median = sorted_quantile(values, 0.5);
  s.q75 = sorted_quantile(values, 0.75);
  return s;
}

std::vector<double>
RunReport::risks() const
{
  return column(&ReplicateResult::risk);
}

std::vector<double>
RunReport::column(double ReplicateResult::*field) const
{
  std::vector<double> out;
  for (const auto& r : replicates) {
    out.push_back(r.*field);
  }
  return out;
}

RunReport
run_experiment(const ExperimentConfig& config)
{
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto target = config.target_model();
  const auto noise = config.noise_model();
  const MellinContext ctx(config.c_values());

  RunReport report;
  report.config = config;
  report.eval_axes = config.eval_grid.resolve(target);
  report.truth = density_on_tensor(target, report.eval_axes);
  report.replicates.resize(config.replicates);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned threads = static_cast<unsigned>(
    std::min<std::size_t>(config.threads == 0 ? hw : config.threads, config.replicates));
  report.threads_used = threads;

  std::atomic<std::size_t> next{ 0 };
  std::vector<std::exception_ptr> errors(config.replicates);
  auto worker = [&] {
    for (std::size_t r = next++; r < config.replicates; r = next++) {
      try {
        report.replicates[r] = run_replicate(config, target, noise, ctx, report.eval_axes, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) {
      pool.emplace_back(worker);
    }
  }
  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (errors[r]) {
      try {
        std::rethrow_exception(errors[r]);
      } catch (const std::exception& e) {
        throw std::runtime_error("replicate " + std::to_string(r) + ": " + e.what());
      }
    }
  }

  const std::size_t points = report.truth.size();
  report.median_curve.resize(points);
  report.q25_curve.resize(points);
  report.q75_curve.resize(points);
  std::vector<double> column(config.replicates);
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t r = 0; r < config.replicates; ++r) {
      column[r] = report.replicates[r].values[i];
    }
    std::sort(column.begin(), column.end());
    report.median_curve[i] = sorted_quantile(column, 0.5);
    report.q25_curve[i] = sorted_quantile(column, 0.25);
    report.q75_curve[i] = sorted_quantile(column, 0.75);
  }
  report.wall_seconds =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string
selection_trace_csv(const SelectionTrace& trace, std::optional<std::size_t> replicate)
{
  const std::size_t d = trace.k_selected.dim();
  std::string out;
  if (!replicate) {
    std::vector<std::string> head{ "index" };
    for (auto& h : k_headers("k_", d)) {
      head.push_back(h);
    }
    for (const char* h : { "sigma_hat", "v_hat", "a_hat", "objective", "selected" }) {
      head.push_back(h);
    }
    out = csv_row(head);
  }
  for (std::size_t i = 0; i < trace.grid.size(); ++i) {
    std::vector<std::string> cells;
    if (replicate) {
      cells.push_back(std::to_string(*replicate));
    }
    cells.push_back(std::to_string(i));
    append(cells, trace.grid[i]);
    cells.push_back(format_double(trace.sigma_hat));
    cells.push_back(format_double(trace.v_hat[i]));
    cells.push_back(format_double(trace.a_hat[i]));
    cells.push_back(format_double(trace.objective[i]));
    cells.push_back(i == trace.selected ? "1" : "0");
    out += csv_row(cells);
  }
  return out;
}

void
write_report(const RunReport& report, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> files{
    { "risks.csv", risks_csv(report) },
    { "summary.csv", summary_csv(report) },
    { "median_curve.csv", median_csv(report) },
  };
  if (report.config.mode.type == CutoffMode::adaptive) {
    const std::size_t d = report.config.dim();
    std::vector<std::string> head{ "replicate", "index" };
    for (auto& h : k_headers("k_", d)) {
      head.push_back(h);
    }
    for (const char* h : { "sigma_hat", "v_hat", "a_hat", "objective", "selected" }) {
      head.push_back(h);
    }
    std::string traces = csv_row(head);
    for (const auto& r : report.replicates) {
      traces += selection_trace_csv(*r.trace, r.replicate);
    }
    files.emplace_back("selection_traces.csv", std::move(traces));
  }
  if (report.config.plot_script) {
    files.emplace_back("plot.gp", plot_script(report));
  }
  nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    hashes[name] = git_blob_hash(content);
  }
  const std::string config_text = config_to_text(report.config);
  nlohmann::ordered_json grid = nlohmann::ordered_json::array();
  for (const auto& a : report.eval_axes) {
    grid.push_back({ { "lo", a.front() }, { "hi", a.back() }, { "points", a.size() } });
  }
  nlohmann::ordered_json manifest;
  manifest["config_hash"] = git_blob_hash(config_text);
  manifest["outputs"] = hashes;
  manifest["eval_grid"] = grid;
  manifest["threads"] = report.threads_used;
  manifest["wall_seconds"] = report.wall_seconds;
  manifest["config"] = nlohmann::ordered_json::parse(config_text);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace mdecon
