#include "mdecon/harness.hpp"
#include "mdecon/rng.hpp"
#include "mdecon/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace mdecon {

namespace {

double
ols_slope(const std::vector<double>& x, const std::vector<double>& y)
{
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::string
complex_cells(cplx z)
{
  return format_double(z.real()) + "," + format_double(z.imag());
}

} // namespace

RateTable
rate_study(const ExperimentConfig& config,
           const std::vector<std::size_t>& n_list,
           std::size_t bootstrap,
           double level)
{
  if (n_list.size() < 2) {
    throw std::invalid_argument("rate_study: need at least two sample sizes");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("rate_study: level must lie in (0, 1)");
  }
  RateTable table;
  table.bootstrap = bootstrap;
  std::vector<std::vector<double>> risks;
  std::vector<double> log_n;
  std::vector<double> log_mean;
  for (std::size_t n : n_list) {
    auto cfg = config;
    cfg.n = n;
    const auto report = run_experiment(cfg);
    auto r = report.risks();
    const auto s = summarize(r);
    table.rows.push_back({ n, s.mean, s.median, s.se });
    log_n.push_back(std::log(static_cast<double>(n)));
    log_mean.push_back(std::log(s.mean));
    risks.push_back(std::move(r));
  }
  table.slope = ols_slope(log_n, log_mean);
  if (bootstrap > 0) {
    std::vector<double> slopes;
    slopes.reserve(bootstrap);
    std::vector<double> y(n_list.size());
    for (std::size_t b = 0; b < bootstrap; ++b) {
      Rng rng(StreamKey{ config.seed, b, 2 });
      for (std::size_t i = 0; i < risks.size(); ++i) {
        const auto& r = risks[i];
        double s = 0.0;
        for (std::size_t m = 0; m < r.size(); ++m) {
          const auto pick = std::min(
            r.size() - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(r.size())));
          s += r[pick];
        }
        y[i] = std::log(s / static_cast<double>(r.size()));
      }
      slopes.push_back(ols_slope(log_n, y));
    }
    std::sort(slopes.begin(), slopes.end());
    auto q = [&](double p) {
      const double h = p * static_cast<double>(slopes.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(h));
      const auto hi = std::min(lo + 1, slopes.size() - 1);
      return slopes[lo] + (h - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
    };
    table.slope_lo = q(0.5 * (1.0 - level));
    table.slope_hi = q(0.5 * (1.0 + level));
  } else {
    table.slope_lo = table.slope_hi = table.slope;
  }
  return table;
}

std::string
rate_table_csv(const RateTable& table)
{
  std::string out = "n,mean_risk,median_risk,se\n";
  for (const auto& r : table.rows) {
    out += std::to_string(r.n) + "," + format_double(r.mean_risk) + "," +
           format_double(r.median_risk) + "," + format_double(r.se) + "\n";
  }
  out += "# slope," + format_double(table.slope) + ",interval," + format_double(table.slope_lo) +
         "," + format_double(table.slope_hi) + ",bootstrap," + std::to_string(table.bootstrap) +
         "\n";
  return out;
}

QuadratureConfig
report_quadrature()
{
  QuadratureConfig q;
  q.x_max = { 1e7 };
  q.decades = 21;
  q.points_per_decade = 400;
  return q;
}

std::vector<TransformRow>
transforms_report(const DistributionModel& model,
                  double c,
                  const std::vector<double>& t_list,
                  const QuadratureConfig& quad)
{
  if (model.dim() != 1) {
    throw std::invalid_argument("transforms_report: one-dimensional models only");
  }
  const auto& u = model.axis(0);
  if (u.is_degenerate()) {
    throw std::invalid_argument("transforms_report: none() has no density");
  }
  const MellinContext ctx({ c });
  const auto h = as_spatial(model);
  std::vector<TransformRow> rows;
  for (double t : t_list) {
    TransformRow row;
    row.t = t;
    row.closed_form = mellin_closed_form(u, c, t);
    const double tv[] = { t };
    row.quadrature = mellin_forward(h, ctx, tv, quad);
    row.abs_diff = std::abs(row.closed_form - row.quadrature);
    rows.push_back(row);
  }
  return rows;
}

std::string
transforms_csv(const std::vector<TransformRow>& rows)
{
  std::string out = "t,closed_re,closed_im,quad_re,quad_im,abs_diff\n";
  for (const auto& r : rows) {
    out += format_double(r.t) + "," + complex_cells(r.closed_form) + "," +
           complex_cells(r.quadrature) + "," + format_double(r.abs_diff) + "\n";
  }
  return out;
}

ExperimentConfig
figure_recipe(std::string_view name)
{
  ExperimentConfig c;
  c.name = std::string(name);
  c.output = "out/" + std::string(name);
  c.replicates = 50;
  c.seed = 1;
  c.plot_script = true;
  if (name == "fig1" || name == "fig2" || name == "fig4") {
    c.target = { "gamma(shape=4,scale=2)" };
    c.c = { 0.5 };
    c.mode.type = CutoffMode::fixed_k;
    c.mode.k = { 4.0 };
    c.n = 1000;
    c.noise = { name == "fig1" ? "pareto()" : "uniform()" };
    if (name == "fig4") {
      c.noise = { "loggamma(a=0.5,lambda=1)" };
      c.n = 500;
    }
    return c;
  }
  if (name == "fig5" || name == "fig6") {
    c.target = { "gamma(shape=4,scale=2)", "weibull(m=2)" };
    c.c = { 0.5, 0.5 };
    c.n = 500;
    c.mode.type = CutoffMode::adaptive;
    c.eval_grid.points = { 60 };
    // the 2-d spatial risk at cut-offs near the grid cap costs minutes per
    // replicate; the Mellin-domain risk is always reported
    c.risk.spatial = false;
    if (name == "fig5") {
      c.noise = { "none()", "none()" };
      c.mode.selection.chi1 = c.mode.selection.chi2 = 1.2;
    } else {
      c.noise = { "loggamma(a=0.5,lambda=1)", "loggamma(a=0.5,lambda=1)" };
      c.mode.selection.chi1 = c.mode.selection.chi2 = 0.3;
    }
    return c;
  }
  if (name == "fig3") {
    throw std::invalid_argument(
      "figure_recipe: there is no fig3 recipe (the figures are numbered 1, 2, 4, 5, 6)");
  }
  throw std::invalid_argument("figure_recipe: unknown figure '" + std::string(name) +
                              "' (expected fig1, fig2, fig4, fig5 or fig6)");
}

SampleMatrix
read_sample_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open dataset " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path.string() + ": empty file, expected a header row");
  }
  const std::size_t d = split(line, ',').size();
  std::vector<double> data;
  std::size_t n = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != d) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(d) + " columns, got " +
                                  std::to_string(cells.size()));
    }
    for (const auto& cell : cells) {
      double v = 0.0;
      try {
        v = parse_double(cell);
      } catch (const std::invalid_argument&) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                    ": not a number: '" + cell + "'");
      }
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                    ": observations must be positive and finite");
      }
      data.push_back(v);
    }
    ++n;
  }
  if (n == 0) {
    throw std::invalid_argument(path.string() + ": no observations");
  }
  return SampleMatrix(n, d, std::move(data));
}

std::string
git_blob_hash(std::string_view content)
{
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    throw std::runtime_error("SHA-1 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

} // namespace mdecon
