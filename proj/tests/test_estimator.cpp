#include <doctest.h>

#include "fixtures.hpp"
#include "mdecon/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mdecon;

namespace {

const auto gamma42 = DistributionModel::parse("gamma(shape=4,scale=2)");
const auto uniform = DistributionModel::parse("uniform()");
const auto none = DistributionModel::parse("none()");

double
median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

TEST_CASE("empirical_mellin")
{
  const auto y = SampleMatrix::column({ 1.0, 2.0, 4.0 });
  const double t0[] = { 0.0 };
  CHECK(empirical_mellin(y, MellinContext({ 1.0 }), t0) == cplx(1.0, 0.0));
  CHECK(empirical_mellin(y, MellinContext({ 2.0 }), t0).real() ==
        doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  for (double t : { 0.3, 1.0, 7.5, -2.0 }) {
    const double tv[] = { t };
    CHECK(std::abs(empirical_mellin(y, MellinContext({ 1.0 }), tv)) <= 1.0 + 1e-15);
  }
  SUBCASE("matrix path agrees with the direct sum")
  {
    const auto s = fixtures::gamma_uniform(50, 3);
    const MellinContext ctx({ 0.7 });
    const DensityEstimate est(s, uniform, ctx, CutoffVector{ 2.0 }, QuadratureConfig{});
    const auto& axis = est.axes()[0];
    for (std::size_t i = 0; i < axis.size(); i += 7) {
      const double t[] = { axis.node(i) };
      const cplx direct = empirical_mellin(s, ctx, t) / uniform.axis(0).mellin(0.7, t[0]);
      CHECK(std::abs(est.ratio()(static_cast<Eigen::Index>(i), 0) - direct) < 1e-13);
    }
  }
}

TEST_CASE("unbiasedness of the empirical transform")
{
  const MellinContext c1({ 1.0 });
  const std::size_t reps = 200;
  for (double t : { 0.0, 1.0, 3.0 }) {
    const double tv[] = { t };
    std::vector<cplx> vals;
    for (std::size_t r = 0; r < reps; ++r) {
      vals.push_back(empirical_mellin(fixtures::gamma_uniform(500, 77, r), c1, tv));
    }
    cplx mean = 0.0;
    for (auto v : vals) {
      mean += v;
    }
    mean /= static_cast<double>(reps);
    double var_re = 0.0;
    double var_im = 0.0;
    for (auto v : vals) {
      var_re += std::pow(v.real() - mean.real(), 2);
      var_im += std::pow(v.imag() - mean.imag(), 2);
    }
    const double se_re = std::sqrt(var_re / (reps - 1) / reps);
    const double se_im = std::sqrt(var_im / (reps - 1) / reps);
    const cplx truth = gamma42.axis(0).mellin(1.0, t) * uniform.axis(0).mellin(1.0, t);
    CAPTURE(t);
    CHECK(std::abs(mean.real() - truth.real()) <= 4.0 * se_re + 1e-15);
    CHECK(std::abs(mean.imag() - truth.imag()) <= 4.0 * se_im + 1e-15);
  }
}

TEST_CASE("delta_g")
{
  const QuadratureConfig quad;
  const MellinContext c1({ 1.0 });
  // (2 pi)^{-1} int_{-2}^{2} (1 + t^2) dt
  CHECK(delta_g(uniform, c1, CutoffVector{ 2.0 }, quad) ==
        doctest::Approx(1.4854461355243564672).epsilon(1e-13));
  for (double k : { 0.5, 1.0, 3.7 }) {
    CHECK(delta_g(none, c1, CutoffVector{ k }, quad) ==
          doctest::Approx(k / std::numbers::pi).epsilon(1e-13));
  }
  double prev = 0.0;
  for (double k : { 0.2, 0.9, 1.0, 2.5, 4.0, 9.0 }) {
    const double v = delta_g(DistributionModel::parse("beta(b=2)"), c1, CutoffVector{ k }, quad);
    CHECK(v >= prev);
    prev = v;
  }
  SUBCASE("vanishing noise transform")
  {
    const auto ln = DistributionModel::parse("lognormal(mu=0,lambda=3)");
    try {
      delta_g(ln, c1, CutoffVector{ 5.0 }, quad);
      FAIL("expected an exception");
    } catch (const std::domain_error& e) {
      CHECK(std::string(e.what()).find("t = (") != std::string::npos);
    }
    const SampleMatrix y = SampleMatrix::column({ 1.0, 2.0 });
    CHECK_THROWS_AS(DensityEstimate(y, ln, c1, CutoffVector{ 5.0 }, quad), std::domain_error);
  }
  SUBCASE("tensor product")
  {
    const MellinContext c2({ 1.0, 1.0 });
    CHECK(delta_g(uniform.broadcast(2), c2, CutoffVector{ 2.0, 3.0 }, quad) ==
          doctest::Approx(delta_g(uniform, c1, CutoffVector{ 2.0 }, quad) *
                          delta_g(uniform, c1, CutoffVector{ 3.0 }, quad))
            .epsilon(1e-13));
  }
}

TEST_CASE("estimate_at")
{
  const QuadratureConfig quad;
  const MellinContext c1({ 1.0 });
  SUBCASE("direct observations recover f1 at x = 4")
  {
    std::vector<double> vals;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto x = sample(gamma42, 2000, StreamKey{ seed, 0, 0 });
      const DensityEstimate est(x, none, c1, CutoffVector{ 4.0 }, quad);
      const double at[] = { 4.0 };
      vals.push_back(est.estimate_at(at));
    }
    // mpmath: 64 exp(-2) / 96
    CHECK(std::abs(median(vals) - 0.090223522157741794596) < 0.05);
  }
  SUBCASE("exact observation transform gives the cut-off approximation")
  {
    FrequencyFunction fy;
    fy.conjugate_symmetric = true;
    fy.eval = [](std::span<const double> t) {
      return gamma42.axis(0).mellin(1.0, t[0]) * uniform.axis(0).mellin(1.0, t[0]);
    };
    const auto k50 = DensityEstimate::from_transform(fy, uniform, c1, CutoffVector{ 50.0 }, quad);
    for (double x : { 1.0, 2.0, 5.0 }) {
      const double at[] = { x };
      CHECK(std::abs(k50.estimate_at(at) - fixtures::f1(x)) < 1e-3);
      const auto direct =
        mellin_inverse(mellin_function(gamma42, c1), c1, CutoffVector{ 50.0 }, at, quad);
      CHECK(k50.estimate_at(at) == doctest::Approx(direct.value).epsilon(1e-10));
    }
    // the approximation error shrinks as k grows
    double prev = INFINITY;
    for (double k : { 0.5, 1.0, 2.0, 4.0 }) {
      const auto fk = DensityEstimate::from_transform(fy, uniform, c1, CutoffVector{ k }, quad);
      const double err = fk.spectral_risk(gamma42);
      CHECK(err < prev);
      prev = err;
    }
    // noise-free transform: the risk is the pure truncation bias
    CHECK(prev == doctest::Approx(0.0036286991338593083075).epsilon(1e-6));
  }
  SUBCASE("vanishing cuboid")
  {
    const auto y = fixtures::gamma_uniform(300, 1);
    const DensityEstimate est(y, uniform, c1, CutoffVector{ 1e-4 }, quad);
    const double at[] = { 3.0 };
    CHECK(std::abs(est.estimate_at(at)) < 1e-4);
  }
  SUBCASE("imaginary residue vanishes")
  {
    const auto y = fixtures::gamma_uniform(300, 1);
    const DensityEstimate est(y, uniform, MellinContext({ 0.5 }), CutoffVector{ 3.3 }, quad);
    for (double x : { 0.1, 1.0, 8.0 }) {
      const double at[] = { x };
      CHECK(std::abs(est.evaluate(at).imag) < 1e-14);
    }
    const double bad[] = { 0.0 };
    CHECK_THROWS_AS(est.estimate_at(bad), std::invalid_argument);
  }
}

TEST_CASE("estimate_on_grid and the tensor path")
{
  const auto y = fixtures::gamma_uniform(400, 2);
  const DensityEstimate est(y, uniform, MellinContext({ 1.0 }), CutoffVector{ 3.0 },
                            QuadratureConfig{});
  std::vector<std::vector<double>> pts;
  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) {
    xs.push_back(0.05 * std::pow(1.06, i));
    pts.push_back({ xs.back() });
  }
  const auto grid = est.estimate_on_grid(pts);
  REQUIRE(grid.size() == 100);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(grid[i] == est.estimate_at(pts[i]));
  }
  CHECK(est.estimate_on_grid({ pts[5] }) == std::vector<double>{ est.estimate_at(pts[5]) });
  CHECK(est.estimate_on_grid({}).empty());
  const auto tensor = est.estimate_on_tensor({ xs });
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(std::abs(tensor[i] - grid[i]) < 1e-13);
  }

  SUBCASE("two dimensions")
  {
    const auto f2 = DistributionModel::parse(
      std::vector<std::string>{ "gamma(shape=4,scale=2)", "weibull(m=2)" });
    const auto g2 = DistributionModel::parse("loggamma(a=0.5,lambda=1)").broadcast(2);
    const auto y2 = contaminate(sample(f2, 300, StreamKey{ 4, 0, 0 }),
                                sample(g2, 300, StreamKey{ 4, 0, 1 }));
    const MellinContext c2({ 0.5, 0.5 });
    const DensityEstimate e2(y2, g2, c2, CutoffVector{ 2.0, 1.5 }, QuadratureConfig{});
    const std::vector<double> ax{ 0.5, 2.0, 6.0 };
    const std::vector<double> ay{ 0.3, 0.9, 1.4, 2.2 };
    const auto t2 = e2.estimate_on_tensor({ ax, ay });
    REQUIRE(t2.size() == 12);
    for (std::size_t i = 0; i < ax.size(); ++i) {
      for (std::size_t j = 0; j < ay.size(); ++j) {
        const double p[] = { ax[i], ay[j] };
        const auto v = e2.evaluate(p);
        CHECK(std::abs(t2[i * ay.size() + j] - v.value) < 1e-13);
        CHECK(std::abs(v.imag) < 1e-14);
      }
    }
  }
}

TEST_CASE("Plancherel identity for differences of estimates")
{
  const auto y = fixtures::gamma_uniform(200, 2024);
  const MellinContext c1({ 1.0 });
  const QuadratureConfig quad;
  const auto rule = fixtures::spatial_rule();
  const CuboidTable table(y, uniform, c1, { 5 }, quad);
  for (auto [k, kp] : { std::pair{ 1, 4 }, std::pair{ 2, 5 }, std::pair{ 3, 4 } }) {
    const int meet = std::min(k, kp);
    const DensityEstimate outer(y, uniform, c1, CutoffVector{ double(kp) }, quad);
    const DensityEstimate inner(y, uniform, c1, CutoffVector{ double(meet) }, quad);
    const double spatial = fixtures::spatial_distance_sq(outer, inner, 1.0, rule);
    const int kv[] = { k };
    const int kpv[] = { kp };
    const double spectral = table.set_difference(kpv, kv);
    CAPTURE(k);
    CAPTURE(kp);
    CHECK(spatial == doctest::Approx(spectral).epsilon(0.01));
  }
}

TEST_CASE("spectral risk matches the spatial weighted norm")
{
  const auto y = fixtures::gamma_uniform(1000, 5);
  const MellinContext c1({ 1.0 });
  const DensityEstimate est(y, uniform, c1, CutoffVector{ 4.0 }, QuadratureConfig{});
  const auto rule = fixtures::spatial_rule();
  const auto v = est.estimate_on_tensor({ rule.x });
  double spatial = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - fixtures::f1(rule.x[i]);
    spatial += rule.w[i] * d * d * rule.x[i];
  }
  CHECK(est.spectral_risk(gamma42) == doctest::Approx(spatial).epsilon(0.01));
  // mpmath: int f1^2 x dx = 35/64
  CHECK(target_norm_sq(gamma42, c1) == doctest::Approx(0.546875).epsilon(1e-9));
}

TEST_CASE("theoretical_risk")
{
  const QuadratureConfig quad;
  const MellinContext c1({ 1.0 });
  const auto r = theoretical_risk(gamma42, uniform, c1, CutoffVector{ 4.0 }, 1000, quad);
  CHECK(r.sigma == 1.0);
  // (2 pi)^{-1} (2k + 2k^3/3) / n with k = 4
  CHECK(r.variance_bound == doctest::Approx(8.063850449989363679e-3).epsilon(1e-12));
  // mpmath: (2 pi)^{-1} int_{|t| > 4} |M_1[f1](t)|^2 dt
  CHECK(r.bias_sq == doctest::Approx(0.0036286991338593083075).epsilon(1e-6));
  CHECK(r.total() == doctest::Approx(r.bias_sq + r.variance_bound));
  CHECK(theoretical_risk(gamma42, uniform, c1, CutoffVector{ 200.0 }, 1000, quad).bias_sq < 1e-12);

  double prev = INFINITY;
  for (double k : { 0.5, 1.0, 2.0, 3.0, 6.0, 10.0 }) {
    const double b = theoretical_risk(gamma42, uniform, c1, CutoffVector{ k }, 1000, quad).bias_sq;
    CHECK(b <= prev);
    prev = b;
  }
  SUBCASE("sigma from moments")
  {
    const MellinContext c15({ 1.5 });
    // E[X] E[U] = 8 * 1/2
    CHECK(sigma_theoretical(gamma42, uniform, c15) == doctest::Approx(4.0).epsilon(1e-13));
    // E[U^{-1}] is infinite for uniform noise
    CHECK_THROWS_AS(sigma_theoretical(gamma42, uniform, MellinContext({ 0.5 })), std::domain_error);
  }
  SUBCASE("two dimensions")
  {
    const MellinContext c2({ 1.0, 1.0 });
    const auto f2 = gamma42.broadcast(2);
    const auto r2 =
      theoretical_risk(f2, uniform.broadcast(2), c2, CutoffVector{ 4.0, 200.0 }, 1000, quad);
    CHECK(r2.bias_sq == doctest::Approx(0.0036286991338593083075 * 0.546875).epsilon(1e-5));
  }
}

TEST_CASE("minimax_cutoff_schedule")
{
  const double s1[] = { 1.0 };
  const double g1[] = { 1.0 };
  CHECK(minimax_cutoff_schedule(s1, g1, 1024)[0] == doctest::Approx(std::pow(1024.0, 0.2)));
  CHECK(minimax_cutoff_schedule(s1, g1, 1024)[0] == doctest::Approx(4.0).epsilon(0.01));
  const double s2[] = { 1.0, 1.0 };
  const double g2[] = { 1.0, 1.0 };
  const auto k2 = minimax_cutoff_schedule(s2, g2, 4096);
  CHECK(k2[0] == doctest::Approx(std::pow(4096.0, 0.125)));
  CHECK(k2[1] == doctest::Approx(std::pow(4096.0, 0.125)));
  const double sa[] = { 0.7, 2.3 };
  const double sb[] = { 1.4, 2.3 };
  const double ga[] = { 0.5, 2.0 };
  const auto ka = minimax_cutoff_schedule(sa, ga, 5000);
  const double total = 2.0 / 0.7 + 5.0 / 2.3;
  CHECK(ka[0] == doctest::Approx(std::pow(5000.0, 1.0 / (0.7 * (2.0 + total)))).epsilon(1e-14));
  // k_i^{s_i} is the same on every axis
  CHECK(std::pow(ka[0], 0.7) == doctest::Approx(std::pow(ka[1], 2.3)).epsilon(1e-13));
  const auto kb = minimax_cutoff_schedule(sb, ga, 5000);
  CHECK(kb[0] < ka[0]);
  CHECK_THROWS_AS(minimax_cutoff_schedule(s1, g2, 10), std::invalid_argument);
}

TEST_CASE("CuboidTable")
{
  const QuadratureConfig quad;
  SUBCASE("one dimension")
  {
    const auto y = fixtures::gamma_uniform(250, 8);
    const MellinContext c1({ 1.0 });
    const CuboidTable table(y, uniform, c1, { 6 }, quad, gamma42);
    for (int k = 1; k <= 6; ++k) {
      const DensityEstimate est(y, uniform, c1, CutoffVector{ double(k) }, quad);
      FrequencyFunction ratio;
      ratio.eval = [&](std::span<const double> t) {
        return empirical_mellin(y, c1, t) / uniform.axis(0).mellin(1.0, t[0]);
      };
      const int kv[] = { k };
      CHECK(table.norm_sq(kv) ==
            doctest::Approx(plancherel_norm_sq(ratio, CutoffVector{ double(k) }, c1, quad))
              .epsilon(1e-11));
      CHECK(table.delta(kv) ==
            doctest::Approx(delta_g(uniform, c1, CutoffVector{ double(k) }, quad)).epsilon(1e-12));
      CHECK(table.risk(kv) == doctest::Approx(est.spectral_risk(gamma42)).epsilon(1e-9));
      CHECK(table.set_difference(kv, kv) == 0.0);
    }
    const int k6[] = { 6 };
    const int k2[] = { 2 };
    CHECK(table.set_difference(k2, k6) == 0.0);
    CHECK(table.set_difference(k6, k2) > 0.0);
    CHECK_THROWS_AS(table.norm_sq(std::vector<int>{ 7 }), std::out_of_range);
  }
  SUBCASE("two dimensions")
  {
    const auto f2 = DistributionModel::parse(
      std::vector<std::string>{ "gamma(shape=4,scale=2)", "weibull(m=2)" });
    const auto g2 = DistributionModel::parse("loggamma(a=0.5,lambda=1)").broadcast(2);
    const auto y2 = contaminate(sample(f2, 200, StreamKey{ 6, 0, 0 }),
                                sample(g2, 200, StreamKey{ 6, 0, 1 }));
    const MellinContext c2({ 0.5, 0.5 });
    const CuboidTable table(y2, g2, c2, { 3, 4 }, quad, f2);
    FrequencyFunction ratio;
    ratio.eval = [&](std::span<const double> t) {
      return empirical_mellin(y2, c2, t) / mellin_closed_form(g2, c2.c(), t);
    };
    for (int a = 1; a <= 3; ++a) {
      for (int b = 1; b <= 4; ++b) {
        const int kv[] = { a, b };
        const CutoffVector k{ double(a), double(b) };
        CAPTURE(a);
        CAPTURE(b);
        CHECK(table.norm_sq(kv) ==
              doctest::Approx(plancherel_norm_sq(ratio, k, c2, quad)).epsilon(1e-10));
        CHECK(table.delta(kv) == doctest::Approx(delta_g(g2, c2, k, quad)).epsilon(1e-12));
        const DensityEstimate est(y2, g2, c2, k, quad);
        CHECK(table.risk(kv) == doctest::Approx(est.spectral_risk(f2)).epsilon(1e-9));
        const int kp[] = { 2, 1 };
        const double diff = plancherel_norm_sq(ratio, CuboidDifference{ k, { 2.0, 1.0 } }, c2, quad);
        CHECK(table.set_difference(kv, kp) == doctest::Approx(diff).epsilon(1e-9));
      }
    }
  }
}
