#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "blockmax/blocks.hpp"
#include "blockmax/dist.hpp"
#include "blockmax/sim.hpp"

using namespace blockmax;

namespace {

// Two-sided Kolmogorov-Smirnov statistic against a cdf F.
double ks_statistic(std::vector<double> x, auto&& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

}  // namespace

TEST_CASE("simulators are deterministic in seed and stream", "[sim]") {
  const sim::GpdSeriesSpec spec{0.2, 0.5, 512, 7, 3};
  CHECK(sim::simulate_armax_gpd(spec) == sim::simulate_armax_gpd(spec));
  sim::GpdSeriesSpec other = spec;
  other.stream = 4;
  CHECK(sim::simulate_armax_gpd(other) != sim::simulate_armax_gpd(spec));

  const sim::ParetoSeriesSpec pspec{1.5, 0.3, 512, 7, 0};
  CHECK(sim::simulate_armax_pareto(pspec) == sim::simulate_armax_pareto(pspec));

  CHECK_THROWS_AS(sim::simulate_armax_gpd({0.0, 1.0, 10, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sim::simulate_armax_gpd({0.0, -0.1, 10, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sim::simulate_armax_pareto({0.0, 0.0, 10, 0, 0}),
                  std::invalid_argument);
}

TEST_CASE("independent series follow the stated marginal law", "[sim]") {
  const auto x = sim::simulate_armax_gpd({0.0, 0.0, 10000, 11, 0});
  const double d = ks_statistic(x, [](double v) { return dist::gpd_cdf(v, 0.0); });
  CHECK(d < 0.02);

  const auto y = sim::simulate_armax_pareto({1.0, 0.0, 10000, 11, 0});
  for (double v : y) REQUIRE(v >= 1.0);
  const double dy =
      ks_statistic(y, [](double v) { return v <= 1.0 ? 0.0 : 1.0 - 1.0 / v; });
  CHECK(dy < 0.02);
}

TEST_CASE("independent series pass a level-0.01 ks battery", "[sim]") {
  const std::size_t n = 10000;
  const double crit = 1.6276 / std::sqrt(static_cast<double>(n));
  int fail_gpd = 0, fail_pareto = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = sim::simulate_armax_gpd({0.2, 0.0, n, seed, 0});
    if (ks_statistic(x, [](double v) { return dist::gpd_cdf(v, 0.2); }) > crit)
      ++fail_gpd;
    const auto y = sim::simulate_armax_pareto({1.5, 0.0, n, seed, 1});
    if (ks_statistic(y, [](double v) {
          return v <= 1.0 ? 0.0 : -std::expm1(-1.5 * std::log(v));
        }) > crit)
      ++fail_pareto;
  }
  CHECK(fail_gpd <= 2);
  CHECK(fail_pareto <= 2);
}

TEST_CASE("dependent series keep the marginal distribution", "[sim]") {
  const auto x = sim::simulate_armax_gpd({0.2, 0.5, 100000, 5, 0});
  const double n = static_cast<double>(x.size());
  for (int dec = 1; dec <= 9; ++dec) {
    const double q = dec / 10.0;
    const double xq = dist::gpd_quantile(q, 0.2);
    const double frac =
        std::count_if(x.begin(), x.end(), [&](double v) { return v <= xq; }) / n;
    CHECK(frac == Catch::Approx(q).margin(0.02));
  }
}

TEST_CASE("dependence clusters the extremes", "[sim]") {
  // with beta > 0 a large latent value persists across neighboring steps, so
  // high-threshold exceedances arrive in clusters instead of in isolation
  auto adjacent_exceedances = [](const std::vector<double>& x, double u) {
    std::size_t c = 0;
    for (std::size_t i = 1; i < x.size(); ++i) c += x[i] > u && x[i - 1] > u;
    return c;
  };
  const double u = dist::gpd_quantile(0.99, 0.0);
  const auto iid = sim::simulate_armax_gpd({0.0, 0.0, 20000, 3, 0});
  const auto dep = sim::simulate_armax_gpd({0.0, 0.8, 20000, 3, 0});
  CHECK(adjacent_exceedances(iid, u) < 15);   // ~n/10000 expected
  CHECK(adjacent_exceedances(dep, u) > 80);   // ~0.8 of ~200 exceedances
}

TEST_CASE("return level closed form", "[sim]") {
  CHECK(sim::true_return_level(2.0, 1, 0.0, 0.0) ==
        Catch::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(sim::true_return_level(100.0, 365, 0.0, 0.0) ==
        Catch::Approx(10.500060347910841).epsilon(1e-13));
  CHECK(sim::true_return_level_pareto(100.0, 50, 1.0, 0.0) ==
        Catch::Approx(4975.458140421669).epsilon(1e-13));

  // increasing in the horizon and in the block length
  double prev = 0.0;
  for (double T : {2.0, 5.0, 20.0, 100.0, 1000.0}) {
    const double rl = sim::true_return_level(T, 90, 0.1, 0.25);
    CHECK(rl > prev);
    prev = rl;
  }
  prev = 0.0;
  for (int r : {1, 2, 8, 64, 512}) {
    const double rl = sim::true_return_level(50.0, r, -0.2, 0.25);
    CHECK(rl > prev);
    prev = rl;
  }

  // beta -> 1 collapses a block to a single effective observation
  CHECK(sim::true_return_level(100.0, 10, 0.3, 1.0 - 1e-9) ==
        Catch::Approx(dist::gpd_quantile(0.99, 0.3)).margin(1e-6));

  CHECK_THROWS_AS(sim::true_return_level(1.0, 10, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sim::true_return_level(100.0, 10, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sim::true_return_level(100.0, 0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("expected block maximum matches exact identities", "[sim]") {
  // iid exponential marginals: E max of r draws is the r-th harmonic number
  for (int r : {1, 2, 10, 100, 365}) {
    double h = 0.0;
    for (int j = 1; j <= r; ++j) h += 1.0 / j;
    CHECK(sim::true_block_mean(r, 0.0, 0.0) == Catch::Approx(h).epsilon(1e-9));
  }
  // iid GPD marginals, integer r: inclusion-exclusion over the survival power
  CHECK(sim::true_block_mean(4, -0.2, 0.0) ==
        Catch::Approx(1.617965367965368).epsilon(1e-9));
  CHECK(sim::true_block_mean(4, 0.2, 0.0) ==
        Catch::Approx(2.8320802005012533).epsilon(1e-9));

  CHECK(sim::true_block_mean(2, 0.0, 0.0) == Catch::Approx(1.5).epsilon(1e-12));
  CHECK(sim::true_block_mean(365, -0.2, 0.5) ==
        Catch::Approx(3.3814807476905364).epsilon(1e-9));

  CHECK(sim::true_block_mean_pareto(1, 2.0, 0.0) == Catch::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(sim::true_block_mean(10, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sim::true_block_mean_pareto(10, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("expected block maximum matches simulation under dependence", "[sim]") {
  {
    const int r = 365;
    const std::size_t m = 3000;
    const auto x = sim::simulate_armax_gpd({-0.2, 0.5, m * r, 21, 0});
    const auto bm = blocks::disjoint_maxima(x, r).values;
    const double avg = std::accumulate(bm.begin(), bm.end(), 0.0) / m;
    CHECK(avg == Catch::Approx(3.3814807476905364).margin(0.025));
  }
  {
    const int r = 5;
    const std::size_t m = 100000;
    const auto x = sim::simulate_armax_pareto({3.0, 0.0, m * r, 22, 0});
    const auto bm = blocks::disjoint_maxima(x, r).values;
    const double avg = std::accumulate(bm.begin(), bm.end(), 0.0) / m;
    CHECK(avg == Catch::Approx(sim::true_block_mean_pareto(r, 3.0, 0.0)).margin(0.02));
  }
}

TEST_CASE("norming constants", "[sim]") {
  const auto n0 = sim::norming_constants(10, 0.0, 0.0);
  CHECK(n0.a == 1.0);
  CHECK(n0.b == Catch::Approx(std::log(10.0)).epsilon(1e-14));

  const auto n1 = sim::norming_constants(100, 0.2, 0.5);
  CHECK(n1.a == Catch::Approx(2.1867241478865562).epsilon(1e-14));
  CHECK(n1.b == Catch::Approx(5.93362073943278).epsilon(1e-14));

  const auto tiny = sim::norming_constants(100, 1e-10, 0.5);
  CHECK(tiny.a == Catch::Approx(1.0).margin(1e-6));
  CHECK(tiny.b == Catch::Approx(std::log(50.0)).margin(1e-6));
}

TEST_CASE("standardized block maxima approach the limit family", "[sim]") {
  const int r = 10000;
  for (double shape : {-0.2, 0.0, 0.2}) {
    for (double beta : {0.0, 0.5}) {
      const double c = sim::effective_block_count(r, beta);
      const auto ab = sim::norming_constants(r, shape, beta);
      double worst = 0.0;
      for (double x = -2.0; x <= 4.8; x += 0.1) {
        const double exact =
            std::pow(dist::gpd_cdf(ab.a * x + ab.b, shape), c);
        const double limit = dist::gev_cdf(x, {0.0, 1.0, shape});
        worst = std::max(worst, std::abs(exact - limit));
      }
      CHECK(worst < 0.01);
    }
  }
}
