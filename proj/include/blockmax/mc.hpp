#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "blockmax/blocks.hpp"
#include "blockmax/boot.hpp"
#include "blockmax/detail/numerics.hpp"
#include "blockmax/dist.hpp"
#include "blockmax/fit.hpp"
#include "blockmax/rng.hpp"
#include "blockmax/sim.hpp"

namespace blockmax::mc {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;

// Gamma''(2) = (1 - euler_gamma)^2 + pi^2/6 - 1
inline double gamma_second_derivative_at_2() {
  return (1.0 - euler_gamma) * (1.0 - euler_gamma) + pi * pi / 6.0 - 1.0;
}

// ---- closed-form asymptotic variances (mean estimator) ----

namespace impl {

// alpha_c(w) - 1 with alpha_c(w) = (1 - (1-w)^(c+1)) / (w (c+1)); the direct
// form cancels catastrophically for small w, so switch to its Taylor series.
inline double alpha_cm1(double c, double w) {
  if (w < 1e-3) {
    const double t4 = c * (c - 1.0) * (c - 2.0) * (c - 3.0) / 120.0;
    const double t3 = -c * (c - 1.0) * (c - 2.0) / 24.0;
    const double t2 = c * (c - 1.0) / 6.0;
    const double t1 = -c / 2.0;
    return w * (t1 + w * (t2 + w * (t3 + w * t4)));
  }
  const double d = w * (c + 1.0);
  return (-std::expm1((c + 1.0) * std::log1p(-w)) - d) / d;
}

// I(shape) = 2 * int_0^(1/2) (alpha_{2 shape}(w) - 1) w^(-shape-1) (1-w)^(-shape-1) dw,
// computed on [eps, 1/2] with the head integral added in closed form from the
// leading -c w / 2 behavior of the first factor.
inline double overlap_integral(double shape) {
  const double c = 2.0 * shape;
  constexpr double eps = 1e-12;
  auto f = [&](double w) {
    return alpha_cm1(c, w) * std::pow(w, -shape - 1.0) *
           std::pow(1.0 - w, -shape - 1.0);
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  double val = integrator.integrate(f, eps, 0.5, 1e-12, &err, &l1);
  if (err * l1 > 1e-9)
    throw std::runtime_error("overlap_integral: quadrature did not reach tolerance");
  val += (-c / 2.0) * std::pow(eps, 1.0 - shape) / (1.0 - shape);
  return 2.0 * val;
}

}  // namespace impl

// Asymptotic variance of sqrt(m) times the mean estimation error, normalized
// by the block-maximum scaling; the sliding and circular variants share one
// value, which never exceeds the disjoint one.
inline double asy_var_mean(double shape, blocks::Method method) {
  if (!(shape < 0.5))
    throw std::invalid_argument("asy_var_mean: needs shape < 1/2");
  using boost::math::tgamma;
  if (method == blocks::Method::disjoint) {
    if (std::abs(shape) < dist::shape_eps) return pi * pi / 6.0;
    const double g1 = tgamma(1.0 - shape);
    return (tgamma(1.0 - 2.0 * shape) - g1 * g1) / (shape * shape);
  }
  if (std::abs(shape) < dist::shape_eps) return 4.0 * (std::log(4.0) - 1.0);
  const double I = impl::overlap_integral(shape);
  if (shape < 0.0) return 2.0 * tgamma(-2.0 * shape) * I;
  return -(tgamma(1.0 - 2.0 * shape) / shape) * I;
}

// ---- Frechet shape/scale limit theory (heavy-tailed case) ----

// M(alpha0) = (6/pi^2) [[a0^2, a0 (1-g_E), -a0^2], [g_E - 1, -(G''(2)+1)/a0, 1-g_E]]
inline std::array<std::array<double, 3>, 2> m_matrix(double alpha0) {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("m_matrix: alpha0 must be positive");
  const double s = 6.0 / (pi * pi);
  const double g2 = gamma_second_derivative_at_2();
  return {{{s * alpha0 * alpha0, s * alpha0 * (1.0 - euler_gamma),
            -s * alpha0 * alpha0},
           {s * (euler_gamma - 1.0), -s * (g2 + 1.0) / alpha0,
            s * (1.0 - euler_gamma)}}};
}

// Limit covariance of the sliding-blocks Frechet MLE (shape, scale) pair.
inline std::array<std::array<double, 2>, 2> asy_cov_frechet_sliding(double alpha0) {
  if (!(alpha0 > 0.0))
    throw std::invalid_argument("asy_cov_frechet_sliding: alpha0 must be positive");
  return {{{0.4946 * alpha0 * alpha0, -0.3236},
           {-0.3236, 0.9578 / (alpha0 * alpha0)}}};
}

// ---- Monte Carlo experiment harness ----

struct ModelConfig {
  enum class Family { gpd, pareto };
  Family family = Family::gpd;
  double shape = 0.0;  // gamma for gpd marginals, alpha for pareto marginals
  double beta = 0.0;   // recursion dependence parameter
};

enum class TargetKind { mean, return_level, frechet_shape };

inline const char* target_kind_name(TargetKind t) {
  switch (t) {
    case TargetKind::mean: return "mean";
    case TargetKind::return_level: return "return_level";
    case TargetKind::frechet_shape: return "frechet_shape";
  }
  return "?";
}

struct TargetSpec {
  TargetKind kind = TargetKind::mean;
  double horizon = 100.0;  // return-level T
};

// For the sliding method, k selects the circular scheme whose bootstrap
// errors the interval borrows (the sliding series has no consistent
// resampling of its own).
struct MethodSpec {
  blocks::Method method = blocks::Method::disjoint;
  int k = 2;
};

inline std::string method_label(const MethodSpec& ms) {
  if (ms.method == blocks::Method::circular)
    return "circular(k=" + std::to_string(ms.k) + ")";
  return blocks::method_name(ms.method);
}

struct ExperimentSpec {
  ModelConfig model;
  TargetSpec target;
  int r = 100;
  std::vector<int> m_grid;
  std::vector<MethodSpec> methods;
  int N = 100;
  int B = 400;
  double level = 0.95;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct MetricsRow {
  std::string method;
  int m = 0;
  double mse = 0.0;
  double variance = 0.0;
  double bias_sq = 0.0;
  double coverage = 0.0;
  double avg_width = 0.0;
  double rel_mse = 1.0;    // vs the disjoint row of the same m
  double rel_width = 1.0;
};

struct MetricsTable {
  double true_value = 0.0;
  std::vector<MetricsRow> rows;
};

inline double true_target(const ModelConfig& model, const TargetSpec& target, int r) {
  switch (target.kind) {
    case TargetKind::mean:
      return model.family == ModelConfig::Family::gpd
                 ? sim::true_block_mean(r, model.shape, model.beta)
                 : sim::true_block_mean_pareto(r, model.shape, model.beta);
    case TargetKind::return_level:
      return model.family == ModelConfig::Family::gpd
                 ? sim::true_return_level(target.horizon, r, model.shape, model.beta)
                 : sim::true_return_level_pareto(target.horizon, r, model.shape,
                                                 model.beta);
    case TargetKind::frechet_shape:
      if (model.family != ModelConfig::Family::pareto)
        throw std::invalid_argument(
            "true_target: the frechet_shape target needs pareto marginals");
      return model.shape;
  }
  throw std::logic_error("true_target: unknown target");
}

namespace impl {

inline boot::Estimator make_estimator(const TargetSpec& t) {
  boot::Estimator e;
  switch (t.kind) {
    case TargetKind::mean: e.target = boot::Target::mean; break;
    case TargetKind::frechet_shape: e.target = boot::Target::frechet_mle; break;
    case TargetKind::return_level:
      e.target = boot::Target::return_level;
      e.horizon = t.horizon;
      break;
  }
  return e;
}

inline std::vector<double> simulate(const ModelConfig& model, std::size_t n,
                                    std::uint64_t key) {
  if (model.family == ModelConfig::Family::gpd)
    return sim::simulate_armax_gpd({model.shape, model.beta, n, key, 0});
  return sim::simulate_armax_pareto({model.shape, model.beta, n, key, 0});
}

inline void check_experiment(const ExperimentSpec& spec) {
  if (spec.N < 1) throw std::invalid_argument("experiment: N must be >= 1");
  if (spec.r < 1) throw std::invalid_argument("experiment: r must be >= 1");
  if (spec.m_grid.empty() || spec.methods.empty())
    throw std::invalid_argument("experiment: empty m grid or method list");
  for (int m : spec.m_grid)
    if (m < 1) throw std::invalid_argument("experiment: m must be >= 1");
  for (const auto& ms : spec.methods) {
    if (ms.k < 1) throw std::invalid_argument("experiment: k must be >= 1");
    const int k_needed = ms.method == blocks::Method::disjoint ? 1 : ms.k;
    for (int m : spec.m_grid)
      if (m < k_needed)
        throw std::invalid_argument("experiment: m must be >= k for circular schemes");
  }
  if (target_kind_name(spec.target.kind) == std::string("?"))
    throw std::invalid_argument("experiment: unknown target");
  true_target(spec.model, spec.target, spec.r);  // validates model/target pairing
}

struct CellAccumulator {
  std::vector<double> estimate;
  std::vector<double> lower, upper;
  std::vector<char> ok;
};

}  // namespace impl

// For each (method, m) cell: N fresh series, the method's point estimate and
// bootstrap interval on each, aggregated against the analytic target value.
// Replication i of cell m draws its series from a stream derived from
// (seed, m-index, i), so results are identical for any thread count.
inline MetricsTable run_experiment(const ExperimentSpec& spec) {
  impl::check_experiment(spec);
  MetricsTable table;
  table.true_value = true_target(spec.model, spec.target, spec.r);
  const double truth = table.true_value;
  const auto estimator = impl::make_estimator(spec.target);
  const std::size_t n_methods = spec.methods.size();
  const std::size_t N = static_cast<std::size_t>(spec.N);

  for (std::size_t mi = 0; mi < spec.m_grid.size(); ++mi) {
    const int m = spec.m_grid[mi];
    const std::size_t n =
        static_cast<std::size_t>(m) * static_cast<std::size_t>(spec.r);
    const std::uint64_t series_key = Rng::derive(Rng::derive(spec.seed, 1), mi);
    const std::uint64_t boot_key = Rng::derive(Rng::derive(spec.seed, 2), mi);

    std::vector<impl::CellAccumulator> cells(n_methods);
    for (auto& c : cells) {
      c.estimate.assign(N, 0.0);
      c.lower.assign(N, 0.0);
      c.upper.assign(N, 0.0);
      c.ok.assign(N, 0);
    }

    detail::parallel_for(N, spec.threads, [&](std::size_t i) {
      const auto x = impl::simulate(spec.model, n, Rng::derive(series_key, i));
      for (std::size_t mj = 0; mj < n_methods; ++mj) {
        const auto& ms = spec.methods[mj];
        boot::Spec bs;
        bs.B = spec.B;
        bs.level = spec.level;
        bs.seed = Rng::derive(Rng::derive(boot_key, mj), i);
        bs.estimator = estimator;
        bs.threads = 1;
        try {
          boot::CiResult res;
          switch (ms.method) {
            case blocks::Method::disjoint:
              bs.scheme = {blocks::Method::disjoint, spec.r, 1};
              res = boot::bootstrap_ci(x, bs);
              break;
            case blocks::Method::circular:
              bs.scheme = {blocks::Method::circular, spec.r, ms.k};
              res = boot::bootstrap_ci(x, bs);
              break;
            case blocks::Method::sliding:
              bs.scheme = {blocks::Method::circular, spec.r, ms.k};
              res = boot::sliding_circular_ci(x, bs);
              break;
          }
          cells[mj].estimate[i] = res.anchor_estimate;
          cells[mj].lower[i] = res.interval.lower;
          cells[mj].upper[i] = res.interval.upper;
          cells[mj].ok[i] = 1;
        } catch (const fit::FitError&) {
          cells[mj].ok[i] = 0;
        } catch (const boot::BootstrapError&) {
          cells[mj].ok[i] = 0;
        }
      }
    });

    std::optional<double> disjoint_mse, disjoint_width;
    std::vector<MetricsRow> block;
    for (std::size_t mj = 0; mj < n_methods; ++mj) {
      const auto& c = cells[mj];
      std::size_t used = 0;
      for (char f : c.ok) used += f != 0;
      const std::size_t failures = N - used;
      if (20 * failures > N)
        throw boot::BootstrapError(
            boot::BootstrapError::Kind::too_many_failures,
            "experiment: more than 5% of replications failed for method " +
                method_label(spec.methods[mj]) + " at m=" + std::to_string(m));
      if (used == 0)
        throw boot::BootstrapError(boot::BootstrapError::Kind::too_many_failures,
                                   "experiment: no successful replications");

      detail::KahanSum est_sum;
      for (std::size_t i = 0; i < N; ++i)
        if (c.ok[i]) est_sum.add(c.estimate[i]);
      const double mean_est = est_sum.value() / static_cast<double>(used);

      detail::KahanSum var_sum, mse_sum, width_sum;
      std::size_t covered = 0;
      for (std::size_t i = 0; i < N; ++i) {
        if (!c.ok[i]) continue;
        const double d = c.estimate[i] - mean_est;
        var_sum.add(d * d);
        const double e = c.estimate[i] - truth;
        mse_sum.add(e * e);
        width_sum.add(c.upper[i] - c.lower[i]);
        covered += c.lower[i] <= truth && truth <= c.upper[i];
      }

      MetricsRow row;
      row.method = method_label(spec.methods[mj]);
      row.m = m;
      row.mse = mse_sum.value() / static_cast<double>(used);
      row.variance = var_sum.value() / static_cast<double>(used);
      row.bias_sq = (mean_est - truth) * (mean_est - truth);
      row.coverage = static_cast<double>(covered) / static_cast<double>(used);
      row.avg_width = width_sum.value() / static_cast<double>(used);
      if (spec.methods[mj].method == blocks::Method::disjoint) {
        disjoint_mse = row.mse;
        disjoint_width = row.avg_width;
      }
      block.push_back(std::move(row));
    }
    for (auto& row : block) {
      row.rel_mse = disjoint_mse ? row.mse / *disjoint_mse
                                 : std::numeric_limits<double>::quiet_NaN();
      row.rel_width = disjoint_width ? row.avg_width / *disjoint_width
                                     : std::numeric_limits<double>::quiet_NaN();
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

// Empirical variance of a block-maxima estimator over N independent series;
// the reference scale for judging bootstrap variance estimates.
struct PresimSpec {
  ModelConfig model;
  TargetSpec target;
  blocks::Method method = blocks::Method::sliding;
  int k = 2;  // circular only
  int r = 100;
  int m = 50;
  int N = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
};

inline double presimulate_variance(const PresimSpec& spec) {
  if (spec.N < 2) throw std::invalid_argument("presimulate_variance: N must be >= 2");
  const auto estimator = impl::make_estimator(spec.target);
  const std::size_t n =
      static_cast<std::size_t>(spec.m) * static_cast<std::size_t>(spec.r);
  const std::uint64_t series_key = Rng::derive(spec.seed, 3);
  const std::size_t N = static_cast<std::size_t>(spec.N);
  std::vector<double> est(N, 0.0);
  std::vector<char> ok(N, 0);
  detail::parallel_for(N, spec.threads, [&](std::size_t i) {
    const auto x = impl::simulate(spec.model, n, Rng::derive(series_key, i));
    fit::WeightedSample sample;
    switch (spec.method) {
      case blocks::Method::disjoint:
        sample = fit::WeightedSample::of_runs(blocks::disjoint_maxima(x, spec.r).values);
        break;
      case blocks::Method::sliding:
        sample = fit::WeightedSample::of_runs(blocks::sliding_maxima(x, spec.r).values);
        break;
      case blocks::Method::circular:
        sample =
            fit::WeightedSample::of_runs(blocks::circmax(x, spec.r, spec.k).values);
        break;
    }
    try {
      est[i] = boot::evaluate(estimator, sample);
      ok[i] = 1;
    } catch (const fit::FitError&) {
      ok[i] = 0;
    }
  });
  std::vector<double> kept;
  kept.reserve(N);
  for (std::size_t i = 0; i < N; ++i)
    if (ok[i]) kept.push_back(est[i]);
  const std::size_t failures = N - kept.size();
  if (20 * failures > N)
    throw boot::BootstrapError(boot::BootstrapError::Kind::too_many_failures,
                               "presimulate_variance: more than 5% of runs failed");
  return boot::bootstrap_variance(std::span<const double>(kept));
}

}  // namespace blockmax::mc
