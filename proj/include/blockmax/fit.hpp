#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "blockmax/detail/numerics.hpp"
#include "blockmax/dist.hpp"

namespace blockmax::fit {

struct FitError : std::runtime_error {
  enum class Kind { all_tied, degenerate, no_convergence };
  Kind kind;
  FitError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

struct WeightedValue {
  double value = 0.0;
  double weight = 0.0;
};

// A sample with nonnegative multiplicities.  All estimators in this library
// depend on the data only through such weighted samples, which is what makes
// block-resampling cheap: resampled series never have to be materialized.
struct WeightedSample {
  std::vector<WeightedValue> items;

  static WeightedSample of(std::span<const double> xs) {
    WeightedSample s;
    s.items.reserve(xs.size());
    for (double x : xs) s.items.push_back({x, 1.0});
    return s;
  }

  // Unit-weight sample with adjacent equal values merged; estimator results
  // are unchanged, evaluation cost often drops by the mean run length.
  static WeightedSample of_runs(std::span<const double> xs) {
    WeightedSample s;
    for (double x : xs) {
      if (!s.items.empty() && s.items.back().value == x)
        s.items.back().weight += 1.0;
      else
        s.items.push_back({x, 1.0});
    }
    return s;
  }

  double total_weight() const {
    detail::KahanSum w;
    for (const auto& it : items) w.add(it.weight);
    return w.value();
  }
};

namespace impl {

inline void check_sample(const WeightedSample& s, const char* who) {
  if (s.items.empty())
    throw std::invalid_argument(std::string(who) + ": empty sample");
  bool positive = false;
  for (const auto& it : s.items) {
    if (!std::isfinite(it.value))
      throw std::invalid_argument(std::string(who) + ": nonfinite value");
    if (!(it.weight >= 0.0) || !std::isfinite(it.weight))
      throw std::invalid_argument(std::string(who) + ": negative or nonfinite weight");
    if (it.weight > 0.0) positive = true;
  }
  if (!positive)
    throw std::invalid_argument(std::string(who) + ": total weight is zero");
}

inline std::size_t count_distinct(const WeightedSample& s, std::size_t cap) {
  std::vector<double> vals;
  vals.reserve(s.items.size());
  for (const auto& it : s.items)
    if (it.weight > 0.0) vals.push_back(it.value);
  std::sort(vals.begin(), vals.end());
  std::size_t d = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i == 0 || vals[i] != vals[i - 1]) ++d;
    if (d >= cap) return d;
  }
  return d;
}

inline double weighted_median(const WeightedSample& s) {
  std::vector<WeightedValue> v(s.items.begin(), s.items.end());
  std::sort(v.begin(), v.end(),
            [](const WeightedValue& a, const WeightedValue& b) { return a.value < b.value; });
  const double half = 0.5 * [&] {
    detail::KahanSum w;
    for (const auto& it : v) w.add(it.weight);
    return w.value();
  }();
  double acc = 0.0;
  for (const auto& it : v) {
    acc += it.weight;
    if (acc >= half) return it.value;
  }
  return v.back().value;
}

}  // namespace impl

inline double weighted_mean(const WeightedSample& s) {
  impl::check_sample(s, "weighted_mean");
  detail::KahanSum num, den;
  for (const auto& it : s.items) {
    num.add(it.weight * it.value);
    den.add(it.weight);
  }
  return num.value() / den.value();
}

struct FrechetFit {
  dist::FrechetParams params;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct GevFit {
  dist::GevParams params;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Frechet maximum likelihood on max(value, trunc).  The scale is profiled
// out in closed form, scale(a)^a = sum(w) / sum(w * y^-a), and the shape
// solves the 1-D profile score by bracketed root finding.  Without an
// explicit truncation point, trunc = 1e-6 * weighted median.
inline FrechetFit fit_frechet(const WeightedSample& s,
                              std::optional<double> trunc = {}) {
  impl::check_sample(s, "fit_frechet");
  const double c = trunc ? *trunc : 1e-6 * impl::weighted_median(s);
  if (!(c > 0.0))
    throw std::invalid_argument("fit_frechet: truncation point must be positive");

  // z = log(max(value, trunc)), with zero-weight items dropped
  std::vector<double> z, w;
  z.reserve(s.items.size());
  w.reserve(s.items.size());
  for (const auto& it : s.items) {
    if (it.weight == 0.0) continue;
    z.push_back(std::log(std::max(it.value, c)));
    w.push_back(it.weight);
  }
  const double zmin = *std::min_element(z.begin(), z.end());
  const double zmax = *std::max_element(z.begin(), z.end());
  if (zmax == zmin)
    throw FitError(FitError::Kind::all_tied,
                   "fit_frechet: all truncated values are identical");

  detail::KahanSum Wsum, Ssum;
  for (std::size_t i = 0; i < z.size(); ++i) {
    Wsum.add(w[i]);
    Ssum.add(w[i] * z[i]);
  }
  const double W = Wsum.value();
  const double S = Ssum.value();

  int evals = 0;
  // profile score in the shape; strictly decreasing with a unique root
  auto score = [&](double a) {
    ++evals;
    detail::KahanSum t, tz;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double e = w[i] * std::exp(-a * (z[i] - zmin));
      t.add(e);
      tz.add(e * z[i]);
    }
    return W / a - S + W * tz.value() / t.value();
  };

  // geometric bracket expansion, capped at [1e-4, 1e4]
  constexpr double alpha_min = 1e-4, alpha_max = 1e4;
  double lo = 0.5, hi = 2.0;
  double flo = score(lo), fhi = score(hi);
  while (flo < 0.0 && lo > alpha_min) {
    lo = std::max(0.1 * lo, alpha_min);
    flo = score(lo);
  }
  while (fhi > 0.0 && hi < alpha_max) {
    hi = std::min(10.0 * hi, alpha_max);
    fhi = score(hi);
  }
  if (!(flo > 0.0 && fhi < 0.0))
    throw FitError(FitError::Kind::no_convergence,
                   "fit_frechet: no profile-score sign change in [1e-4, 1e4]");

  auto tol = [](double a, double b) { return b - a <= 1e-10 * std::min(a, b); };
  std::uintmax_t max_iter = 200;
  const auto bracket =
      boost::math::tools::toms748_solve(score, lo, hi, flo, fhi, tol, max_iter);
  const double alpha = 0.5 * (bracket.first + bracket.second);

  detail::KahanSum t;
  for (std::size_t i = 0; i < z.size(); ++i)
    t.add(w[i] * std::exp(-alpha * (z[i] - zmin)));
  const double log_sigma = (std::log(W) - std::log(t.value())) / alpha + zmin;

  FrechetFit fit;
  fit.params = {alpha, std::exp(log_sigma)};
  fit.converged = true;
  fit.iterations = evals;
  // log density in log space: log a - log sigma - (y/sigma)^-a - (a+1) log(y/sigma)
  detail::KahanSum ll;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double lr = z[i] - log_sigma;
    ll.add(w[i] *
           (std::log(alpha) - log_sigma - std::exp(-alpha * lr) - (alpha + 1.0) * lr));
  }
  fit.loglik = ll.value();
  return fit;
}

// GEV maximum pseudo-likelihood by Nelder-Mead with support violations scored
// -inf.  Started from Gumbel moment estimates; convergence is a simplex
// diameter below 1e-8 in coordinates scaled by the starting dispersion.
inline GevFit fit_gev(const WeightedSample& s) {
  impl::check_sample(s, "fit_gev");
  if (impl::count_distinct(s, 3) < 3)
    throw FitError(FitError::Kind::degenerate,
                   "fit_gev: needs at least three distinct values");

  const double mean = weighted_mean(s);
  detail::KahanSum ssq, wsum;
  for (const auto& it : s.items) {
    ssq.add(it.weight * (it.value - mean) * (it.value - mean));
    wsum.add(it.weight);
  }
  const double sd = std::sqrt(ssq.value() / wsum.value());
  constexpr double euler_gamma = 0.57721566490153286;
  const double scale0 = sd * std::sqrt(6.0) / 3.14159265358979323846;
  const double loc0 = mean - euler_gamma * scale0;

  auto loglik = [&](const std::array<double, 3>& p) {
    if (!(p[1] > 0.0)) return dist::neg_inf;
    const dist::GevParams th{p[0], p[1], p[2]};
    detail::KahanSum acc;
    for (const auto& it : s.items) {
      if (it.weight == 0.0) continue;
      const double ll = dist::gev_loglik(th, it.value);
      if (ll == dist::neg_inf) return dist::neg_inf;
      acc.add(it.weight * ll);
    }
    return acc.value();
  };

  std::array<double, 3> start{loc0, scale0, 0.1};
  if (loglik(start) == dist::neg_inf) {
    bool found = false;
    for (double g0 : {0.5, 1.0, -0.1, 2.0}) {
      start[2] = g0;
      if (loglik(start) != dist::neg_inf) {
        found = true;
        break;
      }
    }
    if (!found)
      throw FitError(FitError::Kind::no_convergence,
                     "fit_gev: no feasible starting point");
  }

  const std::array<double, 3> step{0.3 * scale0, 0.5 * scale0, 0.25};
  const std::array<double, 3> scale{scale0, scale0, 1.0};
  const auto res = detail::nelder_mead3(loglik, start, step, scale, 1e-8, 5000);
  if (!res.converged)
    throw FitError(FitError::Kind::no_convergence,
                   "fit_gev: simplex did not converge within the iteration cap");

  GevFit fit;
  fit.params = {res.x[0], res.x[1], res.x[2]};
  fit.loglik = res.fmax;
  fit.converged = true;
  fit.iterations = res.iterations;
  return fit;
}

// Plug-in T-period return level from fitted GEV parameters.
inline double return_level_from_gev(const dist::GevParams& p, double T) {
  dist::check_scale(p.scale, "return_level_from_gev");
  if (!(T > 1.0))
    throw std::invalid_argument("return_level_from_gev: T must exceed 1");
  const double log_ct = std::log(-std::log1p(-1.0 / T));
  if (std::abs(p.shape) < dist::shape_eps) return p.loc - p.scale * log_ct;
  return p.loc + p.scale * std::expm1(-p.shape * log_ct) / p.shape;
}

}  // namespace blockmax::fit
