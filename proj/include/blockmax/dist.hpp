#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace blockmax::dist {

// Shapes with |shape| below this are evaluated with the exponential/Gumbel
// limit formulas; keeps every function continuous through shape = 0.
inline constexpr double shape_eps = 1e-9;

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

struct GevParams {
  double loc = 0.0;
  double scale = 1.0;
  double shape = 0.0;
};

struct FrechetParams {
  double shape = 1.0;  // often written alpha
  double scale = 1.0;
};

// ---- generalized Pareto, standardized to loc 0 / scale 1 -------------------

inline double gpd_cdf(double x, double shape) {
  if (x <= 0.0) return 0.0;
  if (std::abs(shape) < shape_eps) return -std::expm1(-x);
  const double t = shape * x;
  if (shape < 0.0 && t <= -1.0) return 1.0;  // past the upper endpoint -1/shape
  return -std::expm1(-std::log1p(t) / shape);
}

inline double gpd_pdf(double x, double shape) {
  if (x < 0.0) return 0.0;
  if (std::abs(shape) < shape_eps) return std::exp(-x);
  const double t = shape * x;
  if (shape < 0.0 && t <= -1.0) return 0.0;
  return std::exp(-(1.0 / shape + 1.0) * std::log1p(t));
}

// Quantile in terms of the survival probability q = 1-p; exact near p = 1.
inline double gpd_quantile_comp(double q, double shape) {
  if (std::abs(shape) < shape_eps) return -std::log(q);
  return std::expm1(-shape * std::log(q)) / shape;
}

inline double gpd_quantile(double p, double shape) {
  if (!(p >= 0.0 && p < 1.0))
    throw std::invalid_argument("gpd_quantile: p must lie in [0,1)");
  if (p == 0.0) return 0.0;
  if (std::abs(shape) < shape_eps) return -std::log1p(-p);
  return std::expm1(-shape * std::log1p(-p)) / shape;
}

// ---- generalized extreme value ---------------------------------------------

inline void check_scale(double scale, const char* who) {
  if (!(scale > 0.0)) throw std::invalid_argument(std::string(who) + ": scale must be positive");
}

inline double gev_cdf(double x, const GevParams& p) {
  check_scale(p.scale, "gev_cdf");
  const double z = (x - p.loc) / p.scale;
  if (std::abs(p.shape) < shape_eps) return std::exp(-std::exp(-z));
  const double t = 1.0 + p.shape * z;
  if (t <= 0.0) return p.shape > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log(t) / p.shape));
}

inline double gev_quantile(double p, const GevParams& th) {
  check_scale(th.scale, "gev_quantile");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("gev_quantile: p must lie in (0,1)");
  const double l = -std::log(p);
  if (std::abs(th.shape) < shape_eps) return th.loc - th.scale * std::log(l);
  return th.loc + th.scale * std::expm1(-th.shape * std::log(l)) / th.shape;
}

// Log density contribution; -inf outside the support or for invalid
// parameters, so optimizers can treat violations as a penalty.
inline double gev_loglik(const GevParams& p, double x) {
  if (!(p.scale > 0.0)) return neg_inf;
  const double z = (x - p.loc) / p.scale;
  if (std::abs(p.shape) < shape_eps)
    return -std::log(p.scale) - z - std::exp(-z);
  const double t = 1.0 + p.shape * z;
  if (t <= 0.0) return neg_inf;
  const double lt = std::log(t);
  return -std::log(p.scale) - (1.0 + 1.0 / p.shape) * lt - std::exp(-lt / p.shape);
}

inline double gev_pdf(double x, const GevParams& p) {
  check_scale(p.scale, "gev_pdf");
  const double ll = gev_loglik(p, x);
  return ll == neg_inf ? 0.0 : std::exp(ll);
}

// ---- Frechet ----------------------------------------------------------------

inline double frechet_cdf(double x, const FrechetParams& p) {
  if (!(p.shape > 0.0 && p.scale > 0.0))
    throw std::invalid_argument("frechet_cdf: shape and scale must be positive");
  if (x <= 0.0) return 0.0;
  return std::exp(-std::exp(-p.shape * std::log(x / p.scale)));
}

inline double frechet_quantile(double q, const FrechetParams& p) {
  if (!(p.shape > 0.0 && p.scale > 0.0))
    throw std::invalid_argument("frechet_quantile: shape and scale must be positive");
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("frechet_quantile: p must lie in (0,1)");
  return p.scale * std::exp(-std::log(-std::log(q)) / p.shape);
}

// Log density contribution at x > 0 (callers truncate nonpositive data before
// fitting); powers evaluated as exp(-shape*log(x/scale)) for stability.
inline double frechet_loglik(const FrechetParams& p, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("frechet_loglik: x must be positive");
  if (!(p.shape > 0.0 && p.scale > 0.0)) return neg_inf;
  const double lr = std::log(x / p.scale);
  return std::log(p.shape / p.scale) - std::exp(-p.shape * lr) - (p.shape + 1.0) * lr;
}

inline double frechet_pdf(double x, const FrechetParams& p) {
  if (!(p.shape > 0.0 && p.scale > 0.0))
    throw std::invalid_argument("frechet_pdf: shape and scale must be positive");
  if (x <= 0.0) return 0.0;
  return std::exp(frechet_loglik(p, x));
}

}  // namespace blockmax::dist
