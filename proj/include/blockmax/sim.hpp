#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "blockmax/dist.hpp"
#include "blockmax/rng.hpp"

namespace blockmax::sim {

// Max-autoregressive recursion Y_t = max(beta*Y_{t-1}, (1-beta)*W_t) with
// i.i.d. unit-Frechet innovations W_t and Y_0 drawn from the exact stationary
// law (unit Frechet), then mapped through a marginal quantile transform.
// beta = 0 gives an i.i.d. series; larger beta gives stronger clustering.

struct GpdSeriesSpec {
  double shape = 0.0;
  double beta = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // series index within the seed
};

struct ParetoSeriesSpec {
  double alpha = 1.0;  // Pareto tail index, survival x^-alpha on (1,inf)
  double beta = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

namespace impl {

inline void check_armax(double beta, std::size_t n, const char* who) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument(std::string(who) + ": beta must lie in [0,1)");
  if (n < 1) throw std::invalid_argument(std::string(who) + ": n must be >= 1");
}

inline double frechet1(Rng& g) { return -1.0 / std::log(g.uniform_pos()); }

// Emits q_t = 1 - F_W(Y_t) per step; working on the survival scale keeps the
// marginal transform exact even for the largest latent values.
template <class F>
void run_armax(double beta, std::size_t n, Rng g, F&& emit) {
  double y = frechet1(g);
  for (std::size_t t = 0; t < n; ++t) {
    y = std::max(beta * y, (1.0 - beta) * frechet1(g));
    emit(-std::expm1(-1.0 / y));
  }
}

}  // namespace impl

inline std::vector<double> simulate_armax_gpd(const GpdSeriesSpec& s) {
  impl::check_armax(s.beta, s.n, "simulate_armax_gpd");
  std::vector<double> x;
  x.reserve(s.n);
  impl::run_armax(s.beta, s.n, Rng(Rng::derive(s.seed, s.stream)),
                  [&](double q) { x.push_back(dist::gpd_quantile_comp(q, s.shape)); });
  return x;
}

inline std::vector<double> simulate_armax_pareto(const ParetoSeriesSpec& s) {
  impl::check_armax(s.beta, s.n, "simulate_armax_pareto");
  if (!(s.alpha > 0.0))
    throw std::invalid_argument("simulate_armax_pareto: alpha must be positive");
  std::vector<double> x;
  x.reserve(s.n);
  impl::run_armax(s.beta, s.n, Rng(Rng::derive(s.seed, s.stream)),
                  [&](double q) { x.push_back(std::exp(-std::log(q) / s.alpha)); });
  return x;
}

// A block maximum of length r has distribution F(x)^(beta+(1-beta)r) under
// the recursion above; everything below follows from that identity.

inline double effective_block_count(int r, double beta) {
  return beta + (1.0 - beta) * static_cast<double>(r);
}

inline void check_block_model(int r, double beta, const char* who) {
  if (r < 1) throw std::invalid_argument(std::string(who) + ": r must be >= 1");
  if (!(beta >= 0.0 && beta < 1.0))
    throw std::invalid_argument(std::string(who) + ": beta must lie in [0,1)");
}

// T-period return level of the r-block maximum in the GPD-marginal model.
inline double true_return_level(double T, int r, double shape, double beta) {
  check_block_model(r, beta, "true_return_level");
  if (!(T > 1.0)) throw std::invalid_argument("true_return_level: T must exceed 1");
  const double c = effective_block_count(r, beta);
  // survival of the block-max quantile: 1 - (1-1/T)^(1/c)
  const double q = -std::expm1(std::log1p(-1.0 / T) / c);
  return dist::gpd_quantile_comp(q, shape);
}

// Expected r-block maximum.  Integrates over the marginal survival level q of
// the block-max quantile, E M = int_0^1 Q(q) c (1-q)^(c-1) dq, which puts the
// q^-shape singularity at 0 where the quadrature keeps full resolution.
inline double true_block_mean(int r, double shape, double beta) {
  check_block_model(r, beta, "true_block_mean");
  if (!(shape < 1.0))
    throw std::invalid_argument("true_block_mean: needs shape < 1 for a finite mean");
  const double c = effective_block_count(r, beta);
  auto integrand = [&](double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;
    return dist::gpd_quantile_comp(q, shape) * c *
           std::exp((c - 1.0) * std::log1p(-q));
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double mu = integrator.integrate(integrand, 0.0, 1.0, 1e-12, &err, &l1);
  if (err * l1 > 1e-8 * std::max(1.0, std::abs(mu)))
    throw std::runtime_error("true_block_mean: quadrature did not reach tolerance");
  return mu;
}

// Same block-maximum identities for the Pareto marginal (survival x^-alpha).

inline double true_return_level_pareto(double T, int r, double alpha, double beta) {
  check_block_model(r, beta, "true_return_level_pareto");
  if (!(alpha > 0.0))
    throw std::invalid_argument("true_return_level_pareto: alpha must be positive");
  if (!(T > 1.0))
    throw std::invalid_argument("true_return_level_pareto: T must exceed 1");
  const double c = effective_block_count(r, beta);
  const double q = -std::expm1(std::log1p(-1.0 / T) / c);
  return std::exp(-std::log(q) / alpha);
}

inline double true_block_mean_pareto(int r, double alpha, double beta) {
  check_block_model(r, beta, "true_block_mean_pareto");
  if (!(alpha > 1.0))
    throw std::invalid_argument(
        "true_block_mean_pareto: needs alpha > 1 for a finite mean");
  const double c = effective_block_count(r, beta);
  auto integrand = [&](double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;
    return std::exp(-std::log(q) / alpha + (c - 1.0) * std::log1p(-q)) * c;
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0, l1 = 0.0;
  const double mu = integrator.integrate(integrand, 0.0, 1.0, 1e-12, &err, &l1);
  if (err * l1 > 1e-8 * std::max(1.0, std::abs(mu)))
    throw std::runtime_error("true_block_mean_pareto: quadrature did not reach tolerance");
  return mu;
}

struct Norming {
  double a = 1.0;  // scale
  double b = 0.0;  // location
};

// Norming constants for the r-block maximum: with s = r*(1-beta),
// a = s^shape and b = (s^shape - 1)/shape (log s in the shape->0 limit).
inline Norming norming_constants(int r, double shape, double beta) {
  check_block_model(r, beta, "norming_constants");
  const double ls = std::log(static_cast<double>(r) * (1.0 - beta));
  if (std::abs(shape) < dist::shape_eps) return {1.0, ls};
  return {std::exp(shape * ls), std::expm1(shape * ls) / shape};
}

}  // namespace blockmax::sim
