#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockmax/blocks.hpp"
#include "blockmax/detail/numerics.hpp"
#include "blockmax/fit.hpp"
#include "blockmax/rng.hpp"

namespace blockmax::boot {

struct BootstrapError : std::runtime_error {
  enum class Kind { too_many_failures };
  Kind kind;
  BootstrapError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

enum class Target { mean, frechet_mle, gev_mle, return_level };

inline const char* target_name(Target t) {
  switch (t) {
    case Target::mean: return "mean";
    case Target::frechet_mle: return "frechet_mle";
    case Target::gev_mle: return "gev_mle";
    case Target::return_level: return "return_level";
  }
  return "?";
}

// Scalar functional the bootstrap tracks: the mean, the Frechet/GEV shape,
// or the T-period return level from a GEV fit.
struct Estimator {
  Target target = Target::mean;
  double horizon = 100.0;                // return-level T
  std::optional<double> frechet_trunc;   // forwarded to fit_frechet
};

inline double evaluate(const Estimator& e, const fit::WeightedSample& s) {
  switch (e.target) {
    case Target::mean:
      return fit::weighted_mean(s);
    case Target::frechet_mle:
      return fit::fit_frechet(s, e.frechet_trunc).params.shape;
    case Target::gev_mle:
      return fit::fit_gev(s).params.shape;
    case Target::return_level:
      return fit::return_level_from_gev(fit::fit_gev(s).params, e.horizon);
  }
  throw std::logic_error("evaluate: unknown estimator target");
}

enum class Correction { none, factor, automatic };

struct Spec {
  blocks::Scheme scheme;           // disjoint | circular(k) | sliding = naive resampling
  bool allow_inconsistent = false; // must be set to resample the sliding series
  int B = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  Estimator estimator;
  Correction correction = Correction::none;
  double factor = 1.0;             // used when correction == factor
  int threads = 1;
};

struct Replicates {
  std::vector<double> estimates;  // successful replicates, in replicate order
  int failures = 0;
};

struct IntervalEstimate {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  blocks::Method anchor = blocks::Method::disjoint;
};

namespace impl {

inline void check_spec(const Spec& s) {
  if (s.B < 20) throw std::invalid_argument("bootstrap: B must be >= 20");
  if (!(s.level > 0.0 && s.level < 1.0))
    throw std::invalid_argument("bootstrap: level must lie in (0,1)");
  if (s.correction == Correction::factor && !(s.factor >= 1.0))
    throw std::invalid_argument("bootstrap: correction factor must be >= 1");
  if (s.scheme.r < 1 || s.scheme.k < 1)
    throw std::invalid_argument("bootstrap: r and k must be >= 1");
  if (s.scheme.method == blocks::Method::sliding && !s.allow_inconsistent)
    throw std::invalid_argument(
        "bootstrap: resampling the sliding series underestimates the "
        "variance (known inconsistent); pass allow_inconsistent to run it anyway");
}

inline bool all_tied(const blocks::CompressedBlocks& cb) {
  for (const auto& run : cb.runs)
    if (run.value != cb.runs.front().value) return false;
  return true;
}

}  // namespace impl

// Maxima are computed once and kept compressed; every bootstrap replicate is
// a reweighting of these blocks.  The sliding scheme resamples kr-groups of
// the vanilla sliding-maxima series (demonstrably inconsistent, gated by the
// allow flag upstream); disjoint is the k = 1 circular scheme.
inline blocks::CompressedBlocks prepare_blocks(std::span<const double> x,
                                               const blocks::Scheme& scheme) {
  const std::size_t group =
      static_cast<std::size_t>(scheme.r) * static_cast<std::size_t>(scheme.k);
  switch (scheme.method) {
    case blocks::Method::disjoint: {
      blocks::Series s = blocks::disjoint_repeated(x, scheme.r);
      return blocks::compress_groups(s.values, static_cast<std::size_t>(scheme.r));
    }
    case blocks::Method::circular: {
      blocks::Series s = blocks::circmax(x, scheme.r, scheme.k);
      return blocks::compress_groups(s.values, group);
    }
    case blocks::Method::sliding: {
      blocks::Series s = blocks::sliding_maxima(x, scheme.r);
      const std::size_t usable = (s.values.size() / group) * group;
      if (usable == 0)
        throw std::invalid_argument(
            "bootstrap: sliding series shorter than one k*r group");
      s.values.resize(usable);
      return blocks::compress_groups(s.values, group);
    }
  }
  throw std::logic_error("prepare_blocks: unknown method");
}

// One multinomial(m, uniform) draw, returned as per-block counts.
inline std::vector<std::int64_t> resample_weights(std::size_t m, Rng& g) {
  if (m < 1) throw std::invalid_argument("resample_weights: m must be >= 1");
  std::vector<std::int64_t> w(m, 0);
  for (std::size_t i = 0; i < m; ++i) ++w[g.below(m)];
  return w;
}

inline fit::WeightedSample weighted_sample(const blocks::CompressedBlocks& cb,
                                           std::span<const std::int64_t> weights) {
  if (weights.size() != cb.block_count())
    throw std::invalid_argument("weighted_sample: one weight per block required");
  fit::WeightedSample s;
  s.items.reserve(cb.runs.size());
  for (std::size_t b = 0; b < cb.block_count(); ++b) {
    if (weights[b] == 0) continue;
    const double wb = static_cast<double>(weights[b]);
    for (std::size_t j = cb.block_begin[b]; j < cb.block_begin[b + 1]; ++j)
      s.items.push_back({cb.runs[j].value,
                         wb * static_cast<double>(cb.runs[j].count)});
  }
  return s;
}

inline fit::WeightedSample unit_sample(const blocks::CompressedBlocks& cb) {
  fit::WeightedSample s;
  s.items.reserve(cb.runs.size());
  for (const auto& run : cb.runs)
    s.items.push_back({run.value, static_cast<double>(run.count)});
  return s;
}

inline double replicate_estimate(const blocks::CompressedBlocks& cb,
                                 std::span<const std::int64_t> weights,
                                 const Estimator& e) {
  return evaluate(e, weighted_sample(cb, weights));
}

inline double point_estimate(const blocks::CompressedBlocks& cb, const Estimator& e) {
  return evaluate(e, unit_sample(cb));
}

// Replicate b draws its weights from a stream derived from (seed, b), so the
// result is identical for any thread count or execution order.  Estimator
// failures are recorded and skipped; more than 5% of B aborts the run.
inline Replicates bootstrap_replicates_blocks(const blocks::CompressedBlocks& cb,
                                              const Spec& spec) {
  impl::check_spec(spec);
  const std::size_t m = cb.block_count();
  if (m < 1) throw std::invalid_argument("bootstrap: no blocks to resample");

  const std::size_t B = static_cast<std::size_t>(spec.B);
  std::vector<double> slot(B, 0.0);
  std::vector<char> ok(B, 0);
  detail::parallel_for(B, spec.threads, [&](std::size_t b) {
    Rng g(Rng::derive(spec.seed, b));
    const auto w = resample_weights(m, g);
    try {
      slot[b] = replicate_estimate(cb, w, spec.estimator);
      ok[b] = 1;
    } catch (const fit::FitError&) {
      ok[b] = 0;
    }
  });

  Replicates reps;
  reps.estimates.reserve(B);
  for (std::size_t b = 0; b < B; ++b) {
    if (ok[b])
      reps.estimates.push_back(slot[b]);
    else
      ++reps.failures;
  }
  if (20 * reps.failures > spec.B)
    throw BootstrapError(BootstrapError::Kind::too_many_failures,
                         "bootstrap: more than 5% of replicates failed (" +
                             std::to_string(reps.failures) + " of " +
                             std::to_string(spec.B) + ")");
  return reps;
}

inline Replicates bootstrap_replicates(std::span<const double> x, const Spec& spec) {
  impl::check_spec(spec);
  return bootstrap_replicates_blocks(prepare_blocks(x, spec.scheme), spec);
}

// Basic bootstrap interval from the order statistics of the estimation
// errors: [anchor - f*e_(ceil-index of 1-a/2), anchor - f*e_(index of a/2)],
// with 1-based index max(1, floor(q*B)) and no interpolation.
inline IntervalEstimate basic_ci(double anchor_estimate, std::vector<double> errors,
                                 double level, double factor = 1.0,
                                 blocks::Method anchor = blocks::Method::disjoint) {
  if (errors.size() < 20)
    throw std::invalid_argument("basic_ci: needs at least 20 bootstrap errors");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("basic_ci: level must lie in (0,1)");
  if (!(factor >= 1.0))
    throw std::invalid_argument("basic_ci: factor must be >= 1");
  std::sort(errors.begin(), errors.end());
  const double B = static_cast<double>(errors.size());
  const double alpha = 1.0 - level;
  // the 1e-9 nudge keeps q*B on the intended side when q has no exact
  // binary representation
  auto order_stat = [&](double q) {
    const auto idx = static_cast<std::size_t>(
        std::max(1.0, std::floor(q * B + 1e-9)));
    return errors[idx - 1];
  };
  IntervalEstimate ci;
  ci.point = anchor_estimate;
  ci.lower = anchor_estimate - factor * order_stat(1.0 - 0.5 * alpha);
  ci.upper = anchor_estimate - factor * order_stat(0.5 * alpha);
  ci.level = level;
  ci.anchor = anchor;
  return ci;
}

inline double bootstrap_variance(std::span<const double> estimates) {
  if (estimates.size() < 2)
    throw std::invalid_argument("bootstrap_variance: needs at least 2 estimates");
  detail::KahanSum sum;
  for (double e : estimates) sum.add(e);
  const double mean = sum.value() / static_cast<double>(estimates.size());
  detail::KahanSum ss;
  for (double e : estimates) ss.add((e - mean) * (e - mean));
  return ss.value() / static_cast<double>(estimates.size() - 1);
}

inline double bootstrap_variance(const Replicates& reps) {
  return bootstrap_variance(std::span<const double>(reps.estimates));
}

enum class CorrectionTarget { rl100, mean };

// Interval enlargement factors fitted by regression on simulation output,
// clamped below at 1.
inline double correction_factor(CorrectionTarget target, int m, double gamma_hat) {
  const double c = target == CorrectionTarget::rl100
                       ? 2.48 - 0.01 * static_cast<double>(m) + 0.68 * gamma_hat
                       : 1.222 - 0.001 * static_cast<double>(m) + 0.251 * gamma_hat;
  return std::max(1.0, c);
}

// The regression behind correction_factor was calibrated on m in [40,100]
// and shapes in [-0.2, 0.2]; outside that box the factor is extrapolation.
inline bool correction_in_calibrated_range(int m, double gamma_hat) {
  return m >= 40 && m <= 100 && gamma_hat >= -0.2 && gamma_hat <= 0.2;
}

struct CiResult {
  IntervalEstimate interval;
  Replicates replicates;
  double anchor_estimate = 0.0;   // estimate the interval is centered on
  double circular_estimate = 0.0; // point estimate of the resampled scheme
  double factor_used = 1.0;
  std::optional<double> gamma_hat;  // shape estimate behind an automatic factor
  std::optional<bool> factor_in_range;
};

namespace impl {

inline CorrectionTarget correction_target(const Estimator& e) {
  if (e.target == Target::mean) return CorrectionTarget::mean;
  if (e.target == Target::return_level) return CorrectionTarget::rl100;
  throw std::invalid_argument(
      "bootstrap: automatic correction factors exist only for the mean and "
      "return-level targets");
}

// Resolve the enlargement factor; automatic correction reads the shape off a
// GEV fit on the anchor sample and m off the disjoint block count.
inline void resolve_factor(const Spec& spec, const fit::WeightedSample& anchor_sample,
                           std::size_t n, CiResult& out) {
  switch (spec.correction) {
    case Correction::none:
      out.factor_used = 1.0;
      return;
    case Correction::factor:
      out.factor_used = spec.factor;
      return;
    case Correction::automatic: {
      const auto target = correction_target(spec.estimator);
      const int m_disjoint = static_cast<int>(n / static_cast<std::size_t>(spec.scheme.r));
      const double gamma_hat = fit::fit_gev(anchor_sample).params.shape;
      out.gamma_hat = gamma_hat;
      out.factor_in_range = correction_in_calibrated_range(m_disjoint, gamma_hat);
      out.factor_used = correction_factor(target, m_disjoint, gamma_hat);
      return;
    }
  }
}

}  // namespace impl

// Bootstrap interval anchored at the resampled scheme's own point estimate.
inline CiResult bootstrap_ci(std::span<const double> x, const Spec& spec) {
  impl::check_spec(spec);
  const auto cb = prepare_blocks(x, spec.scheme);
  if (impl::all_tied(cb))
    throw fit::FitError(fit::FitError::Kind::all_tied,
                        "bootstrap: every block maximum is identical");
  CiResult out;
  const auto anchor_sample = unit_sample(cb);
  out.anchor_estimate = evaluate(spec.estimator, anchor_sample);
  out.circular_estimate = out.anchor_estimate;
  impl::resolve_factor(spec, anchor_sample, x.size(), out);
  out.replicates = bootstrap_replicates_blocks(cb, spec);
  std::vector<double> errors;
  errors.reserve(out.replicates.estimates.size());
  for (double e : out.replicates.estimates) errors.push_back(e - out.anchor_estimate);
  out.interval = basic_ci(out.anchor_estimate, std::move(errors), spec.level,
                          out.factor_used, spec.scheme.method);
  return out;
}

// Interval anchored at the sliding estimate with circular bootstrap errors:
// the anchor keeps the lower-variance estimator, the errors come from the
// scheme whose resampling distribution is actually consistent.
inline CiResult sliding_circular_ci(std::span<const double> x, const Spec& spec) {
  impl::check_spec(spec);
  if (spec.scheme.method != blocks::Method::circular)
    throw std::invalid_argument("sliding_circular_ci: scheme must be circular");
  const auto cb = prepare_blocks(x, spec.scheme);
  if (impl::all_tied(cb))
    throw fit::FitError(fit::FitError::Kind::all_tied,
                        "bootstrap: every block maximum is identical");
  CiResult out;
  const auto sliding = blocks::sliding_maxima(x, spec.scheme.r);
  const auto anchor_sample = fit::WeightedSample::of_runs(sliding.values);
  out.anchor_estimate = evaluate(spec.estimator, anchor_sample);
  out.circular_estimate = point_estimate(cb, spec.estimator);
  impl::resolve_factor(spec, anchor_sample, x.size(), out);
  out.replicates = bootstrap_replicates_blocks(cb, spec);
  std::vector<double> errors;
  errors.reserve(out.replicates.estimates.size());
  for (double e : out.replicates.estimates)
    errors.push_back(e - out.circular_estimate);
  out.interval = basic_ci(out.anchor_estimate, std::move(errors), spec.level,
                          out.factor_used, blocks::Method::sliding);
  return out;
}

}  // namespace blockmax::boot
