#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "blockmax/blocks.hpp"
#include "blockmax/boot.hpp"
#include "blockmax/dist.hpp"
#include "blockmax/fit.hpp"
#include "blockmax/io.hpp"
#include "blockmax/mc.hpp"
#include "blockmax/rng.hpp"
#include "blockmax/sim.hpp"
#include "blockmax/version.hpp"
#include "report.hpp"

namespace {

using namespace blockmax;

int default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

long long parse_int(const std::string& s, const std::string& what) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("expected an integer for " + what + ", got '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("expected an unsigned integer for " + what +
                                ", got '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("expected a number for " + what + ", got '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

boot::Estimator make_estimator(const std::string& target, double horizon,
                               std::optional<double> truncation) {
  boot::Estimator e;
  e.frechet_trunc = truncation;
  if (target == "mean") {
    e.target = boot::Target::mean;
  } else if (target == "frechet-shape") {
    e.target = boot::Target::frechet_mle;
  } else if (target == "gev-shape") {
    e.target = boot::Target::gev_mle;
  } else if (target == "rl100") {
    e.target = boot::Target::return_level;
    e.horizon = 100.0;
  } else if (target == "return-level") {
    e.target = boot::Target::return_level;
    e.horizon = horizon;
  } else {
    throw std::invalid_argument(
        "unknown target '" + target +
        "' (expected mean, frechet-shape, gev-shape, return-level or rl100)");
  }
  return e;
}

void write_report(const report::Report& rep, const std::string& json_path) {
  rep.render_text(std::cout);
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw io::IoError("cannot open " + json_path + " for writing");
    rep.render_json(out);
    out.flush();
    if (!out) throw io::IoError("write failure on " + json_path);
  }
}

// ---- simulate ----

struct SimulateArgs {
  std::string model = "armax-gpd";
  double gamma = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  std::vector<double> x;
  if (a.model == "armax-gpd") {
    x = sim::simulate_armax_gpd({a.gamma, a.beta, a.n, a.seed, a.stream});
  } else if (a.model == "armax-pareto") {
    x = sim::simulate_armax_pareto({a.alpha, a.beta, a.n, a.seed, a.stream});
  } else {
    throw std::invalid_argument("unknown model '" + a.model +
                                "' (expected armax-gpd or armax-pareto)");
  }
  io::write_values_csv(a.out, x);
}

// ---- blocks ----

struct BlocksArgs {
  std::string input;
  std::string method = "disjoint";
  int r = 1;
  int k = 2;
  std::string out;
};

void run_blocks(const BlocksArgs& a) {
  const auto x = io::read_values_csv(a.input);
  blocks::Series s;
  if (a.method == "disjoint")
    s = blocks::disjoint_maxima(x, a.r);
  else if (a.method == "disjoint-repeated")
    s = blocks::disjoint_repeated(x, a.r);
  else if (a.method == "sliding")
    s = blocks::sliding_maxima(x, a.r);
  else if (a.method == "circular")
    s = blocks::circmax(x, a.r, a.k);
  else
    throw std::invalid_argument(
        "unknown method '" + a.method +
        "' (expected disjoint, disjoint-repeated, sliding or circular)");
  io::write_values_csv(a.out, s.values);
}

// ---- fit ----

struct FitArgs {
  std::string input;
  std::string family = "gev";
  std::string method = "disjoint";
  int r = 1;
  int k = 2;
  double horizon = 0.0;  // 0 = no return level requested
  std::optional<double> truncation;
  std::string json;
};

fit::WeightedSample maxima_sample(const std::vector<double>& x,
                                  const std::string& method, int r, int k) {
  if (method == "disjoint")
    return fit::WeightedSample::of(blocks::disjoint_maxima(x, r).values);
  if (method == "sliding")
    return fit::WeightedSample::of_runs(blocks::sliding_maxima(x, r).values);
  if (method == "circular")
    return fit::WeightedSample::of_runs(blocks::circmax(x, r, k).values);
  throw std::invalid_argument("unknown method '" + method +
                              "' (expected disjoint, sliding or circular)");
}

void run_fit(const FitArgs& a) {
  const auto x = io::read_values_csv(a.input);
  const auto sample = maxima_sample(x, a.method, a.r, a.k);
  report::Report rep;
  rep.text("family", a.family);
  rep.text("method", a.method);
  rep.integer("r", a.r);
  if (a.method == "circular") rep.integer("k", a.k);
  rep.uinteger("n", x.size());
  if (a.family == "gev") {
    const auto f = fit::fit_gev(sample);
    rep.num("loc", f.params.loc);
    rep.num("scale", f.params.scale);
    rep.num("shape", f.params.shape);
    rep.num("loglik", f.loglik);
    rep.integer("iterations", f.iterations);
    rep.boolean("converged", f.converged);
    if (a.horizon > 0.0) {
      rep.num("horizon", a.horizon);
      rep.num("return_level", fit::return_level_from_gev(f.params, a.horizon));
    }
  } else if (a.family == "frechet") {
    const auto f = fit::fit_frechet(sample, a.truncation);
    rep.num("shape", f.params.shape);
    rep.num("scale", f.params.scale);
    rep.num("loglik", f.loglik);
    rep.integer("iterations", f.iterations);
    rep.boolean("converged", f.converged);
  } else {
    throw std::invalid_argument("unknown family '" + a.family +
                                "' (expected gev or frechet)");
  }
  write_report(rep, a.json);
}

// ---- bootstrap-ci ----

struct BootArgs {
  std::string input;
  std::string target = "mean";
  double horizon = 100.0;
  std::string method = "sliding-circular";
  int r = 1;
  int k = 2;
  int B = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  int threads = default_threads();
  bool allow_inconsistent = false;
  std::string correction = "none";
  double factor = 1.0;
  std::optional<double> truncation;
  std::string json;
};

boot::Spec make_boot_spec(const BootArgs& a) {
  boot::Spec s;
  s.B = a.B;
  s.level = a.level;
  s.seed = a.seed;
  s.threads = a.threads;
  s.allow_inconsistent = a.allow_inconsistent;
  s.estimator = make_estimator(a.target, a.horizon, a.truncation);
  if (a.correction == "none")
    s.correction = boot::Correction::none;
  else if (a.correction == "factor")
    s.correction = boot::Correction::factor;
  else if (a.correction == "auto")
    s.correction = boot::Correction::automatic;
  else
    throw std::invalid_argument("unknown correction '" + a.correction +
                                "' (expected none, factor or auto)");
  s.factor = a.factor;
  if (a.method == "disjoint")
    s.scheme = {blocks::Method::disjoint, a.r, 1};
  else if (a.method == "circular" || a.method == "sliding-circular")
    s.scheme = {blocks::Method::circular, a.r, a.k};
  else if (a.method == "naive-sliding") {
    if (!a.allow_inconsistent)
      throw std::invalid_argument(
          "the naive-sliding bootstrap is known to be inconsistent (it "
          "underestimates the variance); pass --allow-inconsistent to run it anyway");
    s.scheme = {blocks::Method::sliding, a.r, a.k};
  }
  else
    throw std::invalid_argument(
        "unknown method '" + a.method +
        "' (expected disjoint, circular, sliding-circular or naive-sliding)");
  return s;
}

void run_bootstrap_ci(const BootArgs& a) {
  const auto x = io::read_values_csv(a.input);
  const auto spec = make_boot_spec(a);
  const auto res = a.method == "sliding-circular" ? boot::sliding_circular_ci(x, spec)
                                                  : boot::bootstrap_ci(x, spec);
  report::Report rep;
  rep.text("method", a.method);
  rep.text("target", a.target);
  if (spec.estimator.target == boot::Target::return_level)
    rep.num("horizon", spec.estimator.horizon);
  rep.integer("r", a.r);
  if (a.method != "disjoint") rep.integer("k", a.k);
  rep.uinteger("n", x.size());
  rep.integer("B", a.B);
  rep.integer("failures", res.replicates.failures);
  rep.num("level", a.level);
  rep.num("point", res.anchor_estimate);
  if (a.method == "sliding-circular")
    rep.num("circular_estimate", res.circular_estimate);
  rep.num("lower", res.interval.lower);
  rep.num("upper", res.interval.upper);
  rep.num("width", res.interval.upper - res.interval.lower);
  rep.text("correction", a.correction);
  rep.num("factor", res.factor_used);
  if (res.gamma_hat) rep.num("gamma_hat", *res.gamma_hat);
  if (res.factor_in_range && !*res.factor_in_range) {
    const std::string warning =
        "correction factor extrapolated outside its calibrated range "
        "(m in [40,100], shape in [-0.2,0.2])";
    rep.text("correction_warning", warning);
    std::cerr << "warning: " << warning << "\n";
  }
  write_report(rep, a.json);
}

// ---- window-scan ----

struct ScanArgs {
  std::string input;
  std::string target = "mean";
  double horizon = 100.0;
  std::vector<std::string> methods = {"sliding-circular"};
  int r = 1;
  int k = 2;
  int window_blocks = 0;
  int step_blocks = 1;
  int B = 400;
  double level = 0.95;
  std::uint64_t seed = 0;
  int threads = default_threads();
  bool allow_inconsistent = false;
  int smooth = 2;
  std::optional<double> truncation;
  std::string out;
};

void run_window_scan(const ScanArgs& a) {
  const auto x = io::read_values_csv(a.input);
  if (a.window_blocks < 1)
    throw std::invalid_argument("window-scan: --window-blocks must be >= 1");
  if (a.step_blocks < 1)
    throw std::invalid_argument("window-scan: --step-blocks must be >= 1");
  if (a.smooth < 0) throw std::invalid_argument("window-scan: --smooth must be >= 0");
  if (a.r < 1) throw std::invalid_argument("window-scan: r must be >= 1");
  const std::size_t m_total = x.size() / static_cast<std::size_t>(a.r);
  const std::size_t w = static_cast<std::size_t>(a.window_blocks);
  if (w > m_total)
    throw std::invalid_argument("window-scan: window exceeds the data (" +
                                std::to_string(m_total) + " full blocks available)");

  std::vector<std::size_t> starts;
  for (std::size_t j = 0; j + w <= m_total; j += static_cast<std::size_t>(a.step_blocks))
    starts.push_back(j);

  struct Row {
    std::size_t end_index;
    double estimate, lower, upper, width;
  };
  std::vector<std::vector<Row>> rows(a.methods.size());

  for (std::size_t mi = 0; mi < a.methods.size(); ++mi) {
    BootArgs ba;
    ba.target = a.target;
    ba.horizon = a.horizon;
    ba.method = a.methods[mi];
    ba.r = a.r;
    ba.k = a.k;
    ba.B = a.B;
    ba.level = a.level;
    ba.threads = a.threads;
    ba.allow_inconsistent = a.allow_inconsistent;
    ba.truncation = a.truncation;
    for (std::size_t wi = 0; wi < starts.size(); ++wi) {
      const std::size_t begin = starts[wi] * static_cast<std::size_t>(a.r);
      const std::size_t len = w * static_cast<std::size_t>(a.r);
      ba.seed = Rng::derive(Rng::derive(a.seed, mi), wi);
      const auto spec = make_boot_spec(ba);
      const std::span<const double> slice(x.data() + begin, len);
      const auto res = ba.method == "sliding-circular"
                           ? boot::sliding_circular_ci(slice, spec)
                           : boot::bootstrap_ci(slice, spec);
      rows[mi].push_back({begin + len, res.anchor_estimate, res.interval.lower,
                          res.interval.upper,
                          res.interval.upper - res.interval.lower});
    }
  }

  // trailing moving average over each method's own curve
  auto smoothed = [&](const std::vector<Row>& rs, double Row::* field) {
    std::vector<double> out(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::size_t lo = a.smooth > 0 && i + 1 >= static_cast<std::size_t>(a.smooth)
                                 ? i + 1 - static_cast<std::size_t>(a.smooth)
                                 : 0;
      double acc = 0.0;
      for (std::size_t j = lo; j <= i; ++j) acc += rs[j].*field;
      out[i] = acc / static_cast<double>(i - lo + 1);
    }
    return out;
  };

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw io::IoError("cannot open " + a.out + " for writing");
    os = &file;
  }
  *os << "window_end_index,target,method,estimate,lower,upper,width";
  if (a.smooth > 0) *os << ",estimate_sma,lower_sma,upper_sma,width_sma";
  *os << "\n";
  std::vector<std::array<std::vector<double>, 4>> sm(a.methods.size());
  if (a.smooth > 0)
    for (std::size_t mi = 0; mi < a.methods.size(); ++mi)
      sm[mi] = {smoothed(rows[mi], &Row::estimate), smoothed(rows[mi], &Row::lower),
                smoothed(rows[mi], &Row::upper), smoothed(rows[mi], &Row::width)};
  for (std::size_t wi = 0; wi < starts.size(); ++wi) {
    for (std::size_t mi = 0; mi < a.methods.size(); ++mi) {
      const auto& r = rows[mi][wi];
      *os << r.end_index << "," << a.target << "," << a.methods[mi] << ","
          << io::fmt17(r.estimate) << "," << io::fmt17(r.lower) << ","
          << io::fmt17(r.upper) << "," << io::fmt17(r.width);
      if (a.smooth > 0)
        *os << "," << io::fmt17(sm[mi][0][wi]) << "," << io::fmt17(sm[mi][1][wi])
            << "," << io::fmt17(sm[mi][2][wi]) << "," << io::fmt17(sm[mi][3][wi]);
      *os << "\n";
    }
  }
  os->flush();
  if (!*os) throw io::IoError("write failure on window-scan output");
}

// ---- experiment ----

struct ExperimentArgs {
  std::string spec_path;
  std::string out;
  std::optional<int> threads;
};

mc::ExperimentSpec parse_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::IoError("cannot open " + path);
  mc::ExperimentSpec spec;
  spec.threads = default_threads();
  bool have_model = false, have_shape = false, have_target = false, have_r = false;
  bool have_m = false, have_methods = false, have_n = false;
  double horizon = 100.0;
  std::string target_token;
  int default_k = 2;
  std::vector<std::string> method_tokens;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string trimmed;
    // collapse whitespace around the '=' while keeping value-internal commas
    const auto eq = line.find('=');
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (strip(line).empty()) continue;
    if (eq == std::string::npos)
      throw std::invalid_argument("experiment spec: expected key = value at line " +
                                  std::to_string(line_no));
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (value.empty())
      throw std::invalid_argument("experiment spec: empty value for '" + key + "'");

    if (key == "model") {
      if (value == "armax-gpd")
        spec.model.family = mc::ModelConfig::Family::gpd;
      else if (value == "armax-pareto")
        spec.model.family = mc::ModelConfig::Family::pareto;
      else
        throw std::invalid_argument("experiment spec: unknown model '" + value + "'");
      have_model = true;
    } else if (key == "gamma" || key == "alpha") {
      spec.model.shape = parse_double(value, key);
      have_shape = true;
    } else if (key == "beta") {
      spec.model.beta = parse_double(value, key);
    } else if (key == "target") {
      target_token = value;
      have_target = true;
    } else if (key == "horizon") {
      horizon = parse_double(value, key);
    } else if (key == "r") {
      spec.r = static_cast<int>(parse_int(value, key));
      have_r = true;
    } else if (key == "m_grid") {
      for (const auto& tok : split(value, ','))
        spec.m_grid.push_back(static_cast<int>(parse_int(tok, "m_grid")));
      have_m = true;
    } else if (key == "methods") {
      method_tokens = split(value, ',');
      have_methods = true;
    } else if (key == "k") {
      default_k = static_cast<int>(parse_int(value, key));
    } else if (key == "N") {
      spec.N = static_cast<int>(parse_int(value, key));
      have_n = true;
    } else if (key == "B") {
      spec.B = static_cast<int>(parse_int(value, key));
    } else if (key == "level") {
      spec.level = parse_double(value, key);
    } else if (key == "seed") {
      spec.seed = parse_uint(value, key);
    } else if (key == "threads") {
      spec.threads = static_cast<int>(parse_int(value, key));
    } else {
      throw std::invalid_argument("experiment spec: unknown key '" + key + "'");
    }
  }
  if (!have_model || !have_shape || !have_target || !have_r || !have_m ||
      !have_methods || !have_n)
    throw std::invalid_argument(
        "experiment spec: required keys are model, gamma|alpha, target, r, "
        "m_grid, methods and N");

  if (target_token == "mean") {
    spec.target = {mc::TargetKind::mean, 0.0};
  } else if (target_token == "rl100") {
    spec.target = {mc::TargetKind::return_level, 100.0};
  } else if (target_token == "return-level") {
    spec.target = {mc::TargetKind::return_level, horizon};
  } else if (target_token == "frechet-shape") {
    spec.target = {mc::TargetKind::frechet_shape, 0.0};
  } else {
    throw std::invalid_argument("experiment spec: unknown target '" + target_token +
                                "'");
  }

  for (auto tok : method_tokens) {
    mc::MethodSpec ms;
    ms.k = default_k;
    if (tok == "disjoint") {
      ms.method = blocks::Method::disjoint;
      ms.k = 1;
    } else if (tok == "sliding") {
      ms.method = blocks::Method::sliding;
    } else if (tok == "circular") {
      ms.method = blocks::Method::circular;
    } else if (tok.rfind("circular(k=", 0) == 0 && tok.back() == ')') {
      ms.method = blocks::Method::circular;
      ms.k = static_cast<int>(
          parse_int(tok.substr(11, tok.size() - 12), "circular k"));
    } else {
      throw std::invalid_argument("experiment spec: unknown method '" + tok + "'");
    }
    spec.methods.push_back(ms);
  }
  return spec;
}

void run_experiment_cmd(const ExperimentArgs& a) {
  auto spec = parse_experiment_spec(a.spec_path);
  if (a.threads) spec.threads = *a.threads;
  const auto table = mc::run_experiment(spec);
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw io::IoError("cannot open " + a.out + " for writing");
    os = &file;
  }
  io::write_metrics_csv(*os, spec, table);
  os->flush();
  if (!*os) throw io::IoError("write failure on experiment output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-maxima extreme value analysis"};
  app.set_version_flag("--version", blockmax::version);
  app.require_subcommand(1);

  SimulateArgs sa;
  auto* c_sim = app.add_subcommand("simulate",
                                   "simulate a max-autoregressive series to CSV");
  c_sim->add_option("--model", sa.model, "armax-gpd or armax-pareto");
  c_sim->add_option("--gamma", sa.gamma, "GPD marginal shape");
  c_sim->add_option("--alpha", sa.alpha, "Pareto marginal tail index");
  c_sim->add_option("--beta", sa.beta, "dependence parameter in [0,1)");
  c_sim->add_option("--n", sa.n, "series length")->required();
  c_sim->add_option("--seed", sa.seed, "RNG seed");
  c_sim->add_option("--stream", sa.stream, "series index within the seed");
  c_sim->add_option("--out", sa.out, "output CSV path")->required();
  c_sim->callback([&] { run_simulate(sa); });

  BlocksArgs ba;
  auto* c_blocks = app.add_subcommand("blocks", "extract block maxima to CSV");
  c_blocks->add_option("--input", ba.input, "input CSV")->required();
  c_blocks->add_option("--method", ba.method,
                       "disjoint, disjoint-repeated, sliding or circular");
  c_blocks->add_option("-r,--block-length", ba.r, "block length")->required();
  c_blocks->add_option("-k,--aggregation", ba.k, "circular aggregation parameter");
  c_blocks->add_option("--out", ba.out, "output CSV path")->required();
  c_blocks->callback([&] { run_blocks(ba); });

  FitArgs fa;
  auto* c_fit = app.add_subcommand("fit", "fit a distribution to block maxima");
  c_fit->add_option("--input", fa.input, "input CSV")->required();
  c_fit->add_option("--family", fa.family, "gev or frechet");
  c_fit->add_option("--method", fa.method, "disjoint, sliding or circular");
  c_fit->add_option("-r,--block-length", fa.r, "block length")->required();
  c_fit->add_option("-k,--aggregation", fa.k, "circular aggregation parameter");
  c_fit->add_option("--horizon", fa.horizon,
                    "also report the T-period return level (gev only)");
  double fit_trunc = 0.0;
  c_fit->add_option("--truncation", fit_trunc, "Frechet truncation point")
      ->check(CLI::PositiveNumber);
  c_fit->add_option("--json", fa.json, "write a JSON mirror of the report");
  c_fit->callback([&] {
    if (fit_trunc > 0.0) fa.truncation = fit_trunc;
    run_fit(fa);
  });

  BootArgs bca;
  auto* c_boot = app.add_subcommand("bootstrap-ci",
                                    "bootstrap confidence interval for a target");
  c_boot->add_option("--input", bca.input, "input CSV")->required();
  c_boot->add_option("--target", bca.target,
                     "mean, frechet-shape, gev-shape, return-level or rl100");
  c_boot->add_option("--horizon", bca.horizon, "return-level horizon T");
  c_boot->add_option("--method", bca.method,
                     "disjoint, circular, sliding-circular or naive-sliding");
  c_boot->add_option("-r,--block-length", bca.r, "block length")->required();
  c_boot->add_option("-k,--aggregation", bca.k, "circular aggregation parameter");
  c_boot->add_option("-B,--replicates", bca.B, "bootstrap replicates");
  c_boot->add_option("--level", bca.level, "confidence level in (0,1)");
  c_boot->add_option("--seed", bca.seed, "RNG seed");
  c_boot->add_option("--threads", bca.threads, "worker threads");
  c_boot->add_flag("--allow-inconsistent", bca.allow_inconsistent,
                   "permit the naive sliding resampling scheme");
  c_boot->add_option("--correction", bca.correction, "none, factor or auto");
  c_boot->add_option("--factor", bca.factor, "fixed enlargement factor (>= 1)");
  double boot_trunc = 0.0;
  c_boot->add_option("--truncation", boot_trunc, "Frechet truncation point")
      ->check(CLI::PositiveNumber);
  c_boot->add_option("--json", bca.json, "write a JSON mirror of the report");
  c_boot->callback([&] {
    if (boot_trunc > 0.0) bca.truncation = boot_trunc;
    run_bootstrap_ci(bca);
  });

  ScanArgs sca;
  auto* c_scan = app.add_subcommand("window-scan",
                                    "bootstrap intervals over moving windows");
  c_scan->add_option("--input", sca.input, "input CSV")->required();
  c_scan->add_option("--target", sca.target,
                     "mean, frechet-shape, gev-shape, return-level or rl100");
  c_scan->add_option("--horizon", sca.horizon, "return-level horizon T");
  c_scan->add_option("--method", sca.methods,
                     "methods, repeatable (disjoint, circular, sliding-circular, "
                     "naive-sliding)");
  c_scan->add_option("-r,--block-length", sca.r, "block length")->required();
  c_scan->add_option("-k,--aggregation", sca.k, "circular aggregation parameter");
  c_scan->add_option("--window-blocks", sca.window_blocks, "window size in blocks")
      ->required();
  c_scan->add_option("--step-blocks", sca.step_blocks, "window step in blocks");
  c_scan->add_option("-B,--replicates", sca.B, "bootstrap replicates");
  c_scan->add_option("--level", sca.level, "confidence level in (0,1)");
  c_scan->add_option("--seed", sca.seed, "RNG seed");
  c_scan->add_option("--threads", sca.threads, "worker threads");
  c_scan->add_flag("--allow-inconsistent", sca.allow_inconsistent,
                   "permit the naive sliding resampling scheme");
  c_scan->add_option("--smooth", sca.smooth,
                     "trailing moving-average width for smoothed columns (0 = off)");
  double scan_trunc = 0.0;
  c_scan->add_option("--truncation", scan_trunc, "Frechet truncation point")
      ->check(CLI::PositiveNumber);
  c_scan->add_option("--out", sca.out, "output CSV path (default: stdout)");
  c_scan->callback([&] {
    if (scan_trunc > 0.0) sca.truncation = scan_trunc;
    run_window_scan(sca);
  });

  ExperimentArgs ea;
  int exp_threads = 0;
  auto* c_exp = app.add_subcommand("experiment", "Monte Carlo experiment grid");
  c_exp->add_option("--spec", ea.spec_path, "flat key = value spec file")->required();
  c_exp->add_option("--out", ea.out, "output CSV path (default: stdout)");
  c_exp->add_option("--threads", exp_threads, "override the spec's thread count");
  c_exp->callback([&] {
    if (exp_threads > 0) ea.threads = exp_threads;
    run_experiment_cmd(ea);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const fit::FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const boot::BootstrapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
