// Copyright 2026 The Contention Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "contention/dynamics.hpp"
#include "contention/equilibrium.hpp"
#include "contention/game.hpp"
#include "contention/intervention.hpp"
#include "contention/observation.hpp"
#include "contention/targets.hpp"
#include "contention/types.hpp"

namespace {

using contention::ArrayXd;
using contention::Index;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitEstimationUndefined = 4;

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  if (values.empty()) {
    throw std::invalid_argument("expected a comma-separated number list");
  }
  return values;
}

std::vector<Index> parse_indices(const std::string& text) {
  std::vector<Index> values;
  for (double v : parse_doubles(text)) values.push_back(static_cast<Index>(v));
  return values;
}

ArrayXd to_array(const std::vector<double>& v) {
  return Eigen::Map<const ArrayXd>(v.data(), static_cast<Index>(v.size()));
}

std::string fixed5(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5f", x);
  return buf;
}

// Scientific with five decimals; values beyond double range print as 0.
std::string sci5(double x) {
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.5e", x);
  return buf;
}

std::string full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Results go to --out or stdout; the resolved configuration always goes to
// stderr so data files stay clean and reruns stay byte-identical.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit_config(const json& config) {
  std::cerr << "config: " << config.dump() << "\n";
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  json j;
  in >> j;
  if (!j.is_object()) {
    throw std::invalid_argument("config file must hold a JSON object");
  }
  return j;
}

// Command-line flags override config-file values.
template <typename T>
void merge(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
  if (opt->count() == 0 && cfg.contains(key)) {
    value = cfg.at(key).get<T>();
  }
}

ArrayXd ascending_valuations(Index n) {
  ArrayXd k(n);
  for (Index i = 0; i < n; ++i) k[i] = static_cast<double>(i + 1);
  return k;
}

// ---------------------------------------------------------------------------

struct Table1Options {
  std::string n_list = "3,10,100";
  std::string out;
  std::string format = "csv";
};

int run_table1(const Table1Options& opt) {
  const std::vector<Index> n_list = parse_indices(opt.n_list);
  json config = {{"command", "table1"}, {"n", n_list}, {"format", opt.format}};
  emit_config(config);

  json rows = json::array();
  for (Index n : n_list) {
    if (n < 1) throw std::invalid_argument("table1: n must be >= 1");
    const contention::GameSpec spec = contention::GameSpec::homogeneous(n);
    const ArrayXd p = ArrayXd::Constant(n, 1.0 / static_cast<double>(n));
    const contention::Payoffs u = contention::payoff(spec, p);
    rows.push_back({{"n", n},
                    {"individual_payoff", u[0]},
                    {"utilization", contention::utilization(p)}});
  }

  OutputTarget out(opt.out);
  if (opt.format == "json") {
    out.stream() << json({{"config", config}, {"rows", rows}}).dump(2) << "\n";
  } else {
    out.stream() << "n,individual_payoff,utilization\n";
    for (const auto& row : rows) {
      out.stream() << row.at("n").get<Index>() << ","
                   << fixed5(row.at("individual_payoff").get<double>()) << ","
                   << fixed5(row.at("utilization").get<double>()) << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct Table2Options {
  std::string n_list = "3,10,100";
  std::string out;
  std::string format = "csv";
};

int run_table2(const Table2Options& opt) {
  const std::vector<Index> n_list = parse_indices(opt.n_list);
  json config = {{"command", "table2"}, {"n", n_list}, {"format", opt.format}};
  emit_config(config);

  bool solver_failed = false;
  json rows = json::array();
  for (Index n : n_list) {
    if (n < 1) throw std::invalid_argument("table2: n must be >= 1");
    const contention::GameSpec spec(ascending_valuations(n));
    const ArrayXd weights = spec.k;

    struct Row {
      const char* name;
      ArrayXd target;
      bool ok;
    };
    std::vector<Row> targets;
    {
      contention::BargainingProblem weighted(spec);
      weighted.weights = weights;
      targets.push_back(
          {"weighted", contention::nonsymmetric_nash_target(weighted), true});
      contention::BargainingProblem symmetric(spec);
      targets.push_back(
          {"symmetric", contention::nash_bargaining_target(symmetric), true});
      const contention::EgalitarianResult egal =
          contention::egalitarian_target(spec);
      targets.push_back({"egalitarian", egal.target, egal.converged});
      solver_failed |= !egal.converged;
    }

    for (const auto& t : targets) {
      const contention::Payoffs u = contention::payoff(spec, t.target);
      const double average = u.mean();
      const double aggregate = u.sum();
      const double stddev = std::sqrt((u - average).square().mean());
      rows.push_back(
          {{"target", t.name},
           {"n", n},
           {"solver_converged", t.ok},
           {"average_payoff", average},
           {"aggregate_payoff", aggregate},
           {"payoff_stddev", stddev},
           {"utilization", contention::utilization(t.target)},
           {"nash_product", contention::nash_product(spec, t.target)},
           {"generalized_nash_product",
            contention::nash_product(spec, t.target, weights)}});
    }
  }

  OutputTarget out(opt.out);
  if (opt.format == "json") {
    out.stream() << json({{"config", config}, {"rows", rows}}).dump(2) << "\n";
  } else {
    out.stream() << "target,n,average_payoff,aggregate_payoff,payoff_stddev,"
                    "utilization,nash_product,generalized_nash_product\n";
    for (const auto& row : rows) {
      out.stream() << row.at("target").get<std::string>() << ","
                   << row.at("n").get<Index>() << ","
                   << fixed5(row.at("average_payoff").get<double>()) << ","
                   << fixed5(row.at("aggregate_payoff").get<double>()) << ","
                   << fixed5(row.at("payoff_stddev").get<double>()) << ","
                   << fixed5(row.at("utilization").get<double>()) << ","
                   << sci5(row.at("nash_product").get<double>()) << ","
                   << sci5(row.at("generalized_nash_product").get<double>())
                   << "\n";
    }
  }
  return solver_failed ? kExitSolverFailure : kExitOk;
}

// ---------------------------------------------------------------------------

struct RegionOptions {
  std::string mode = "base";
  std::string k = "1,1";
  Index points = 201;
  Index m = 5;
  double epsilon = 0.1;
  std::string out;
};

int run_region(const RegionOptions& opt) {
  const ArrayXd k = to_array(parse_doubles(opt.k));
  const contention::GameSpec spec{k};
  const Index n = spec.n();
  json config = {{"command", "region"}, {"mode", opt.mode},
                 {"k", parse_doubles(opt.k)}, {"points", opt.points},
                 {"m", opt.m},              {"epsilon", opt.epsilon}};
  emit_config(config);

  OutputTarget out(opt.out);
  std::ostream& os = out.stream();
  for (Index i = 0; i < n; ++i) os << "p_" << (i + 1) << ",";
  for (Index i = 0; i < n; ++i) os << "u_" << (i + 1) << (i + 1 < n ? "," : "");
  os << "\n";
  const auto row = [&](const ArrayXd& p, const ArrayXd& u) {
    for (Index i = 0; i < n; ++i) os << full(p[i]) << ",";
    for (Index i = 0; i < n; ++i) os << full(u[i]) << (i + 1 < n ? "," : "");
    os << "\n";
  };

  if (opt.mode == "base") {
    if (opt.points < 2) throw std::invalid_argument("region: points >= 2");
    contention::for_each_region_point(
        spec, contention::SamplingPlan::grid(opt.points), row);
  } else if (opt.mode == "quantized") {
    contention::QuantizedTargetGrid grid(n, opt.m);
    grid.for_each(
        [&](const ArrayXd& p) { row(p, contention::payoff(spec, p)); });
  } else if (opt.mode == "noisy") {
    if (opt.points < 2) throw std::invalid_argument("region: points >= 2");
    if (opt.epsilon <= 0.0 || opt.epsilon >= 0.25) {
      throw std::invalid_argument("region: noisy mode needs epsilon in (0,0.25)");
    }
    // Targets live in [2 eps, 1 - 2 eps]; payoffs carry the standing
    // intervention eps*q/(1 + eps*q) of the noise-proof rule.
    const double lo = 2.0 * opt.epsilon, hi = 1.0 - 2.0 * opt.epsilon;
    const double step = (hi - lo) / static_cast<double>(opt.points - 1);
    std::vector<Index> idx(static_cast<std::size_t>(n), 0);
    ArrayXd p(n);
    for (;;) {
      for (Index i = 0; i < n; ++i) {
        p[i] = lo + static_cast<double>(idx[static_cast<std::size_t>(i)]) * step;
      }
      const double q = (1.0 / p).sum();
      if (opt.epsilon * q <= 1.0) {
        const double scale = 1.0 - opt.epsilon * q / (1.0 + opt.epsilon * q);
        row(p, scale * contention::payoff(spec, p));
      }
      Index axis = n - 1;
      while (axis >= 0 && ++idx[static_cast<std::size_t>(axis)] == opt.points) {
        idx[static_cast<std::size_t>(axis)] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  } else if (opt.mode == "aggregate") {
    if (opt.points < 1) throw std::invalid_argument("region: points >= 1");
    for (Index g = 1; g <= opt.points; ++g) {
      const double t =
          static_cast<double>(g) / static_cast<double>(opt.points + 1);
      const ArrayXd p = ArrayXd::Constant(n, t);
      row(p, contention::payoff(spec, p));
    }
  } else {
    throw std::invalid_argument("region: unknown mode " + opt.mode);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DynamicsOptions {
  std::string k;
  std::string target;
  std::string start;
  int max_steps = 50;
  double tol = 1e-8;
  std::string out;
  std::string format = "csv";
};

int run_dynamics_cmd(const DynamicsOptions& opt) {
  const ArrayXd k = to_array(parse_doubles(opt.k));
  const ArrayXd target = to_array(parse_doubles(opt.target));
  const ArrayXd start = to_array(parse_doubles(opt.start));
  const contention::GameSpec spec{k};
  json config = {{"command", "dynamics"},     {"k", parse_doubles(opt.k)},
                 {"target", parse_doubles(opt.target)},
                 {"start", parse_doubles(opt.start)},
                 {"max_steps", opt.max_steps}, {"tol", opt.tol},
                 {"format", opt.format}};
  emit_config(config);

  const contention::DynamicsTrace trace =
      contention::run_dynamics(spec, target, start, opt.max_steps, opt.tol);

  OutputTarget out(opt.out);
  if (opt.format == "json") {
    json steps = json::array();
    for (const auto& s : trace.steps) {
      steps.push_back({{"t", s.t},
                       {"c_t", s.offset},
                       {"g_level", s.intervention},
                       {"p", std::vector<double>(s.profile.data(),
                                                 s.profile.data() +
                                                     s.profile.size())}});
    }
    out.stream() << json({{"config", config},
                          {"steps", steps},
                          {"converged", trace.converged},
                          {"iterations", trace.iterations},
                          {"hypotheses_hold", trace.hypotheses_hold},
                          {"hypothesis_note", trace.hypothesis_note}})
                        .dump(2)
                 << "\n";
  } else {
    contention::write_dynamics_csv(out.stream(), trace);
    std::cerr << "summary: "
              << json({{"converged", trace.converged},
                       {"iterations", trace.iterations},
                       {"hypotheses_hold", trace.hypotheses_hold},
                       {"hypothesis_note", trace.hypothesis_note}})
                     .dump()
              << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string k;
  std::string p;
  double p0 = 0.0;
  Index slots = 100000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string trace_out;
};

int run_simulate(const SimulateOptions& opt) {
  const ArrayXd k = to_array(parse_doubles(opt.k));
  const ArrayXd p = to_array(parse_doubles(opt.p));
  const contention::GameSpec spec{k};
  json config = {{"command", "simulate"}, {"k", parse_doubles(opt.k)},
                 {"p", parse_doubles(opt.p)},
                 {"p0", opt.p0},          {"slots", opt.slots},
                 {"seed", opt.seed},      {"threads", opt.threads}};
  emit_config(config);

  const contention::SlotTrace trace =
      contention::simulate(spec, p, opt.p0, opt.slots, opt.seed, opt.threads);
  if (!opt.trace_out.empty()) {
    std::ofstream tf(opt.trace_out);
    if (!tf) throw std::invalid_argument("cannot open " + opt.trace_out);
    contention::write_trace_csv(tf, trace);
  }

  const contention::EstimateReport report =
      contention::estimate_probabilities(trace, spec.n());
  json j = report;
  j["idle_count"] = trace.idle_count();
  j["collision_count"] = trace.collision_count();
  j["config"] = config;

  OutputTarget out(opt.out);
  out.stream() << j.dump(2) << "\n";
  return report.all_defined() ? kExitOk : kExitEstimationUndefined;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::string k;
  std::string target;
  std::string phat;
  std::string rule_file;
  double offset = std::numeric_limits<double>::quiet_NaN();
  std::string out;
};

int run_verify(const VerifyOptions& opt) {
  const ArrayXd k = to_array(parse_doubles(opt.k));
  const contention::GameSpec spec{k};

  contention::InterventionRule rule = [&] {
    if (!opt.rule_file.empty()) {
      std::ifstream in(opt.rule_file);
      if (!in) throw std::invalid_argument("cannot read " + opt.rule_file);
      json j;
      in >> j;
      return j.get<contention::InterventionRule>();
    }
    if (opt.target.empty()) {
      throw std::invalid_argument("verify: need --target or --rule-file");
    }
    const ArrayXd target = to_array(parse_doubles(opt.target));
    return std::isnan(opt.offset) ? contention::make_trd(target)
                                  : contention::make_trd(target, opt.offset);
  }();

  const ArrayXd p_hat = opt.phat.empty() ? contention::rule_target(rule)
                                         : to_array(parse_doubles(opt.phat));
  json config = {{"command", "verify"},
                 {"k", parse_doubles(opt.k)},
                 {"rule", rule},
                 {"p_hat", std::vector<double>(p_hat.data(),
                                               p_hat.data() + p_hat.size())}};
  emit_config(config);

  json j;
  j["config"] = config;
  j["g_at_phat"] = contention::evaluate(rule, p_hat);
  j["manager_payoff"] = contention::manager_payoff(rule, p_hat);
  j["stackelberg"] = contention::is_stackelberg(spec, rule, p_hat);
  if (std::holds_alternative<contention::TrdRule>(rule)) {
    const auto& trd_rule = std::get<contention::TrdRule>(rule);
    if (trd_rule.offset == static_cast<double>(spec.n())) {
      j["verdict"] =
          contention::is_nash_intervened(spec, trd_rule.target, p_hat);
    }
  }

  OutputTarget out(opt.out);
  out.stream() << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contention-game solver and simulator for slotted medium "
               "access under manager intervention"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file with defaults; flags override");

  Table1Options t1;
  CLI::App* table1 = app.add_subcommand(
      "table1", "Per-user payoff and utilization at the symmetric target");
  auto* t1_n = table1->add_option("--n", t1.n_list, "User counts, e.g. 3,10,100");
  auto* t1_out = table1->add_option("--out", t1.out, "Output file");
  auto* t1_fmt = table1->add_option("--format", t1.format)
                     ->check(CLI::IsMember({"csv", "json"}));

  Table2Options t2;
  CLI::App* table2 = app.add_subcommand(
      "table2",
      "Weighted, symmetric, and egalitarian targets with valuations 1..n");
  auto* t2_n = table2->add_option("--n", t2.n_list, "User counts");
  auto* t2_out = table2->add_option("--out", t2.out, "Output file");
  auto* t2_fmt = table2->add_option("--format", t2.format)
                     ->check(CLI::IsMember({"csv", "json"}));

  RegionOptions rg;
  CLI::App* region = app.add_subcommand(
      "region", "Achievable payoff region exports (CSV)");
  auto* rg_mode = region->add_option("--mode", rg.mode)
                      ->check(CLI::IsMember({"base", "quantized", "noisy",
                                             "aggregate"}));
  auto* rg_k = region->add_option("--k", rg.k, "Valuations, e.g. 1,1");
  auto* rg_points = region->add_option("--points", rg.points,
                                       "Grid points per axis");
  auto* rg_m = region->add_option("--m", rg.m, "Interval count (quantized)");
  auto* rg_eps = region->add_option("--epsilon", rg.epsilon,
                                    "Noise half-width (noisy)");
  auto* rg_out = region->add_option("--out", rg.out, "Output file");

  DynamicsOptions dy;
  CLI::App* dynamics = app.add_subcommand(
      "dynamics", "Adaptive-offset adjustment from a saturated profile");
  auto* dy_k = dynamics->add_option("--k", dy.k, "Valuations")->required();
  auto* dy_target = dynamics->add_option("--target", dy.target)->required();
  auto* dy_start = dynamics->add_option("--start", dy.start)->required();
  auto* dy_max = dynamics->add_option("--max-steps", dy.max_steps);
  auto* dy_tol = dynamics->add_option("--tol", dy.tol);
  auto* dy_out = dynamics->add_option("--out", dy.out, "Output file");
  auto* dy_fmt = dynamics->add_option("--format", dy.format)
                     ->check(CLI::IsMember({"csv", "json"}));

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Slot-level Monte Carlo plus the channel-state estimator");
  auto* sim_k = simulate->add_option("--k", sim.k, "Valuations")->required();
  auto* sim_p = simulate->add_option("--p", sim.p, "Profile")->required();
  auto* sim_p0 = simulate->add_option("--p0", sim.p0, "Manager probability");
  auto* sim_slots = simulate->add_option("--slots", sim.slots);
  auto* sim_seed = simulate->add_option("--seed", sim.seed);
  auto* sim_threads = simulate->add_option("--threads", sim.threads);
  auto* sim_out = simulate->add_option("--out", sim.out, "Report file");
  auto* sim_trace = simulate->add_option("--trace-out", sim.trace_out,
                                         "Per-slot trace CSV");

  VerifyOptions vf;
  CLI::App* verify = app.add_subcommand(
      "verify", "Equilibrium verdicts for a rule/profile pair (JSON)");
  auto* vf_k = verify->add_option("--k", vf.k, "Valuations")->required();
  auto* vf_target = verify->add_option("--target", vf.target);
  auto* vf_phat = verify->add_option("--phat", vf.phat);
  auto* vf_rule = verify->add_option("--rule-file", vf.rule_file,
                                     "JSON rule description");
  auto* vf_offset = verify->add_option("--offset", vf.offset);
  auto* vf_out = verify->add_option("--out", vf.out, "Output file");

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config_file(config_path);
    if (table1->parsed()) {
      merge(cfg, "n", t1_n, t1.n_list);
      merge(cfg, "out", t1_out, t1.out);
      merge(cfg, "format", t1_fmt, t1.format);
      return run_table1(t1);
    }
    if (table2->parsed()) {
      merge(cfg, "n", t2_n, t2.n_list);
      merge(cfg, "out", t2_out, t2.out);
      merge(cfg, "format", t2_fmt, t2.format);
      return run_table2(t2);
    }
    if (region->parsed()) {
      merge(cfg, "mode", rg_mode, rg.mode);
      merge(cfg, "k", rg_k, rg.k);
      merge(cfg, "points", rg_points, rg.points);
      merge(cfg, "m", rg_m, rg.m);
      merge(cfg, "epsilon", rg_eps, rg.epsilon);
      merge(cfg, "out", rg_out, rg.out);
      return run_region(rg);
    }
    if (dynamics->parsed()) {
      merge(cfg, "k", dy_k, dy.k);
      merge(cfg, "target", dy_target, dy.target);
      merge(cfg, "start", dy_start, dy.start);
      merge(cfg, "max_steps", dy_max, dy.max_steps);
      merge(cfg, "tol", dy_tol, dy.tol);
      merge(cfg, "out", dy_out, dy.out);
      merge(cfg, "format", dy_fmt, dy.format);
      return run_dynamics_cmd(dy);
    }
    if (simulate->parsed()) {
      merge(cfg, "k", sim_k, sim.k);
      merge(cfg, "p", sim_p, sim.p);
      merge(cfg, "p0", sim_p0, sim.p0);
      merge(cfg, "slots", sim_slots, sim.slots);
      merge(cfg, "seed", sim_seed, sim.seed);
      merge(cfg, "threads", sim_threads, sim.threads);
      merge(cfg, "out", sim_out, sim.out);
      merge(cfg, "trace_out", sim_trace, sim.trace_out);
      return run_simulate(sim);
    }
    if (verify->parsed()) {
      merge(cfg, "k", vf_k, vf.k);
      merge(cfg, "target", vf_target, vf.target);
      merge(cfg, "phat", vf_phat, vf.phat);
      merge(cfg, "rule_file", vf_rule, vf.rule_file);
      merge(cfg, "offset", vf_offset, vf.offset);
      merge(cfg, "out", vf_out, vf.out);
      return run_verify(vf);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
