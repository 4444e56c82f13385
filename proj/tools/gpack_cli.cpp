#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gpack/bounds.hpp"
#include "gpack/experiment.hpp"

namespace fs = std::filesystem;
using namespace gpack;

namespace {

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  std::string out = "gpack-out";
  bool trace = false;
  std::optional<std::uint64_t> max_states;
};

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw ValidationError("cannot write " + (dir / name).string());
  return f;
}

json assignment_json(const ClusterSpec& cluster, const std::vector<int>& slots) {
  json a = json::array();
  for (int s : slots) {
    SlotId id = cluster.slot_id(s);
    a.push_back({id.machine, id.slot});
  }
  return a;
}

std::string assignment_str(const ClusterSpec& cluster, const std::vector<int>& slots) {
  std::string s = "(";
  for (std::size_t i = 0; i < slots.size(); ++i) {
    SlotId id = cluster.slot_id(slots[i]);
    if (i) s += " ";
    s += std::to_string(id.machine) + "." + std::to_string(id.slot);
  }
  return s + ")";
}

std::string config_str(const Scenario& s, const ConfigKey& key) {
  if (key.empty()) return "(empty)";
  std::string out;
  for (const TemplateKey& t : key) {
    if (!out.empty()) out += " + ";
    out += std::to_string(s.jobs[static_cast<std::size_t>(t.first)].id) +
           assignment_str(s.cluster, t.second);
  }
  return out;
}

int run_simulation(const Scenario& s, const GlobalOpts& g) {
  ExperimentResult r = run_experiment(s, g.trace);
  fs::path dir(g.out);
  {
    std::ofstream f = open_out(dir, "runs.csv");
    write_runs_csv(f, r.runs);
  }
  {
    std::ofstream f = open_out(dir, "aggregates.csv");
    write_aggregates_csv(f, r.aggregates);
  }
  for (const auto& [label, trace] : r.traces) {
    std::ofstream f = open_out(dir, "trace_" + label + ".jsonl");
    write_trace_jsonl(f, trace);
  }

  std::cout << s.name << ": " << r.runs.size() << " runs over " << r.aggregates.size()
            << (r.aggregates.size() == 1 ? " point" : " points") << ", engine " << s.engine
            << "\n";
  for (const AggregateRecord& a : r.aggregates) {
    std::cout << "  beta " << fmt_double(a.beta) << "  alpha " << fmt_double(a.alpha);
    if (s.policy.variant == PolicyVariant::FrameBased)
      std::cout << "  T " << fmt_double(a.frame_length);
    std::cout << "  queue " << fmt_double(a.mean_queue) << " +/- "
              << fmt_double(a.queue_halfwidth) << "  cost " << fmt_double(a.mean_cost)
              << " +/- " << fmt_double(a.cost_halfwidth);
    if (a.mean_interruptions > 0)
      std::cout << "  interruptions " << fmt_double(a.mean_interruptions);
    if (a.mean_drops > 0) std::cout << "  drops " << fmt_double(a.mean_drops);
    std::cout << "\n";
  }
  if (!r.reference.empty()) {
    double tv = 0;
    int n = 0;
    for (const RunRecord& run : r.runs)
      if (run.tv_to_reference) {
        tv += *run.tv_to_reference;
        ++n;
      }
    if (n > 0)
      std::cout << "  occupancy gap to the " << r.reference << " law: mean tv "
                << fmt_double(tv / n) << "\n";
  }
  std::cout << "wrote " << (dir / "runs.csv").string() << " and "
            << (dir / "aggregates.csv").string();
  if (!r.traces.empty()) std::cout << " and " << r.traces.size() << " trace files";
  std::cout << "\n";
  return 0;
}

int run_exact(const Scenario& s, const GlobalOpts& g, bool solve) {
  if (s.policy.mode != WeightMode::Fixed)
    throw ValidationError(
        "exact: stationary analysis needs policy.weights = fixed; freeze a table first");
  const PolicyVariant v = s.policy.variant;
  if (v != PolicyVariant::Dgp && v != PolicyVariant::Adgp)
    throw ValidationError(
        "exact: closed-form laws exist for the dgp and adgp template processes only");

  ConfigurationSpace space = enumerate_configurations(s.cluster, s.jobs, s.max_states);
  WeightModel wm = s.policy.weight_model(s.cluster.total_slots());
  const double beta = s.policy.params.beta;
  StationaryDistribution base =
      v == PolicyVariant::Dgp
          ? config_base_measure(space, s.loads())
          : config_base_measure_clocked(space, s.jobs, s.policy.params.clock_base_rate);
  StationaryDistribution closed = closed_form_stationary(
      space, base, [&](const Template& t) { return wm.fixed_weight(t); }, beta);
  std::vector<double> wsum = config_weight_sums(space, wm);

  double e_cost = 0, e_templates = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    e_cost += closed.p[i] * space.configs[i].total_cost();
    e_templates += closed.p[i] * static_cast<double>(space.configs[i].templates().size());
  }

  json doc;
  doc["scenario"] = s.name;
  doc["variant"] = policy_name(v);
  doc["beta"] = beta;
  doc["base"] = v == PolicyVariant::Dgp ? "free-process" : "dedicated-clock";
  doc["configurations"] = space.size();
  doc["expected_cost"] = e_cost;
  doc["expected_templates"] = e_templates;
  json entries = json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    json ts = json::array();
    for (const TemplateKey& t : space.keys[i])
      ts.push_back({{"type", s.jobs[static_cast<std::size_t>(t.first)].id},
                    {"assignment", assignment_json(s.cluster, t.second)}});
    entries.push_back({{"index", i},
                       {"templates", ts},
                       {"probability", closed.p[i]},
                       {"base_probability", base.p[i]},
                       {"weight_sum", wsum[i]}});
  }
  doc["entries"] = entries;

  std::cout << s.name << ": " << space.size() << " configurations, " << doc["base"].get<std::string>()
            << " base, beta " << fmt_double(beta) << "\n";
  std::cout << "  E[cost] = " << fmt_double(e_cost)
            << ", E[templates] = " << fmt_double(e_templates) << "\n";

  if (solve) {
    // the generator is dense, so cap the solve well below the general budget
    if (space.size() > 4096)
      throw StateSpaceTooLargeError("exact: the dense generator solve is capped at 4096 "
                                    "configurations, this space has " +
                                        std::to_string(space.size()),
                                    space.size());
    GeneratorVariant gv =
        v == PolicyVariant::Dgp ? GeneratorVariant::QueueDriven : GeneratorVariant::DedicatedClock;
    Eigen::MatrixXd Q = build_fixed_weight_generator(space, s.cluster, s.jobs, wm, gv);
    StationaryDistribution solved = solve_stationary(Q);
    double tv = total_variation(closed.p, solved.p);
    doc["solver"] = {{"residual", solved.residual}, {"tv_to_closed_form", tv}};
    std::cout << "  generator solve: residual " << fmt_double(solved.residual)
              << ", tv to the closed form " << fmt_double(tv) << "\n";
  }

  std::vector<std::size_t> order(space.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return closed.p[a] > closed.p[b]; });
  std::cout << "  most likely configurations:\n";
  for (std::size_t k = 0; k < std::min<std::size_t>(order.size(), 8); ++k)
    std::cout << "    " << fmt_double(closed.p[order[k]]) << "  "
              << config_str(s, space.keys[order[k]]) << "\n";

  fs::path dir(g.out);
  open_out(dir, "stationary.json") << doc.dump(2) << "\n";
  std::cout << "wrote " << (dir / "stationary.json").string() << "\n";
  return 0;
}

int run_static_opt(const Scenario& s, const GlobalOpts& g) {
  ConfigurationSpace space = enumerate_configurations(s.cluster, s.jobs, s.max_states);
  std::vector<double> rho = s.loads();
  StaticOptimum opt = static_optimum(space, rho);
  CapacityMargin margin = capacity_margin(space, rho);

  std::map<TemplateKey, double> cost_of;
  for (const Template& t : space.universe) cost_of[key_of(t)] = t.cost;

  json doc;
  doc["scenario"] = s.name;
  doc["objective"] = opt.objective;
  doc["unconstrained"] = margin.unconstrained;
  doc["infeasible"] = margin.infeasible;
  if (std::isfinite(margin.delta_star)) doc["delta_star"] = margin.delta_star;
  doc["per_type_total"] = opt.per_type_total;
  json placements = json::array();
  for (const auto& [key, x] : opt.x)
    placements.push_back({{"type", s.jobs[static_cast<std::size_t>(key.first)].id},
                          {"assignment", assignment_json(s.cluster, key.second)},
                          {"fraction", x},
                          {"cost", cost_of.at(key)}});
  doc["placements"] = placements;
  json pi = json::array();
  for (std::size_t i = 0; i < opt.pi.size(); ++i)
    if (opt.pi[i] > 1e-12) pi.push_back({{"index", i}, {"probability", opt.pi[i]}});
  doc["pi"] = pi;

  std::cout << s.name << ": optimum cost " << fmt_double(opt.objective);
  if (margin.unconstrained)
    std::cout << ", margin unconstrained (zero load)";
  else
    std::cout << ", margin delta* " << fmt_double(margin.delta_star);
  std::cout << "\n";
  std::vector<std::pair<TemplateKey, double>> rows(opt.x.begin(), opt.x.end());
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [key, x] : rows)
    std::cout << "  x " << fmt_double(x) << "  type "
              << s.jobs[static_cast<std::size_t>(key.first)].id
              << assignment_str(s.cluster, key.second) << "  cost " << fmt_double(cost_of.at(key))
              << "\n";

  fs::path dir(g.out);
  open_out(dir, "static_opt.json") << doc.dump(2) << "\n";
  std::cout << "wrote " << (dir / "static_opt.json").string() << "\n";
  return 0;
}

int run_bounds(const Scenario& s, const GlobalOpts& g, const BoundConstants& constants) {
  BoundFamily family;
  switch (s.policy.variant) {
    case PolicyVariant::FrameBased:
      family = BoundFamily::FrameBased;
      break;
    case PolicyVariant::Dgp:
    case PolicyVariant::Adgp:
      family = BoundFamily::QueueDriven;
      break;
    default:
      throw ValidationError("bounds: the round-robin baseline has no closed-form guarantees");
  }
  ConfigurationSpace space = enumerate_configurations(s.cluster, s.jobs, s.max_states);
  BoundReport rep = theorem_bounds(family, space, s.loads(), s.policy.params, constants);

  json doc;
  doc["scenario"] = s.name;
  doc["family"] = family == BoundFamily::FrameBased ? "frame" : "queue-driven";
  doc["beta"] = rep.params.beta;
  doc["alpha"] = rep.params.alpha;
  doc["epsilon"] = rep.params.epsilon;
  doc["h"] = rep.params.h;
  doc["b"] = rep.params.b;
  doc["frame_length"] = rep.params.frame_length;
  doc["rho"] = rep.rho;
  doc["rho_min"] = rep.rho_min;
  doc["delta_star"] = rep.delta_star;
  doc["optimum"] = rep.optimum;
  doc["b_max"] = rep.b_max;
  doc["queue_bound"] = rep.queue_bound;
  doc["cost_bound"] = rep.cost_bound;
  if (family == BoundFamily::QueueDriven) {
    doc["gamma_min"] = rep.gamma_min;
    doc["log_gamma_min"] = rep.log_gamma_min;
    doc["k2"] = rep.k2;
    doc["k3"] = rep.k3;
    doc["params_in_range"] = rep.params_in_range;
    doc["h_large_enough"] = rep.h_large_enough;
  }

  std::cout << s.name << ": " << doc["family"].get<std::string>()
            << " family, delta* " << fmt_double(rep.delta_star) << ", optimum "
            << fmt_double(rep.optimum) << ", b_max " << fmt_double(rep.b_max) << "\n";
  std::cout << "  queue bound " << fmt_double(rep.queue_bound) << " (mean urgency), cost bound "
            << fmt_double(rep.cost_bound) << "\n";
  if (family == BoundFamily::QueueDriven)
    std::cout << "  k2 " << fmt_double(rep.k2) << ", k3 " << fmt_double(rep.k3)
              << ", log gamma_min " << fmt_double(rep.log_gamma_min) << ", params in range "
              << (rep.params_in_range ? "yes" : "no") << ", h large enough "
              << (rep.h_large_enough ? "yes" : "no") << "\n";

  fs::path dir(g.out);
  open_out(dir, "bounds.json") << doc.dump(2) << "\n";
  std::cout << "wrote " << (dir / "bounds.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic placement of job graphs on cluster slots: simulation, exact "
               "stationary analysis and performance guarantees"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "override the scenario's seed list with one seed");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_flag("--trace", g.trace, "write one JSONL event trace per run");
  app.add_option("--max-states", g.max_states, "configuration budget for exact structures");

  std::string scenario_path;
  bool solve = false;
  BoundConstants constants;
  std::vector<double> sw_beta, sw_alpha, sw_epsilon, sw_h, sw_frame;
  bool sw_preset = false;

  CLI::App* sim = app.add_subcommand("simulate", "run the scenario, write runs and aggregates");
  CLI::App* swp = app.add_subcommand("sweep", "run a parameter grid over the scenario");
  CLI::App* exc = app.add_subcommand("exact", "closed-form stationary law of fixed weights");
  CLI::App* sopt = app.add_subcommand("static-opt", "minimum-cost static plan and margin");
  CLI::App* bnd = app.add_subcommand("bounds", "closed-form queue and cost guarantees");
  for (CLI::App* sub : {sim, swp, exc, sopt, bnd}) {
    sub->add_option("scenario", scenario_path, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->fallthrough();
  }
  exc->add_flag("--solve", solve, "also solve the generator and report the gap");
  bnd->add_option("--c0", constants.C0, "constant in the h-threshold check");
  bnd->add_option("--b1", constants.B1, "frame-family constant B1");
  bnd->add_option("--b2", constants.B2, "frame-family constant B2");
  swp->set_help_flag("--help", "print help");  // frees -h for the offset option below
  swp->add_option("--beta", sw_beta, "temperatures to sweep")->delimiter(',');
  swp->add_option("--alpha", sw_alpha, "urgency scales to sweep")->delimiter(',');
  swp->add_option("--epsilon", sw_epsilon, "floor couplings to sweep")->delimiter(',');
  swp->add_option("--h", sw_h, "queue offsets to sweep")->delimiter(',');
  swp->add_option("--frame-length", sw_frame, "frame lengths to sweep")->delimiter(',');
  swp->add_flag("--preset", sw_preset, "derive alpha, epsilon and h from each beta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Scenario s = load_scenario_file(scenario_path);
    if (g.seed) s.seeds = {*g.seed};
    if (g.max_states) s.max_states = *g.max_states;

    if (swp->parsed()) {
      bool any = !sw_beta.empty() || !sw_alpha.empty() || !sw_epsilon.empty() ||
                 !sw_h.empty() || !sw_frame.empty() || sw_preset;
      if (any) {
        SweepSpec sw;
        sw.beta = sw_beta;
        sw.alpha = sw_alpha;
        sw.epsilon = sw_epsilon;
        sw.h = sw_h;
        sw.frame_length = sw_frame;
        sw.preset = sw_preset;
        if (sw.preset && sw.beta.empty())
          throw ValidationError("sweep: --preset needs --beta values to derive from");
        if (sw.preset && !(sw.alpha.empty() && sw.epsilon.empty() && sw.h.empty()))
          throw ValidationError("sweep: --preset derives alpha/epsilon/h, drop those flags");
        s.sweep = sw;
      }
      if (s.sweep.empty())
        throw ValidationError("sweep: nothing to sweep; pass --beta or friends, or put a "
                              "sweep block in the scenario");
      return run_simulation(s, g);
    }
    if (sim->parsed()) return run_simulation(s, g);
    if (exc->parsed()) return run_exact(s, g, solve);
    if (sopt->parsed()) return run_static_opt(s, g);
    return run_bounds(s, g, constants);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleLoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const StateSpaceTooLargeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed document: " << e.what() << "\n";
    return 2;
  }
}
