#pragma once

#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gpack/bounds.hpp"
#include "gpack/enumerate.hpp"
#include "gpack/policy.hpp"

namespace gpack {

using nlohmann::json;

// Parameter sweep: absent lists inherit the base policy value; `preset`
// derives alpha, epsilon and h from each beta instead.
struct SweepSpec {
  std::vector<double> beta, alpha, epsilon, h, frame_length;
  bool preset = false;
  bool empty() const {
    return beta.empty() && alpha.empty() && epsilon.empty() && h.empty() &&
           frame_length.empty() && !preset;
  }
};

struct Scenario {
  explicit Scenario(ClusterSpec c) : cluster(std::move(c)) {}

  std::string name = "scenario";
  ClusterSpec cluster;
  std::vector<JobType> jobs;
  SchedulerPolicy policy;
  std::string engine = "continuous";  // continuous | jump | loss
  double horizon = 1000.0;
  std::uint64_t steps = 100000;       // jump chain length
  std::vector<std::uint64_t> seeds = {1};
  double warmup_fraction = 0.1;
  std::uint64_t max_states = 100000;
  bool track_occupancy = true;  // attempt exact-space occupancy when it fits
  SweepSpec sweep;

  std::vector<double> loads() const {
    std::vector<double> out(jobs.size());
    for (std::size_t j = 0; j < jobs.size(); ++j) out[j] = jobs[j].load();
    return out;
  }
};

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                                const std::string& where, std::vector<std::string>& errors) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) errors.push_back(where + ": unknown key '" + it.key() + "'");
}

inline double get_num(const json& obj, const char* key, double fallback,
                      std::vector<std::string>& errors, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    errors.push_back(where + "." + key + ": expected a number");
    return fallback;
  }
  return obj[key].get<double>();
}

}  // namespace detail

// Parse and validate a scenario document, reporting every violation at once.
inline Scenario load_scenario(const json& doc) {
  std::vector<std::string> errors;
  if (!doc.is_object()) throw ValidationError("scenario: document must be a JSON object");

  detail::reject_unknown_keys(
      doc,
      {"name", "cluster", "job_types", "policy", "engine", "horizon", "steps", "seeds", "seed",
       "warmup_fraction", "max_states", "track_occupancy", "sweep"},
      "scenario", errors);

  // cluster
  std::vector<ClusterSpec::Machine> machines;
  if (!doc.contains("cluster") || !doc["cluster"].is_object() ||
      !doc["cluster"].contains("machines") || !doc["cluster"]["machines"].is_array() ||
      doc["cluster"]["machines"].empty()) {
    errors.push_back("cluster.machines: a nonempty machine list is required");
  } else {
    std::set<int> ids;
    for (std::size_t i = 0; i < doc["cluster"]["machines"].size(); ++i) {
      const json& m = doc["cluster"]["machines"][i];
      std::string where = "cluster.machines[" + std::to_string(i) + "]";
      int id = m.value("id", static_cast<int>(i));
      int slots = m.value("slots", 0);
      if (slots < 1) errors.push_back(where + ": slots must be >= 1");
      if (!ids.insert(id).second) {
        // keep the list constructible so the remaining checks still run
        errors.push_back(where + ": duplicate machine id");
        continue;
      }
      machines.push_back({id, std::max(slots, 1)});
    }
  }
  if (machines.empty()) machines.push_back({0, 1});
  ClusterSpec cluster(std::move(machines));
  Scenario s(cluster);
  const int M = s.cluster.total_slots();

  s.name = doc.value("name", std::string("scenario"));

  // job types
  if (!doc.contains("job_types") || !doc["job_types"].is_array() || doc["job_types"].empty()) {
    errors.push_back("job_types: a nonempty list is required");
  } else {
    std::set<int> ids;
    for (std::size_t i = 0; i < doc["job_types"].size(); ++i) {
      const json& jt = doc["job_types"][i];
      std::string where = "job_types[" + std::to_string(i) + "]";
      JobType j;
      j.id = jt.value("id", static_cast<int>(i));
      j.node_count = jt.value("nodes", 0);
      j.arrival_rate = jt.value("arrival_rate", 0.0);
      j.service_rate = jt.value("service_rate", 1.0);
      if (jt.contains("edges")) {
        if (!jt["edges"].is_array()) {
          errors.push_back(where + ".edges: expected an array of [u, v] or [u, v, weight]");
        } else {
          for (const json& e : jt["edges"]) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3) {
              errors.push_back(where + ".edges: entries must be [u, v] or [u, v, weight]");
              continue;
            }
            Edge ed;
            ed.u = e[0].get<int>();
            ed.v = e[1].get<int>();
            ed.weight = e.size() == 3 ? e[2].get<double>() : 1.0;
            j.edges.push_back(ed);
          }
        }
      }
      if (!ids.insert(j.id).second) errors.push_back(where + ": duplicate job type id");
      for (const std::string& msg : validate_job_type(j, M, where)) errors.push_back(msg);
      s.jobs.push_back(std::move(j));
    }
  }

  // policy
  const json policy = doc.contains("policy") && doc["policy"].is_object() ? doc["policy"] : json::object();
  detail::reject_unknown_keys(policy,
                              {"variant", "weights", "beta", "alpha", "epsilon", "h", "b",
                               "frame_length", "clock_base_rate", "fixed_weights"},
                              "policy", errors);
  std::string variant = policy.value("variant", std::string("dgp"));
  if (variant == "dgp") s.policy.variant = PolicyVariant::Dgp;
  else if (variant == "adgp") s.policy.variant = PolicyVariant::Adgp;
  else if (variant == "frame") s.policy.variant = PolicyVariant::FrameBased;
  else if (variant == "round-robin") s.policy.variant = PolicyVariant::RoundRobin;
  else errors.push_back("policy.variant: must be dgp, adgp, frame or round-robin");

  std::string weights = policy.value("weights", std::string("live"));
  if (weights == "live") s.policy.mode = WeightMode::Live;
  else if (weights == "fixed") s.policy.mode = WeightMode::Fixed;
  else errors.push_back("policy.weights: must be live or fixed");

  SchedulerParams& p = s.policy.params;
  p.beta = detail::get_num(policy, "beta", 0.5, errors, "policy");
  p.alpha = detail::get_num(policy, "alpha", p.beta * p.beta, errors, "policy");
  p.epsilon = detail::get_num(policy, "epsilon", 0.1, errors, "policy");
  p.h = detail::get_num(policy, "h", 2.718281828459045, errors, "policy");
  p.b = detail::get_num(policy, "b", 0.5, errors, "policy");
  p.frame_length = detail::get_num(policy, "frame_length", 1.0, errors, "policy");
  p.clock_base_rate = detail::get_num(policy, "clock_base_rate", 1.0, errors, "policy");
  try {
    p.validate();
  } catch (const ValidationError& e) {
    errors.push_back(e.what());
  }

  // fixed weight tables
  if (s.policy.mode == WeightMode::Fixed) {
    if (!policy.contains("fixed_weights") || !policy["fixed_weights"].is_object()) {
      errors.push_back("policy.fixed_weights: required when weights = fixed");
    } else {
      const json& fw = policy["fixed_weights"];
      detail::reject_unknown_keys(fw, {"per_type", "table"}, "policy.fixed_weights", errors);
      if (fw.contains("per_type")) {
        if (!fw["per_type"].is_array() || fw["per_type"].size() != s.jobs.size()) {
          errors.push_back("policy.fixed_weights.per_type: need one value per job type");
        } else {
          for (const json& v : fw["per_type"]) s.policy.fixed_per_type.push_back(v.get<double>());
        }
      } else if (fw.contains("table")) {
        if (s.policy.variant == PolicyVariant::Adgp) {
          errors.push_back(
              "policy.fixed_weights.table: the dedicated-clock variant takes per-type queue "
              "terms, not per-template tables");
        } else if (!fw["table"].is_array()) {
          errors.push_back("policy.fixed_weights.table: expected an array");
        } else {
          for (std::size_t i = 0; i < fw["table"].size(); ++i) {
            const json& row = fw["table"][i];
            std::string where = "policy.fixed_weights.table[" + std::to_string(i) + "]";
            if (!row.is_object() || !row.contains("type") || !row.contains("assignment") ||
                !row.contains("weight")) {
              errors.push_back(where + ": need type, assignment and weight");
              continue;
            }
            int tid = row["type"].get<int>();
            int tpos = -1;
            for (std::size_t j = 0; j < s.jobs.size(); ++j)
              if (s.jobs[j].id == tid) tpos = static_cast<int>(j);
            if (tpos < 0) {
              errors.push_back(where + ": unknown job type id " + std::to_string(tid));
              continue;
            }
            std::vector<int> assignment;
            bool ok = true;
            for (const json& pr : row["assignment"]) {
              if (!pr.is_array() || pr.size() != 2) {
                errors.push_back(where + ".assignment: entries must be [machine, slot]");
                ok = false;
                break;
              }
              try {
                assignment.push_back(
                    s.cluster.global_index({pr[0].get<int>(), pr[1].get<int>()}));
              } catch (const ValidationError& e) {
                errors.push_back(where + ".assignment: " + e.what());
                ok = false;
                break;
              }
            }
            if (!ok) continue;
            try {
              check_assignment(assignment, s.jobs[static_cast<std::size_t>(tpos)], s.cluster);
            } catch (const InvalidTemplateError& e) {
              errors.push_back(where + ": " + e.what());
              continue;
            }
            s.policy.fixed_table[{tpos, assignment}] = row["weight"].get<double>();
          }
        }
      } else {
        errors.push_back("policy.fixed_weights: need per_type or table");
      }
    }
  }

  // engine and run shape
  s.engine = doc.value("engine", std::string("continuous"));
  if (s.engine != "continuous" && s.engine != "jump" && s.engine != "loss")
    errors.push_back("engine: must be continuous, jump or loss");
  if (s.engine == "jump" &&
      (s.policy.variant == PolicyVariant::Adgp || s.policy.variant == PolicyVariant::FrameBased))
    errors.push_back("engine: the jump chain supports only dgp and round-robin policies");
  s.horizon = detail::get_num(doc, "horizon", 1000.0, errors, "scenario");
  if (!(s.horizon >= 0)) errors.push_back("horizon: must be >= 0");
  if (doc.contains("steps")) {
    // parsed documents carry unsigned numbers, built ones may carry signed
    const json& st = doc["steps"];
    bool ok = (st.is_number_unsigned() && st.get<std::uint64_t>() > 0) ||
              (st.is_number_integer() && st.get<std::int64_t>() > 0);
    if (!ok)
      errors.push_back("steps: must be a positive integer");
    else
      s.steps = st.get<std::uint64_t>();
  }
  s.seeds.clear();
  if (doc.contains("seeds")) {
    if (!doc["seeds"].is_array() || doc["seeds"].empty())
      errors.push_back("seeds: must be a nonempty array");
    else
      for (const json& v : doc["seeds"]) s.seeds.push_back(v.get<std::uint64_t>());
  } else if (doc.contains("seed")) {
    s.seeds.push_back(doc["seed"].get<std::uint64_t>());
  } else {
    s.seeds.push_back(1);
  }
  s.warmup_fraction = detail::get_num(doc, "warmup_fraction", 0.1, errors, "scenario");
  if (s.warmup_fraction < 0 || s.warmup_fraction >= 1)
    errors.push_back("warmup_fraction: must lie in [0, 1)");
  if (doc.contains("max_states")) s.max_states = doc["max_states"].get<std::uint64_t>();
  s.track_occupancy = doc.value("track_occupancy", true);

  // sweep
  if (doc.contains("sweep")) {
    const json& sw = doc["sweep"];
    detail::reject_unknown_keys(sw, {"beta", "alpha", "epsilon", "h", "frame_length", "preset"},
                                "sweep", errors);
    auto grab = [&](const char* key, std::vector<double>& into) {
      if (!sw.contains(key)) return;
      if (!sw[key].is_array() || sw[key].empty()) {
        errors.push_back(std::string("sweep.") + key + ": must be a nonempty array");
        return;
      }
      for (const json& v : sw[key]) into.push_back(v.get<double>());
    };
    grab("beta", s.sweep.beta);
    grab("alpha", s.sweep.alpha);
    grab("epsilon", s.sweep.epsilon);
    grab("h", s.sweep.h);
    grab("frame_length", s.sweep.frame_length);
    s.sweep.preset = sw.value("preset", false);
    if (s.sweep.preset && s.sweep.beta.empty())
      errors.push_back("sweep.preset: needs a beta list to derive from");
    if (s.sweep.preset && !(s.sweep.alpha.empty() && s.sweep.epsilon.empty() && s.sweep.h.empty()))
      errors.push_back("sweep.preset: alpha/epsilon/h are derived and cannot also be swept");
  }

  // fixed-table coverage: every feasible template needs a weight
  if (errors.empty() && s.policy.mode == WeightMode::Fixed && !s.policy.fixed_table.empty()) {
    Configuration empty(M, s.jobs.size());
    for (std::size_t j = 0; j < s.jobs.size(); ++j) {
      std::uint64_t count = feasible_template_count(M, s.jobs[j].node_count);
      if (count > s.max_states) {
        errors.push_back("policy.fixed_weights.table: job type " + std::to_string(s.jobs[j].id) +
                         " has " + std::to_string(count) +
                         " feasible templates, too many to cover explicitly (max_states = " +
                         std::to_string(s.max_states) + ")");
        continue;
      }
      for (const Template& t :
           enumerate_feasible_templates(empty, static_cast<int>(j), s.jobs[j], s.cluster)) {
        if (!s.policy.fixed_table.count(key_of(t)))
          errors.push_back("policy.fixed_weights.table: no weight for a feasible placement of "
                           "job type " +
                           std::to_string(s.jobs[j].id));
      }
      // one message per type is enough
      auto last = std::unique(errors.begin(), errors.end());
      errors.erase(last, errors.end());
    }
  }

  if (!errors.empty()) {
    std::string all = "scenario validation failed:";
    for (const std::string& e : errors) all += "\n  - " + e;
    throw ValidationError(all);
  }
  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError("scenario: " + path + " is not valid JSON: " + e.what());
  }
  return load_scenario(doc);
}

inline json scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  json ms = json::array();
  for (const auto& m : s.cluster.machines()) ms.push_back({{"id", m.id}, {"slots", m.slot_count}});
  doc["cluster"] = {{"machines", ms}};
  json jts = json::array();
  for (const JobType& j : s.jobs) {
    json e = json::array();
    for (const Edge& ed : j.edges) e.push_back({ed.u, ed.v, ed.weight});
    jts.push_back({{"id", j.id},
                   {"nodes", j.node_count},
                   {"edges", e},
                   {"arrival_rate", j.arrival_rate},
                   {"service_rate", j.service_rate}});
  }
  doc["job_types"] = jts;
  json pol;
  pol["variant"] = policy_name(s.policy.variant);
  pol["weights"] = s.policy.mode == WeightMode::Live ? "live" : "fixed";
  pol["beta"] = s.policy.params.beta;
  pol["alpha"] = s.policy.params.alpha;
  pol["epsilon"] = s.policy.params.epsilon;
  pol["h"] = s.policy.params.h;
  pol["b"] = s.policy.params.b;
  pol["frame_length"] = s.policy.params.frame_length;
  pol["clock_base_rate"] = s.policy.params.clock_base_rate;
  if (s.policy.mode == WeightMode::Fixed) {
    json fw;
    if (!s.policy.fixed_per_type.empty()) {
      fw["per_type"] = s.policy.fixed_per_type;
    } else {
      json table = json::array();
      for (const auto& [key, w] : s.policy.fixed_table) {
        json assignment = json::array();
        for (int slot : key.second) {
          SlotId sid = s.cluster.slot_id(slot);
          assignment.push_back({sid.machine, sid.slot});
        }
        table.push_back({{"type", s.jobs[static_cast<std::size_t>(key.first)].id},
                         {"assignment", assignment},
                         {"weight", w}});
      }
      fw["table"] = table;
    }
    pol["fixed_weights"] = fw;
  }
  doc["policy"] = pol;
  doc["engine"] = s.engine;
  doc["horizon"] = s.horizon;
  doc["steps"] = s.steps;
  doc["seeds"] = s.seeds;
  doc["warmup_fraction"] = s.warmup_fraction;
  doc["max_states"] = s.max_states;
  doc["track_occupancy"] = s.track_occupancy;
  if (!s.sweep.empty()) {
    json sw;
    if (!s.sweep.beta.empty()) sw["beta"] = s.sweep.beta;
    if (!s.sweep.alpha.empty()) sw["alpha"] = s.sweep.alpha;
    if (!s.sweep.epsilon.empty()) sw["epsilon"] = s.sweep.epsilon;
    if (!s.sweep.h.empty()) sw["h"] = s.sweep.h;
    if (!s.sweep.frame_length.empty()) sw["frame_length"] = s.sweep.frame_length;
    if (s.sweep.preset) sw["preset"] = true;
    doc["sweep"] = sw;
  }
  return doc;
}

// Expand the sweep into concrete parameter points, preserving list order:
// the cross product iterates beta outermost, then alpha, epsilon, h, T.
inline std::vector<SchedulerParams> expand_sweep(const Scenario& s) {
  const SweepSpec& sw = s.sweep;
  std::vector<SchedulerParams> out;
  if (sw.empty()) {
    out.push_back(s.policy.params);
    return out;
  }
  if (sw.preset) {
    for (double beta : sw.beta) {
      SchedulerParams p = preset_from_beta(beta, s.policy.params.b);
      p.frame_length = s.policy.params.frame_length;
      p.clock_base_rate = s.policy.params.clock_base_rate;
      if (!sw.frame_length.empty()) {
        for (double T : sw.frame_length) {
          p.frame_length = T;
          out.push_back(p);
        }
      } else {
        out.push_back(p);
      }
    }
    return out;
  }
  auto pick = [](const std::vector<double>& v, double fallback) {
    return v.empty() ? std::vector<double>{fallback} : v;
  };
  const SchedulerParams& base = s.policy.params;
  bool alpha_tracks_beta = sw.alpha.empty();
  for (double beta : pick(sw.beta, base.beta))
    for (double alpha : pick(sw.alpha, base.alpha))
      for (double eps : pick(sw.epsilon, base.epsilon))
        for (double h : pick(sw.h, base.h))
          for (double T : pick(sw.frame_length, base.frame_length)) {
            SchedulerParams p = base;
            p.beta = beta;
            p.alpha = alpha_tracks_beta && !sw.beta.empty() ? beta * beta : alpha;
            p.epsilon = eps;
            p.h = h;
            p.frame_length = T;
            p.validate();
            out.push_back(p);
          }
  return out;
}

}  // namespace gpack
