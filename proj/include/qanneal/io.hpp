#pragma once

// JSON records and CSV sweeps. Field order is fixed (ordered_json) so that equal
// inputs serialize to identical bytes.

#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qanneal/baseline.hpp"
#include "qanneal/circuit.hpp"
#include "qanneal/cost.hpp"
#include "qanneal/ensemble.hpp"
#include "qanneal/errors.hpp"

namespace qanneal {

using Json = nlohmann::ordered_json;

inline Json to_json(const CostFunction& cost) {
  Json terms = Json::array();
  for (const auto& t : cost.terms()) {
    Json term;
    term["qubits"] = t.qubits;
    term["values"] = t.values;
    terms.push_back(std::move(term));
  }
  Json j;
  j["n"] = cost.n();
  j["constant"] = cost.constant();
  j["terms"] = std::move(terms);
  j["c_min"] = cost.c_min();
  j["c_max"] = cost.c_max();
  return j;
}

inline Json to_json(const GraphPartitionInstance& g) {
  Json edges = Json::array();
  for (const auto& [a, b] : g.edges) edges.push_back(Json::array({a, b}));
  Json j;
  j["v"] = g.v;
  j["edges"] = std::move(edges);
  j["j"] = g.j;
  j["lambda"] = g.lambda;
  j["p"] = g.p;
  return j;
}

namespace detail {

template <class T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("instance is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("field '") + key + "' has the wrong type: " + e.what());
  }
}

}  // namespace detail

/// Bounds are optional; missing bounds are derived.
inline CostFunction cost_from_json(const Json& j) {
  const auto n = detail::required<unsigned>(j, "n");
  const double constant = j.contains("constant") ? detail::required<double>(j, "constant") : 0.0;
  std::vector<LocalTerm> terms;
  if (j.contains("terms")) {
    for (const auto& t : j.at("terms")) {
      terms.push_back(LocalTerm{detail::required<std::vector<unsigned>>(t, "qubits"),
                                detail::required<std::vector<double>>(t, "values")});
    }
  }
  if (j.contains("c_min") != j.contains("c_max")) {
    throw InputError("c_min and c_max must be given together");
  }
  if (j.contains("c_min")) {
    return CostFunction(n, constant, std::move(terms), detail::required<double>(j, "c_min"),
                        detail::required<double>(j, "c_max"));
  }
  return CostFunction::with_derived_bounds(n, constant, std::move(terms));
}

inline GraphPartitionInstance graph_from_json(const Json& j) {
  std::vector<std::pair<unsigned, unsigned>> edges;
  for (const auto& e : detail::required<std::vector<std::vector<unsigned>>>(j, "edges")) {
    if (e.size() != 2) throw InputError("edge must be a pair of vertex indices");
    edges.emplace_back(e[0], e[1]);
  }
  return make_graph_instance(detail::required<unsigned>(j, "v"), std::move(edges),
                             j.contains("j") ? detail::required<double>(j, "j") : 1.0,
                             j.contains("lambda") ? detail::required<double>(j, "lambda") : 0.0,
                             j.contains("p") ? detail::required<double>(j, "p") : 0.0);
}

/// A cost instance ({"n": ...}) or a graph instance ({"v": ...}) mapped to its cost.
inline CostFunction instance_from_json(const Json& j) {
  if (j.contains("v")) return graph_partition_cost(graph_from_json(j));
  if (j.contains("n")) return cost_from_json(j);
  throw InputError("instance is neither a cost (\"n\") nor a graph (\"v\")");
}

inline Json run_report(const RunOutcome& out, unsigned n, unsigned b, SamplingMode mode,
                       std::uint64_t seed) {
  Json j;
  j["b"] = b;
  j["mode"] = std::string(to_string(mode));
  j["repetitions"] = out.repetitions;
  j["result"] = to_bitstring(out.result, n);
  j["cost"] = out.cost_value;
  j["seed"] = seed;
  return j;
}

inline Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json to_json(const LoadComparison& rec) {
  Json quantum;
  quantum["b"] = rec.b;
  quantum["p0b"] = rec.p0b;
  quantum["expected_repetitions"] = rec.expected_repetitions;
  quantum["load"] = rec.expected_repetitions;
  quantum["effective_cost"] = rec.effective_cost;
  quantum["accuracy"] = optional_number(rec.accuracy);
  quantum["optimum_probability"] = rec.optimum_probability;
  quantum["most_probable_is_optimum"] = rec.mode_is_optimum;

  Json ladder = Json::array();
  for (const auto& r : rec.ladder) {
    Json rung;
    rung["steps"] = r.steps;
    rung["evaluations_per_run"] = r.evaluations_per_run;
    rung["mean_best_cost"] = r.mean_best_cost;
    rung["accuracy"] = optional_number(r.accuracy);
    rung["optimum_hits"] = r.optimum_hits;
    ladder.push_back(std::move(rung));
  }
  Json sa;
  sa["t_start"] = rec.schedule.t_start;
  sa["t_end"] = rec.schedule.t_end;
  sa["trials"] = rec.trials;
  sa["seed"] = rec.seed;
  sa["target_cost"] = rec.effective_cost;
  sa["evaluations_to_match"] =
      rec.evaluations_to_match ? Json(*rec.evaluations_to_match) : Json(nullptr);
  sa["load"] = sa["evaluations_to_match"];
  sa["ladder"] = std::move(ladder);

  Json j;
  j["optimum_cost"] = rec.optimum_cost;
  j["optimum_count"] = rec.optimum_count;
  j["c_inf"] = rec.c_inf;
  j["quantum"] = std::move(quantum);
  j["simulated_annealing"] = std::move(sa);
  j["load_accounting"] = rec.note;
  return j;
}

/// printf %.17g
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline constexpr const char* kSweepHeader =
    "b,t,F,U,S,C_eff,C_eff_nor,Delta,accuracy,P0b,expected_repetitions,"
    "S_gibbs,C_inf,C_opt,degenerate,checks";

/// One row per point. accuracy is empty for degenerate instances. `checks` is
/// "ok" when F = U - tS holds to 1e-9 and both entropy routes agree, otherwise it
/// lists the failing checks separated by '|'.
inline void write_sweep_csv(std::ostream& out, std::span<const ThermoPoint> points, bool degenerate) {
  out << kSweepHeader << '\n';
  for (const auto& p : points) {
    std::string checks;
    if (p.identity_residual() > 1e-9) checks += "identity";
    if (!p.entropy_consistent()) checks += checks.empty() ? "entropy" : "|entropy";
    if (checks.empty()) checks = "ok";
    out << format_number(p.b) << ',' << format_number(p.t) << ',' << format_number(p.f) << ','
        << format_number(p.u) << ',' << format_number(p.s) << ',' << format_number(p.c_eff) << ','
        << format_number(p.c_eff_nor) << ',' << format_number(p.delta) << ','
        << (p.accuracy ? format_number(*p.accuracy) : std::string()) << ','
        << format_number(p.p0b) << ',' << format_number(p.expected_repetitions) << ','
        << format_number(p.s_gibbs) << ',' << format_number(p.c_inf) << ','
        << format_number(p.c_opt) << ',' << (degenerate ? 1 : 0) << ',' << checks << '\n';
  }
}

}  // namespace qanneal
