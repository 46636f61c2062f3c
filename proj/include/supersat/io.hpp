#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "supersat/amplifier.hpp"
#include "supersat/counting.hpp"
#include "supersat/equation.hpp"
#include "supersat/extremal.hpp"
#include "supersat/geometry.hpp"

namespace supersat {

using json = nlohmann::json;

struct SetFileContents {
  std::optional<i64> declared_n;
  std::vector<i64> members;
};

// Set files are either plain text (one integer per line, '#' comments) or
// JSON {"n": N, "members": [...]}.
inline SetFileContents read_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open set file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  SetFileContents out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json j = json::parse(text);
    if (j.contains("n")) out.declared_n = j.at("n").get<i64>();
    for (const auto& v : j.at("members")) out.members.push_back(v.get<i64>());
    return out;
  }

  std::stringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::stringstream ls(line);
    i64 v;
    while (ls >> v) out.members.push_back(v);
  }
  return out;
}

inline void write_set_file(const std::string& path, const std::vector<i64>& members,
                           const std::string& header = {}) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write set file: " + path);
  if (!header.empty()) out << "# " << header << "\n";
  for (const i64 v : members) out << v << "\n";
}

inline json equation_to_json(const InvariantEquation& eq) {
  return json{{"coeffs", eq.coeffs()}};
}

inline InvariantEquation equation_from_json(const json& j) {
  std::vector<i64> coeffs;
  for (const auto& v : j.at("coeffs")) coeffs.push_back(v.get<i64>());
  return InvariantEquation::parse(std::move(coeffs));
}

inline json sphere_cap_to_json(const SphereCap& cap) {
  json pts = json::array();
  for (const auto& p : cap.points) pts.push_back(p);
  return json{{"t", cap.t}, {"d", cap.d}, {"r", cap.r}, {"points", pts}};
}

inline json extremal_to_json(const ExtremalRecord& rec) {
  return json{{"n", rec.n},
              {"max_free_size", rec.max_free_size},
              {"witness", rec.witness}};
}

inline json threshold_to_json(const ThresholdEstimate& est) {
  std::vector<i64> table(est.max_free_table.begin() + 1, est.max_free_table.end());
  return json{{"epsilon", est.epsilon.value()},
              {"epsilon_num", est.epsilon.num},
              {"epsilon_den", est.epsilon.den},
              {"horizon", est.horizon},
              {"r_hat", est.r_hat},
              {"certified", est.certified},
              {"max_free_table", table}};
}

inline json min_count_to_json(const MinCountEstimate& est) {
  return json{{"n", est.n},
              {"m", est.m},
              {"min_count", est.min_count},
              {"exact", est.exact},
              {"witness", est.witness}};
}

inline json fiber_count_to_json(const AffineFiberCount& fc, i64 p, i64 d) {
  json j{{"p", p},
         {"d", d},
         {"consistent", fc.consistent},
         {"rank", fc.rank},
         {"degenerate", fc.degenerate},
         {"exponent", fc.exponent}};
  // count fits an i64 only for small exponents; report it when it does
  i128 count = fc.consistent ? 1 : 0;
  bool fits = true;
  for (i64 i = 0; i < fc.exponent && fits; ++i) {
    count *= p;
    if (count > i128{std::numeric_limits<i64>::max()}) fits = false;
  }
  if (fits) j["count"] = static_cast<i64>(count);
  return j;
}

inline json report_to_json(const AmplifierReport& rep) {
  json j;
  j["equation"] = rep.equation;
  j["pipeline"] = rep.pipeline;
  j["p"] = rep.p;
  j["set_size"] = rep.set_size;
  j["epsilon"] = rep.epsilon;
  j["epsilon_num"] = rep.eps_num;
  j["epsilon_den"] = rep.eps_den;
  j["C"] = rep.C;
  j["t"] = rep.t;
  j["d"] = rep.d;
  j["cap_size"] = rep.cap_size;
  j["trials"] = rep.trials;
  j["full_enum"] = rep.full_enum;
  j["seed"] = rep.seed;
  j["good_count"] = rep.good_count;
  j["good_fraction"] = rep.good_fraction;
  j["mean_fiber"] = rep.mean_fiber;
  j["fiber_sum"] = rep.fiber_sum;
  j["extraction_failures"] = rep.extraction_failures;
  j["degenerate_images"] = rep.degenerate_images;
  j["solutions_emitted"] = rep.solutions_emitted;
  j["distinct_solutions"] = rep.distinct_solutions;
  j["validity_failures"] = rep.validity_failures;
  j["helpful_tuple_count"] = rep.helpful_tuple_count;
  j["max_multiplicity"] = rep.max_multiplicity;
  j["theoretical_floor"] = rep.theoretical_floor;
  if (rep.floor_den != 0) {
    j["floor_num"] = rep.floor_num;
    j["floor_den"] = rep.floor_den;
  }
  j["floor_sampled"] = rep.floor_sampled;
  j["dedup_bound"] = rep.dedup_bound;
  j["dedup_ok"] = rep.dedup_ok;
  j["chebyshev_ok"] = rep.chebyshev_ok;

  json sample = json::array();
  std::size_t shown = 0;
  for (const auto& s : rep.solutions) {
    if (shown++ >= 10) break;
    sample.push_back(s);
  }
  j["solutions_sample"] = sample;
  return j;
}

inline std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write report file: " + path);
  out << dump_report(j);
}

}  // namespace supersat
