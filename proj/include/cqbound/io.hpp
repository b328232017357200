#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "coloring.hpp"
#include "database.hpp"
#include "error.hpp"
#include "evaluator.hpp"
#include "query.hpp"

namespace cqbound {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(what + ": " + e.what());
  }
}

// Rounded to 9 decimals so reports are stable across platforms.
inline double round9(double x) { return std::round(x * 1e9) / 1e9; }

inline std::string fixed9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  return buf;
}

// {"X": [0, 2], "Y": []}
inline nlohmann::json to_json(const Query& q, const Coloring& col) {
  nlohmann::json out = nlohmann::json::object();
  for (VarId v = 0; v < q.num_vars(); ++v) out[q.var_name(v)] = std::vector<ColorId>(col.labels[v].begin(), col.labels[v].end());
  return out;
}

/// Variables missing from the object get no colors; unknown names are rejected.
inline Coloring coloring_from_json(const Query& q, const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("coloring JSON must be an object of variable -> color list");
  Coloring col = Coloring::empty(q.num_vars());
  for (const auto& [name, colors] : j.items()) {
    auto v = q.find_var(name);
    if (!v) throw InputError("coloring names unknown variable " + name);
    try {
      for (const auto& c : colors) col.labels[*v].insert(c.get<ColorId>());
    } catch (const nlohmann::json::exception& e) {
      throw InputError("coloring for " + name + " must be a list of integers");
    }
  }
  return col;
}

inline nlohmann::json to_json(const Query& q, const EntropyVector<double>& h) {
  nlohmann::json out = nlohmann::json::object();
  for (std::uint32_t s = 1; s < h.values().size(); ++s) out[subset_name(q, SubsetId(s))] = round9(h[SubsetId(s)]);
  return out;
}

inline nlohmann::json to_json(const Query& q, const EvalReport& r) {
  auto opt = [](const std::optional<double>& x) -> nlohmann::json {
    return x ? nlohmann::json(round9(*x)) : nlohmann::json(nullptr);
  };
  nlohmann::json rel = nlohmann::json::object();
  for (const auto& [name, e] : r.relation_exponents) rel[name] = opt(e);
  nlohmann::json out = {
      {"output_size", r.output_size},
      {"rmax", r.rmax},
      {"observed_exponent", opt(r.observed_exponent)},
      {"observed_exponent_exact", r.exact_exponent ? nlohmann::json(to_string(*r.exact_exponent)) : nlohmann::json(nullptr)},
      {"relation_exponents", std::move(rel)},
      {"knitted_complexity", opt(r.knitted)},
  };
  out["entropy"] = r.entropy ? to_json(q, *r.entropy) : nlohmann::json(nullptr);
  return out;
}

inline std::string to_csv(const std::set<Tuple>& tuples) {
  auto quote = [](const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
  };
  std::string out;
  for (const auto& t : tuples) {
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + quote(t[i]);
    out += "\n";
  }
  return out;
}

}  // namespace cqbound
