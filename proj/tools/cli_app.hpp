#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <cqbound/cqbound.hpp>

namespace cqbound::cli {

enum ExitCode : int { kOk = 0, kLimit = 1, kInput = 2, kVerifyFailed = 3 };

struct RunConfig {
  std::string query_path;
  std::string db_path;
  std::string coloring_path;
  std::string out_path;
  std::string csv_path;
  std::string lp_path;
  std::string format = "table";
  std::uint64_t n = 0;
  int k = 0;
  std::uint64_t p = 0;
  std::size_t max_vars = LpOptions{}.max_vars;
  std::uint64_t tuple_cap = GenOptions{}.tuple_cap;
};

namespace detail {

inline Query load_query(const std::string& path) { return parse_query(read_file(path)); }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

// Writes to --out when given, else to the output stream.
inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    write_text(cfg.out_path, text);
  }
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

struct Analysis {
  Query query;
  FdSet fds;
};

inline Analysis analyse(const RunConfig& cfg) {
  Query chased = chase(load_query(cfg.query_path));
  FdSet fds = instantiate_fds(chased);
  return {std::move(chased), std::move(fds)};
}

inline int cmd_chase(const RunConfig& cfg, std::ostream& out) {
  emit(cfg, out, to_string(chase(load_query(cfg.query_path))));
  return kOk;
}

inline int cmd_reduce(const RunConfig& cfg, std::ostream& out) {
  auto a = analyse(cfg);
  emit(cfg, out, to_string(reduce_fds(a.query, a.fds).query));
  return kOk;
}

inline int cmd_bound(const RunConfig& cfg, std::ostream& out) {
  auto a = analyse(cfg);
  LpOptions opts{cfg.max_vars};
  LinearProgram lp = build_size_lp(a.query, a.fds, opts);
  if (!cfg.lp_path.empty()) write_text(cfg.lp_path, export_lp(a.query, lp));
  LpSolution sol = solve_exact(lp);
  if (cfg.format == "json") {
    emit(cfg, out, dump({{"size_bound", to_string(sol.optimum)}, {"k", a.query.num_vars()},
                         {"constraints", lp.constraints.size()}}));
  } else {
    emit(cfg, out, "s(Q) = " + to_string(sol.optimum) + "\n");
  }
  return kOk;
}

inline int cmd_color(const RunConfig& cfg, std::ostream& out) {
  auto a = analyse(cfg);
  LpOptions opts{cfg.max_vars};
  if (!cfg.lp_path.empty()) write_text(cfg.lp_path, export_lp(a.query, build_color_lp(a.query, a.fds, opts)));
  ColorNumberResult res = color_number(a.query, a.fds, opts);
  if (cfg.format == "json") {
    emit(cfg, out, dump({{"color_number", to_string(res.value)}, {"witness", to_json(a.query, res.witness)}}));
  } else {
    emit(cfg, out, "C(Q) = " + to_string(res.value) + "\nwitness: " + to_json(a.query, res.witness).dump() + "\n");
  }
  return kOk;
}

inline int cmd_sparsity(const RunConfig& cfg, std::ostream& out) {
  auto a = analyse(cfg);
  SparsityResult res = is_sparsity_preserving(a.query, a.fds);
  std::string failing = res.failing_relation ? a.query.body()[*res.failing_relation].relation : "";
  if (cfg.format == "json") {
    nlohmann::json j = {{"preserving", res.preserving}};
    j["failing_relation"] = res.failing_relation ? nlohmann::json(failing) : nlohmann::json(nullptr);
    j["witness"] = res.witness ? to_json(a.query, *res.witness) : nlohmann::json(nullptr);
    j["lower_bound_exponent"] =
        res.lower_bound_exponent ? nlohmann::json(to_string(*res.lower_bound_exponent)) : nlohmann::json(nullptr);
    emit(cfg, out, dump(j));
  } else if (res.preserving) {
    emit(cfg, out, "preserving: true, failing relation " + failing + "\n");
  } else {
    emit(cfg, out, "preserving: false\nwitness: " + to_json(a.query, *res.witness).dump() +
                       "\nlower bound exponent: " + to_string(*res.lower_bound_exponent) + "\n");
  }
  return kOk;
}

inline Coloring pick_coloring(const RunConfig& cfg, const Analysis& a) {
  if (!cfg.coloring_path.empty()) {
    return coloring_from_json(a.query, parse_json_text(read_file(cfg.coloring_path), cfg.coloring_path));
  }
  return color_number(a.query, a.fds, LpOptions{cfg.max_vars}).witness;
}

inline int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  auto a = analyse(cfg);
  Coloring col = pick_coloring(cfg, a);
  Database d = worst_case_from_coloring(a.query, a.fds, col, cfg.n, GenOptions{cfg.tuple_cap});
  emit(cfg, out, dump(to_json(d)));
  return kOk;
}

inline int cmd_gap(const RunConfig& cfg, std::ostream& out) {
  GapFamily fam = gap_query(cfg.k, cfg.p);
  Database d = gap_database(fam, GenOptions{cfg.tuple_cap});
  std::string prefix = cfg.out_path.empty() ? "gap_k" + std::to_string(cfg.k) + "_p" + std::to_string(cfg.p) : cfg.out_path;
  write_text(prefix + ".cq", to_string(fam.query));
  write_text(prefix + ".json", dump(to_json(d)));
  out << "wrote " << prefix << ".cq and " << prefix << ".json\n";
  return kOk;
}

inline std::string table(const Query& q, const EvalReport& r) {
  auto opt = [](const std::optional<double>& x) { return x ? fixed9(*x) : std::string("undefined"); };
  std::ostringstream s;
  s << "output_size: " << r.output_size << "\n";
  s << "rmax: " << r.rmax << "\n";
  s << "observed_exponent: " << opt(r.observed_exponent);
  if (r.exact_exponent) s << " (exact " << to_string(*r.exact_exponent) << ")";
  s << "\n";
  for (const auto& [name, e] : r.relation_exponents) s << "exponent vs " << name << ": " << opt(e) << "\n";
  s << "knitted_complexity: " << opt(r.knitted) << "\n";
  if (r.entropy) {
    for (std::uint32_t m = 1; m < r.entropy->values().size(); ++m) {
      s << "H" << subset_name(q, SubsetId(m)) << " = " << fixed9((*r.entropy)[SubsetId(m)]) << "\n";
    }
  }
  return s.str();
}

inline int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  Query q = load_query(cfg.query_path);
  Database d = database_from_json(parse_json_text(read_file(cfg.db_path), cfg.db_path));
  if (q.num_vars() > cfg.max_vars) {
    throw LimitError("query has " + std::to_string(q.num_vars()) + " variables; entropy report capped at " +
                     std::to_string(cfg.max_vars));
  }
  EvalReport r = evaluate_report(q, d);
  if (!cfg.csv_path.empty()) write_text(cfg.csv_path, to_csv(evaluate(q, d)));
  emit(cfg, out, cfg.format == "json" ? dump(to_json(q, r)) : table(q, r));
  return kOk;
}

// color -> generate -> evaluate, checking every invariant that applies.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto a = analyse(cfg);
  const Query& q = a.query;
  LpOptions opts{cfg.max_vars};
  ColorNumberResult color = color_number(q, a.fds, opts);
  Rational size = size_bound_exponent(q, a.fds, opts);
  Database d = worst_case_from_coloring(q, a.fds, color.witness, cfg.n, GenOptions{cfg.tuple_cap});
  EvalReport r = evaluate_report(q, d);

  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  expect(color.value <= size, "color number exceeds size bound");
  auto violations = check_fds(q, d);
  expect(violations.empty(), std::to_string(violations.size()) + " fd violations in generated instance");

  const std::uint64_t head_colors = color.witness.colors_of(q.head().args).size();
  const std::uint64_t max_q = max_atom_colors(q, color.witness);
  const std::uint64_t want_out = cqbound::detail::capped_pow(cfg.n, head_colors, UINT64_MAX).value_or(0);
  const bool repeated = q.rep() > 1;
  std::vector<std::string> notes;
  if (repeated) notes.push_back("a relation occurs more than once; rmax and exponent equality not checked");
  expect(r.output_size >= want_out, "output smaller than N^{d'}");
  if (!repeated) expect(r.rmax == cqbound::detail::capped_pow(cfg.n, max_q, UINT64_MAX).value_or(0), "rmax differs from N^{max q_j}");
  if (r.observed_exponent) {
    expect(*r.observed_exponent <= size.get_d() + 1e-9, "observed exponent exceeds size bound");
    if (!repeated) {
      expect(std::abs(*r.observed_exponent - color.value.get_d()) <= 1e-9, "observed exponent differs from color number");
    }
  }
  if (r.entropy) {
    auto feas = feasibility_check(q, a.fds, *r.entropy, opts);
    expect(feas.pass(), "entropy vector infeasible: " + (feas.pass() ? "" : feas.violations.front()));
    if (r.knitted) expect(std::abs(*r.knitted - 1.0) <= 1e-9, "knitted complexity differs from 1");
  }

  if (cfg.format == "json") {
    nlohmann::json j = to_json(q, r);
    j["color_number"] = to_string(color.value);
    j["size_bound"] = to_string(size);
    j["N"] = cfg.n;
    j["failures"] = failures;
    j["notes"] = notes;
    j["pass"] = failures.empty();
    emit(cfg, out, dump(j));
  } else {
    std::ostringstream s;
    s << "C(Q) = " << to_string(color.value) << "\n";
    s << "s(Q) = " << to_string(size) << "\n";
    s << "N = " << cfg.n << "\n";
    s << table(q, r);
    for (const auto& n : notes) s << "note: " << n << "\n";
    s << (failures.empty() ? "verify: pass\n" : "verify: FAIL\n");
    emit(cfg, out, s.str());
  }
  for (const auto& f : failures) err << "verify: " << f << "\n";
  return failures.empty() ? kOk : kVerifyFailed;
}

}  // namespace detail

/// Parses `args` (without the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Worst-case output-size bounds for conjunctive queries with functional dependencies", "cqbound"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--max-vars", cfg.max_vars, "refuse LP analysis above this many variables")->check(CLI::Range(1, 30));
  app.add_option("--tuple-cap", cfg.tuple_cap, "refuse to generate more tuples than this")->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--out", cfg.out_path, "output file (gap: path prefix)");

  auto query_arg = [&](CLI::App* sub) { sub->add_option("query", cfg.query_path, "query file")->required(); };
  auto* chase_cmd = app.add_subcommand("chase", "print the chased query");
  query_arg(chase_cmd);
  auto* reduce_cmd = app.add_subcommand("reduce-fds", "rewrite fds to at most two left-hand variables");
  query_arg(reduce_cmd);
  auto* bound_cmd = app.add_subcommand("bound", "entropy LP size bound s(Q)");
  query_arg(bound_cmd);
  bound_cmd->add_option("--export-lp", cfg.lp_path, "write the LP in text form");
  auto* color_cmd = app.add_subcommand("color", "color number C(Q) with an optimal coloring");
  query_arg(color_cmd);
  color_cmd->add_option("--export-lp", cfg.lp_path, "write the LP in text form");
  auto* sparsity_cmd = app.add_subcommand("sparsity", "decide sparsity preservation");
  query_arg(sparsity_cmd);
  auto* gen_cmd = app.add_subcommand("gen", "worst-case database from a coloring");
  query_arg(gen_cmd);
  gen_cmd->add_option("--N", cfg.n, "values per color")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--coloring", cfg.coloring_path, "coloring JSON (default: optimal coloring)");
  auto* gap_cmd = app.add_subcommand("gap", "secret-sharing gap query and database");
  gap_cmd->add_option("--k", cfg.k, "even group size, 4..8")->required();
  gap_cmd->add_option("--p", cfg.p, "prime field size >= k")->required();
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a query on a database");
  query_arg(eval_cmd);
  eval_cmd->add_option("database", cfg.db_path, "database JSON")->required();
  eval_cmd->add_option("--csv", cfg.csv_path, "write the output relation as CSV");
  auto* verify_cmd = app.add_subcommand("verify", "color, generate, evaluate and check invariants");
  query_arg(verify_cmd);
  verify_cmd->add_option("--N", cfg.n, "values per color")->required()->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInput;
  }

  try {
    if (chase_cmd->parsed()) return detail::cmd_chase(cfg, out);
    if (reduce_cmd->parsed()) return detail::cmd_reduce(cfg, out);
    if (bound_cmd->parsed()) return detail::cmd_bound(cfg, out);
    if (color_cmd->parsed()) return detail::cmd_color(cfg, out);
    if (sparsity_cmd->parsed()) return detail::cmd_sparsity(cfg, out);
    if (gen_cmd->parsed()) return detail::cmd_gen(cfg, out);
    if (gap_cmd->parsed()) return detail::cmd_gap(cfg, out);
    if (eval_cmd->parsed()) return detail::cmd_eval(cfg, out);
    if (verify_cmd->parsed()) return detail::cmd_verify(cfg, out, err);
  } catch (const LimitError& e) {
    err << "refused: " << e.what() << "\n";
    return kLimit;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}

}  // namespace cqbound::cli
