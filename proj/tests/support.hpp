#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <cqbound/cqbound.hpp>

namespace cqtest {

inline std::filesystem::path samples_dir() { return CQBOUND_SAMPLES_DIR; }

inline std::vector<std::filesystem::path> sample_queries() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(samples_dir() / "queries")) {
    if (e.path().extension() == ".cq") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline cqbound::Query load(const std::string& name) {
  return cqbound::parse_query(cqbound::read_file((samples_dir() / "queries" / name).string()));
}

struct Analysed {
  cqbound::Query query;
  cqbound::FdSet fds;
};

inline Analysed analyse(const cqbound::Query& q) {
  cqbound::Query c = cqbound::chase(q);
  cqbound::FdSet f = cqbound::instantiate_fds(c);
  return {std::move(c), std::move(f)};
}

inline Analysed analyse(const std::string& text) { return analyse(cqbound::parse_query(text)); }

// Random query: k <= 5 variables, 1..3 atoms of arity 1..3 over distinct
// relation names, up to two variable fds over variables of a single atom.
inline std::string random_query_text(std::mt19937& rng) {
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int k = pick(1, 5);
  const int m = pick(1, 3);
  std::vector<std::vector<int>> atoms;
  std::vector<bool> used(static_cast<std::size_t>(k), false);
  for (int a = 0; a < m; ++a) {
    int arity = pick(1, std::min(3, k));
    std::vector<int> vars(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) vars[static_cast<std::size_t>(i)] = i;
    std::shuffle(vars.begin(), vars.end(), rng);
    vars.resize(static_cast<std::size_t>(arity));
    for (int v : vars) used[static_cast<std::size_t>(v)] = true;
    atoms.push_back(vars);
  }
  std::vector<int> present;
  for (int i = 0; i < k; ++i) {
    if (used[static_cast<std::size_t>(i)]) present.push_back(i);
  }
  std::vector<int> head;
  for (int v : present) {
    if (pick(0, 1)) head.push_back(v);
  }
  if (head.empty()) head.push_back(present[static_cast<std::size_t>(pick(0, static_cast<int>(present.size()) - 1))]);

  auto name = [](int v) { return "V" + std::to_string(v); };
  auto list = [&](const std::vector<int>& vs) {
    std::string s;
    for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? "," : "") + name(vs[i]);
    return s;
  };
  std::string text = "Q(" + list(head) + ") :- ";
  for (int a = 0; a < m; ++a) text += (a ? ", " : "") + std::string("R") + std::to_string(a) + "(" + list(atoms[static_cast<std::size_t>(a)]) + ")";
  text += ".\n";
  const int nfd = pick(0, 2);
  for (int f = 0; f < nfd; ++f) {
    const auto& atom = atoms[static_cast<std::size_t>(pick(0, m - 1))];
    if (atom.size() < 2) continue;
    std::vector<int> vs = atom;
    std::shuffle(vs.begin(), vs.end(), rng);
    int lhs_size = pick(1, static_cast<int>(vs.size()) - 1);
    std::vector<int> lhs(vs.begin(), vs.begin() + lhs_size);
    text += "fd vars: " + list(lhs) + " -> " + name(vs[static_cast<std::size_t>(lhs_size)]) + "\n";
  }
  return text;
}

}  // namespace cqtest
