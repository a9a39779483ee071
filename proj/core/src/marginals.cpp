// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ctvgan/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ctvgan/rng.hpp"

namespace ctvgan::marginals {

std::vector<int> DiscreteJoint::decode(std::size_t index) const {
  std::vector<int> a(alphabet.size());
  for (int v = n() - 1; v >= 0; --v) {
    a[v] = static_cast<int>(index % alphabet[v]);
    index /= alphabet[v];
  }
  return a;
}

std::size_t DiscreteJoint::encode(const std::vector<int>& assignment) const {
  std::size_t index = 0;
  for (int v = 0; v < n(); ++v) index = index * alphabet[v] + assignment[v];
  return index;
}

void DiscreteJoint::validate(double tolerance) const {
  if (alphabet.empty()) throw std::invalid_argument("joint needs at least one variable");
  std::size_t expected = 1;
  for (int a : alphabet) {
    if (a < 1 || a > 4) throw std::invalid_argument("alphabet sizes must be in [1, 4], got " + std::to_string(a));
    expected *= static_cast<std::size_t>(a);
  }
  if (table.size() != expected) {
    throw std::invalid_argument("joint table has " + std::to_string(table.size()) + " entries, expected " +
                                std::to_string(expected));
  }
  double total = 0.0;
  for (double v : table) {
    if (!(v >= 0.0)) throw std::invalid_argument("joint table has a negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "joint table sums to " << total << ", not 1";
    throw std::invalid_argument(os.str());
  }
}

DiscreteJoint make_joint(std::vector<int> alphabet, std::vector<double> table) {
  DiscreteJoint p{std::move(alphabet), std::move(table)};
  p.validate(1e-9);
  return p;
}

namespace {

IndexSet normalized(IndexSet s, int n) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (int i : s) {
    if (i < 0 || i >= n) throw std::invalid_argument("variable index " + std::to_string(i) + " out of range");
  }
  return s;
}

std::size_t encode_subset(const std::vector<int>& assignment, const IndexSet& vars, const std::vector<int>& alphabet) {
  std::size_t idx = 0;
  for (int v : vars) idx = idx * alphabet[v] + assignment[v];
  return idx;
}

std::size_t subset_size(const IndexSet& vars, const std::vector<int>& alphabet) {
  std::size_t n = 1;
  for (int v : vars) n *= alphabet[v];
  return n;
}

IndexSet prefix(int i) {
  IndexSet s(static_cast<std::size_t>(i));
  std::iota(s.begin(), s.end(), 0);
  return s;
}

// All subsets of {0..i-1} with size <= max_size, ordered by size then lexicographically.
std::vector<IndexSet> candidate_sets(int i, int max_size) {
  std::vector<IndexSet> out;
  for (int size = 0; size <= std::min(i, max_size); ++size) {
    IndexSet comb(static_cast<std::size_t>(size));
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      out.push_back(comb);
      int pos = size - 1;
      while (pos >= 0 && comb[pos] == i - size + pos) --pos;
      if (pos < 0) break;
      ++comb[pos];
      for (int q = pos + 1; q < size; ++q) comb[q] = comb[q - 1] + 1;
    }
  }
  return out;
}

void check_search_size(const DiscreteJoint& p) {
  if (p.n() > kMaxSearchVariables) {
    throw std::invalid_argument("exhaustive search supports at most " + std::to_string(kMaxSearchVariables) +
                                " variables, got " + std::to_string(p.n()));
  }
}

double cond_value(const ConditionalTable& c, const std::vector<int>& assignment, const std::vector<int>& alphabet) {
  const std::size_t row = encode_subset(assignment, c.given, alphabet);
  return c.supported[row] ? c.at(row, assignment[c.target]) : 0.0;
}

}  // namespace

DiscreteJoint marginal(const DiscreteJoint& p, IndexSet indices) {
  if (indices.empty()) throw std::invalid_argument("marginal over an empty index set");
  indices = normalized(std::move(indices), p.n());
  DiscreteJoint out;
  for (int v : indices) out.alphabet.push_back(p.alphabet[v]);
  out.table.assign(subset_size(indices, p.alphabet), 0.0);
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    out.table[encode_subset(p.decode(idx), indices, p.alphabet)] += p.table[idx];
  }
  return out;
}

ConditionalTable conditional(const DiscreteJoint& p, int target, IndexSet given) {
  given = normalized(std::move(given), p.n());
  if (target < 0 || target >= p.n()) throw std::invalid_argument("target index out of range");
  if (std::find(given.begin(), given.end(), target) != given.end()) {
    throw std::invalid_argument("target variable must not be among the conditioning set");
  }
  ConditionalTable c;
  c.target = target;
  c.given = given;
  for (int v : given) c.given_alphabet.push_back(p.alphabet[v]);
  c.target_alphabet = p.alphabet[target];
  const std::size_t rows = subset_size(given, p.alphabet);
  c.probs.assign(rows * c.target_alphabet, 0.0);
  c.supported.assign(rows, false);
  std::vector<double> row_mass(rows, 0.0);
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    const auto a = p.decode(idx);
    const std::size_t row = encode_subset(a, given, p.alphabet);
    c.probs[row * c.target_alphabet + a[target]] += p.table[idx];
    row_mass[row] += p.table[idx];
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_mass[r] > 0.0) {
      c.supported[r] = true;
      for (int v = 0; v < c.target_alphabet; ++v) c.probs[r * c.target_alphabet + v] /= row_mass[r];
    } else {
      for (int v = 0; v < c.target_alphabet; ++v) c.probs[r * c.target_alphabet + v] = 0.0;
    }
  }
  return c;
}

double conditional_deviation(const DiscreteJoint& p, int i, const IndexSet& given) {
  const ConditionalTable full = conditional(p, i, prefix(i));
  const ConditionalTable part = conditional(p, i, given);
  for (int g : part.given) {
    if (g >= i) throw std::invalid_argument("explaining set may only contain earlier indices");
  }
  double worst = 0.0;
  std::vector<int> a(static_cast<std::size_t>(p.n()), 0);
  for (std::size_t r = 0; r < full.rows(); ++r) {
    if (!full.supported[r]) continue;
    std::size_t rest = r;
    for (int v = i - 1; v >= 0; --v) {
      a[v] = static_cast<int>(rest % p.alphabet[v]);
      rest /= p.alphabet[v];
    }
    const std::size_t pr = encode_subset(a, part.given, p.alphabet);
    for (int x = 0; x < full.target_alphabet; ++x) {
      worst = std::max(worst, std::abs(full.at(r, x) - part.at(pr, x)));
    }
  }
  return worst;
}

std::optional<ExplainingSets> find_explaining_sets(const DiscreteJoint& p, int k, double tolerance) {
  check_search_size(p);
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  ExplainingSets result;
  result.k = k;
  for (int i = 0; i < p.n(); ++i) {
    bool found = false;
    for (const auto& candidate : candidate_sets(i, k - 1)) {
      if (conditional_deviation(p, i, candidate) <= tolerance) {
        result.sets.push_back(candidate);
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return result;
}

DiscreteJoint reconstruct_joint(const DiscreteJoint& p, const ExplainingSets& sets) {
  if (static_cast<int>(sets.sets.size()) != p.n()) throw std::invalid_argument("need one explaining set per variable");
  std::vector<ConditionalTable> tables;
  for (int i = 0; i < p.n(); ++i) {
    for (int j : sets.sets[i]) {
      if (j >= i || j < 0) throw std::invalid_argument("J_" + std::to_string(i + 1) + " contains a non-earlier index");
    }
    tables.push_back(conditional(p, i, sets.sets[i]));
  }
  DiscreteJoint out;
  out.alphabet = p.alphabet;
  out.table.assign(p.size(), 0.0);
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    const auto a = p.decode(idx);
    double prod = 1.0;
    for (const auto& t : tables) prod *= cond_value(t, a, p.alphabet);
    out.table[idx] = prod;
  }
  return out;
}

double total_variation(const DiscreteJoint& a, const DiscreteJoint& b) {
  if (a.alphabet != b.alphabet) throw std::invalid_argument("total_variation: different variable layouts");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.table[i] - b.table[i]);
  return 0.5 * s;
}

bool exists_reconstructing_product(const DiscreteJoint& p, int k, double tolerance) {
  check_search_size(p);
  const int n = p.n();
  std::vector<std::vector<IndexSet>> candidates;
  std::vector<std::vector<ConditionalTable>> tables;
  for (int i = 0; i < n; ++i) {
    candidates.push_back(candidate_sets(i, k - 1));
    tables.emplace_back();
    for (const auto& c : candidates.back()) tables.back().push_back(conditional(p, i, c));
  }
  std::vector<std::vector<int>> assignments;
  for (std::size_t idx = 0; idx < p.size(); ++idx) assignments.push_back(p.decode(idx));

  std::vector<std::size_t> choice(static_cast<std::size_t>(n), 0);
  while (true) {
    double tv = 0.0;
    for (std::size_t idx = 0; idx < p.size() && tv <= tolerance; ++idx) {
      double prod = 1.0;
      for (int i = 0; i < n; ++i) prod *= cond_value(tables[i][choice[i]], assignments[idx], p.alphabet);
      tv += 0.5 * std::abs(prod - p.table[idx]);
    }
    if (tv <= tolerance) return true;
    int pos = n - 1;
    while (pos >= 0 && ++choice[pos] == candidates[pos].size()) choice[pos--] = 0;
    if (pos < 0) return false;
  }
}

double ReverseReport::max_deviation() const {
  double m = 0.0;
  for (double d : prefix_deviation) m = std::max(m, d);
  for (double d : conditional_deviation) m = std::max(m, d);
  return m;
}

ReverseReport verify_reverse_direction(const DiscreteJoint& p, const ExplainingSets& sets, double tolerance) {
  const DiscreteJoint rec = reconstruct_joint(p, sets);
  const double tv = total_variation(rec, p);
  if (tv > tolerance) {
    throw std::invalid_argument("explaining sets do not reconstruct the joint (TV = " + std::to_string(tv) + ")");
  }
  ReverseReport report;
  std::vector<ConditionalTable> tables;
  for (int i = 0; i < p.n(); ++i) tables.push_back(conditional(p, i, sets.sets[i]));
  for (int m = 0; m < p.n(); ++m) {
    IndexSet first = prefix(m + 1);
    const DiscreteJoint pm = marginal(p, first);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < pm.size(); ++idx) {
      std::vector<int> a = pm.decode(idx);
      a.resize(static_cast<std::size_t>(p.n()), 0);
      double prod = 1.0;
      for (int i = 0; i <= m; ++i) prod *= cond_value(tables[i], a, p.alphabet);
      worst = std::max(worst, std::abs(prod - pm.table[idx]));
    }
    report.prefix_deviation.push_back(worst);
    report.conditional_deviation.push_back(conditional_deviation(p, m, sets.sets[m]));
  }
  return report;
}

DiscreteJoint markov_chain(int n, double p0, const double (&q)[2][2]) {
  if (n < 1) throw std::invalid_argument("chain length must be positive");
  DiscreteJoint p;
  p.alphabet.assign(static_cast<std::size_t>(n), 2);
  p.table.assign(std::size_t{1} << n, 0.0);
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    const auto a = p.decode(idx);
    double prob = a[0] == 0 ? p0 : 1.0 - p0;
    for (int i = 1; i < n; ++i) prob *= q[a[i - 1]][a[i]];
    p.table[idx] = prob;
  }
  return p;
}

DiscreteJoint parity_joint() {
  DiscreteJoint p;
  p.alphabet = {2, 2, 2};
  p.table.assign(8, 0.0);
  for (int x1 = 0; x1 < 2; ++x1) {
    for (int x2 = 0; x2 < 2; ++x2) p.table[p.encode({x1, x2, x1 ^ x2})] = 0.25;
  }
  return p;
}

DiscreteJoint random_joint(int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxSearchVariables) throw std::invalid_argument("random joint size out of range");
  Rng rng(seed);
  DiscreteJoint p;
  p.alphabet.assign(static_cast<std::size_t>(n), 2);
  p.table.resize(std::size_t{1} << n);
  double total = 0.0;
  for (auto& v : p.table) {
    double u;
    do {
      u = rng.uniform();
    } while (u <= 0.0);
    v = -std::log(u);
    total += v;
  }
  for (auto& v : p.table) v /= total;
  return p;
}

DiscreteJoint random_bayes_net(int n, int max_parents, std::uint64_t seed) {
  if (n < 1 || n > kMaxSearchVariables) throw std::invalid_argument("network size out of range");
  Rng rng(seed);
  std::vector<IndexSet> parents(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> cpt(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int count = static_cast<int>(rng.uniform_int(0, std::min(i, max_parents)));
    IndexSet pool = prefix(i);
    for (int c = 0; c < count; ++c) {
      const auto j = rng.uniform_int(c, i - 1);
      std::swap(pool[c], pool[static_cast<std::size_t>(j)]);
    }
    parents[i].assign(pool.begin(), pool.begin() + count);
    std::sort(parents[i].begin(), parents[i].end());
    cpt[i].resize(std::size_t{1} << count);
    for (auto& v : cpt[i]) v = 0.05 + 0.9 * rng.uniform();
  }
  DiscreteJoint p;
  p.alphabet.assign(static_cast<std::size_t>(n), 2);
  p.table.resize(std::size_t{1} << n);
  for (std::size_t idx = 0; idx < p.size(); ++idx) {
    const auto a = p.decode(idx);
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      const double one = cpt[i][encode_subset(a, parents[i], p.alphabet)];
      prob *= a[i] == 1 ? one : 1.0 - one;
    }
    p.table[idx] = prob;
  }
  return p;
}

DiscreteJoint parse_joint(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  DiscreteJoint p;
  int n = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "n") {
      if (!(ls >> n) || n < 1) throw std::invalid_argument("line " + std::to_string(lineno) + ": bad variable count");
      if (n > kMaxSearchVariables) {
        throw std::invalid_argument("at most " + std::to_string(kMaxSearchVariables) + " variables are supported");
      }
    } else if (head == "alphabet") {
      int a;
      while (ls >> a) p.alphabet.push_back(a);
    } else {
      try {
        std::size_t used = 0;
        p.table.push_back(std::stod(head, &used));
        if (used != head.size()) throw std::invalid_argument(head);
      } catch (const std::exception&) {
        throw std::invalid_argument("line " + std::to_string(lineno) + ": expected a probability, got '" + head + "'");
      }
    }
  }
  if (n < 0) throw std::invalid_argument("joint file lacks an 'n' header");
  if (p.alphabet.empty()) p.alphabet.assign(static_cast<std::size_t>(n), 2);
  if (static_cast<int>(p.alphabet.size()) != n) throw std::invalid_argument("alphabet line does not list n sizes");
  p.validate(1e-6);
  const double total = std::accumulate(p.table.begin(), p.table.end(), 0.0);
  for (auto& v : p.table) v /= total;
  return p;
}

std::string format_joint(const DiscreteJoint& p) {
  std::ostringstream os;
  os.precision(17);
  os << "n " << p.n() << "\nalphabet";
  for (int a : p.alphabet) os << ' ' << a;
  os << '\n';
  for (double v : p.table) os << v << '\n';
  return os.str();
}

std::string format_set(const IndexSet& set) {
  std::string s = "{";
  for (std::size_t i = 0; i < set.size(); ++i) s += (i ? "," : "") + std::to_string(set[i] + 1);
  return s + "}";
}

}  // namespace ctvgan::marginals
