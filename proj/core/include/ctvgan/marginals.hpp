// Copyright 2026 The ctvgan Authors
// SPDX-License-Identifier: Apache-2.0

// Exact checks of when k-sparse marginals determine a joint distribution:
// p(x) factors through n conditionals p(x_i | x_{J_i}) with |J_i| <= k-1,
// J_i among earlier indices, iff p(x_i | x_{<i}) = p(x_i | x_{J_i}) for every i.
//
// Variables are 0-based here; reports print them 1-based.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ctvgan::marginals {

using IndexSet = std::vector<int>;

struct DiscreteJoint {
  std::vector<int> alphabet;  // per-variable cardinality (<= 4)
  std::vector<double> table;  // row-major, variable 0 most significant

  int n() const { return static_cast<int>(alphabet.size()); }
  std::size_t size() const { return table.size(); }
  std::vector<int> decode(std::size_t index) const;
  std::size_t encode(const std::vector<int>& assignment) const;

  /// Throws std::invalid_argument on negative entries or a sum off 1 by more than `tolerance`.
  void validate(double tolerance = 1e-12) const;
};

DiscreteJoint make_joint(std::vector<int> alphabet, std::vector<double> table);

/// Distribution of x_I (variables in increasing index order).
DiscreteJoint marginal(const DiscreteJoint& p, IndexSet indices);

/// p(x_target | x_given). Row r enumerates assignments of `given`
/// (row-major); entry [r * |X_target| + v]. Rows with p(x_given) = 0 are
/// flagged unsupported and hold zeros.
struct ConditionalTable {
  int target = 0;
  IndexSet given;
  std::vector<int> given_alphabet;
  int target_alphabet = 0;
  std::vector<double> probs;
  std::vector<bool> supported;

  std::size_t rows() const { return supported.size(); }
  double at(std::size_t row, int value) const { return probs[row * target_alphabet + value]; }
};

ConditionalTable conditional(const DiscreteJoint& p, int target, IndexSet given);

struct ExplainingSets {
  std::vector<IndexSet> sets;  // sets[i] subset of {0, ..., i-1}
  int k = 0;
};

constexpr int kMaxSearchVariables = 8;

/// Smallest-cardinality-then-lexicographic J_i with |J_i| <= k-1 such that
/// p(x_i | x_{<i}) = p(x_i | x_{J_i}) on supported rows within `tolerance`.
/// Returns nullopt when some i has no such set. Throws std::invalid_argument
/// beyond kMaxSearchVariables variables.
std::optional<ExplainingSets> find_explaining_sets(const DiscreteJoint& p, int k, double tolerance = 1e-9);

/// Largest |p(x_i | x_{<i}) - p(x_i | x_J)| over supported rows.
double conditional_deviation(const DiscreteJoint& p, int i, const IndexSet& given);

/// prod_i p(x_i | x_{J_i}); unsupported rows contribute 0.
DiscreteJoint reconstruct_joint(const DiscreteJoint& p, const ExplainingSets& sets);

double total_variation(const DiscreteJoint& a, const DiscreteJoint& b);

/// Exhaustive: does any choice of sets (|J_i| <= k-1, earlier indices)
/// reconstruct p within `tolerance` total variation? Independent of the
/// per-index search above.
bool exists_reconstructing_product(const DiscreteJoint& p, int k, double tolerance = 1e-9);

struct ReverseReport {
  std::vector<double> prefix_deviation;       // per m: |prod_{i<=m} p(x_i|x_J_i) - p(x_{<=m})|_inf
  std::vector<double> conditional_deviation;  // per i: |p(x_i|x_<i) - p(x_i|x_J_i)|_inf on support
  double max_deviation() const;
};

/// Checks the prefix-product lemma and the short-history equalities for
/// sets that reconstruct p. Throws std::invalid_argument when they do not.
ReverseReport verify_reverse_direction(const DiscreteJoint& p, const ExplainingSets& sets, double tolerance = 1e-9);

/// Binary chain, p(x_1 = 0) = p0, transition matrix q[from][to].
DiscreteJoint markov_chain(int n, double p0, const double (&q)[2][2]);
/// x_3 = x_1 xor x_2 with x_1, x_2 uniform bits.
DiscreteJoint parity_joint();
/// Uniform random table (Dirichlet(1)) over n binary variables.
DiscreteJoint random_joint(int n, std::uint64_t seed);
/// Random binary Bayesian network: variable i draws a parent set among earlier
/// indices of size up to `max_parents`, with random CPTs.
DiscreteJoint random_bayes_net(int n, int max_parents, std::uint64_t seed);

/// Text format:
///   n <count>
///   alphabet <a_1> ... <a_n>
///   <p> one probability per line, assignments in row-major order
/// `#` starts a comment.
DiscreteJoint parse_joint(const std::string& text);
std::string format_joint(const DiscreteJoint& p);

std::string format_set(const IndexSet& set);

}  // namespace ctvgan::marginals
