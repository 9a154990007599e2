#pragma once

// Tunstall codebooks: repeatedly split the most probable leaf until the tree
// has N leaves. The resulting leaf distribution is nearly uniform; the ratio
// of largest to smallest leaf probability is at most 1/mu.

#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "vlres/codetree.hpp"
#include "vlres/error.hpp"
#include "vlres/probdist.hpp"

namespace vlres::tunstall {

struct Options {
  std::uint64_t max_leaves = std::uint64_t{1} << 20;
  /// Tunstall trees for skewed targets get deep, well past the default
  /// codebook depth cap.
  std::size_t max_depth = 4096;
};

/// A full D-ary tree has D + k(D-1) leaves for some k >= 0.
inline bool is_valid_size(std::size_t alphabet_size, std::uint64_t n) {
  return alphabet_size >= 2 && n >= alphabet_size && (n - 1) % (alphabet_size - 1) == 0;
}

/// Largest valid size not above n, or 0 if there is none.
inline std::uint64_t floor_valid_size(std::size_t alphabet_size, std::uint64_t n) {
  if (alphabet_size < 2 || n < alphabet_size) return 0;
  return n - (n - 1) % (alphabet_size - 1);
}

/// log2 of the codebook size; not necessarily an integer.
inline double n_bits(std::uint64_t n) { return std::log2(static_cast<double>(n)); }

inline LeafDistribution build(const Pmf& p, std::uint64_t n, const Options& opts = {}) {
  const std::size_t d = p.alphabet_size();
  if (d < 2) throw Error(ErrorCode::invalid_argument, "alphabet needs at least two symbols");
  if (!p.full_support()) {
    throw Error(ErrorCode::zero_probability_symbol, "remove zero-probability symbols before building");
  }
  if (!is_valid_size(d, n)) {
    throw Error(ErrorCode::invalid_size, "N=" + std::to_string(n) + " is not of the form " +
                                             std::to_string(d) + " + k*" + std::to_string(d - 1));
  }
  if (n > opts.max_leaves) {
    throw Error(ErrorCode::size_cap_exceeded, "N=" + std::to_string(n));
  }

  struct Node {
    double prob;
    Path path;
  };
  // Top of the heap: largest probability, then lexicographically smallest path.
  auto lower_priority = [](const Node& a, const Node& b) {
    if (a.prob != b.prob) return a.prob < b.prob;
    return a.path > b.path;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(lower_priority)> heap(lower_priority);

  auto push_children = [&](const Node& parent) {
    if (parent.path.size() + 1 > opts.max_depth) {
      throw Error(ErrorCode::size_cap_exceeded, "Tunstall tree deeper than " + std::to_string(opts.max_depth));
    }
    for (std::size_t s = 0; s < d; ++s) {
      Node child{parent.prob * p[s], parent.path};
      child.path.push_back(static_cast<Symbol>(s));
      heap.push(std::move(child));
    }
  };

  push_children(Node{1.0, {}});
  while (heap.size() < n) {
    Node top = heap.top();
    heap.pop();
    push_children(top);
  }

  std::vector<Path> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top().path);
    heap.pop();
  }

  LeafDistribution ld = leaf_distribution(
      p, validate_complete(std::move(leaves), d, CodebookLimits{opts.max_depth, opts.max_leaves}));

  // Independent recomputation in log space catches any multiplicative drift.
  std::vector<double> log_p(d);
  for (std::size_t s = 0; s < d; ++s) log_p[s] = std::log(p[s]);
  for (std::size_t i = 0; i < ld.codebook.size(); ++i) {
    double acc = 0.0;
    for (Symbol s : ld.codebook.leaf(i)) acc += log_p[s];
    const double ref = std::exp(acc);
    if (std::abs(ld.leaf_probs[i] - ref) > 1e-9 * ref) {
      throw Error(ErrorCode::internal, "leaf probability drift at " + path_string(ld.codebook.leaf(i)));
    }
  }
  return ld;
}

struct BalanceReport {
  double ratio = 0.0;
  double min_prob = 0.0;
  double max_prob = 0.0;
  bool ok = false;
};

/// Tunstall lemma checks: max/min <= 1/mu, min >= mu/N, max <= 1/(N mu),
/// each with 1e-9 relative slack. ok == false means a construction bug.
inline BalanceReport check_balance(const LeafDistribution& ld, double mu) {
  constexpr double slack = 1e-9;
  BalanceReport r;
  if (ld.leaf_probs.empty() || !(mu > 0.0)) return r;
  r.min_prob = ld.leaf_probs.front();
  r.max_prob = ld.leaf_probs.front();
  for (double v : ld.leaf_probs) {
    r.min_prob = std::min(r.min_prob, v);
    r.max_prob = std::max(r.max_prob, v);
  }
  const double n = static_cast<double>(ld.leaf_probs.size());
  r.ratio = r.max_prob / r.min_prob;
  r.ok = r.ratio <= (1.0 / mu) * (1.0 + slack) && r.min_prob >= (mu / n) * (1.0 - slack) &&
         r.max_prob <= (1.0 / (n * mu)) * (1.0 + slack);
  return r;
}

}  // namespace vlres::tunstall
