#pragma once

// KL-optimal M-type quantization: find integer counts c, sum c = M, that
// minimize D(c/M || q) subject to c_a <= M q_a + 1. The objective is
// separable and convex in each count, so allocating units one at a time to
// the cheapest marginal, skipping symbols at their cap, is optimal.
//
// Without the cap the optimum can overshoot a large atom when many small
// atoms are left empty, e.g. q = (0.211, 0.789)^6 with M = 64 puts 19 units
// on an atom with M q = 15.44.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vlres/error.hpp"
#include "vlres/probdist.hpp"

namespace vlres::mtype {

struct Options {
  /// Above this M the allocation is seeded by a threshold search so that
  /// only the last few units go through the heap.
  std::uint64_t greedy_limit = std::uint64_t{1} << 16;
};

namespace detail {

/// M times the KL increase from giving one more unit to a symbol that holds
/// c units and has scaled target x = M q. Equal to f(c+1) - f(c) with
/// f(c) = c ln(c / x), written so large c does not cancel.
inline double scaled_marginal(std::uint64_t c, double x) {
  const double cd = static_cast<double>(c);
  if (c == 0) return -std::log(x);
  return std::log((cd + 1.0) / x) + cd * std::log1p(1.0 / cd);
}

/// Largest count allowed by c <= x + 1, where x = M q > 0.
inline std::uint64_t unit_cap(double x, std::uint64_t m) {
  const double f = std::floor(x) + 1.0;
  return f >= static_cast<double>(m) ? m : static_cast<std::uint64_t>(f);
}

inline void validate_target(std::span<const double> q) {
  if (q.empty()) throw Error(ErrorCode::invalid_distribution, "empty target");
  double sum = 0.0;
  for (double v : q) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::invalid_distribution, "target entries must be finite and non-negative");
    }
    sum += v;
  }
  if (sum == 0.0) throw Error(ErrorCode::invalid_distribution, "degenerate target (all zeros)");
  if (std::abs(sum - 1.0) > kInputSumTolerance) {
    throw Error(ErrorCode::invalid_distribution, "target sums to " + std::to_string(sum));
  }
}

/// Number of units c with scaled_marginal(c, x) < lambda, capped at cap.
inline std::uint64_t units_below(double x, double lambda, std::uint64_t cap) {
  std::uint64_t lo = 0, hi = cap;  // answer in [lo, hi]
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (scaled_marginal(mid, x) < lambda) lo = mid + 1;
    else hi = mid;
  }
  return lo;
}

/// Seeds counts with every unit whose marginal lies strictly below a
/// threshold lambda chosen so that at most M units qualify. Those units are
/// among the M cheapest, hence part of the greedy solution.
inline void seed_counts(std::span<const std::size_t> support, std::span<const double> x, std::uint64_t m,
                        std::vector<std::uint64_t>& counts) {
  auto total_below = [&](double lambda) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      total += units_below(x[i], lambda, unit_cap(x[i], m));
      if (total > m) return total;
    }
    return total;
  };
  double lo = -std::log(static_cast<double>(m)) - 1.0;
  double hi = 1.0;
  for (int i = 0; i < 64 && total_below(hi) <= m; ++i) hi *= 2.0;
  if (total_below(hi) <= m) lo = hi;
  for (int it = 0; it < 100 && lo < hi; ++it) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    if (total_below(mid) <= m) lo = mid;
    else hi = mid;
  }
  for (std::size_t i = 0; i < support.size(); ++i) counts[support[i]] = units_below(x[i], lo, unit_cap(x[i], m));
}

}  // namespace detail

/// KL-optimal M-type approximation of q under c_a <= M q_a + 1. Zero
/// entries of q get zero counts. Ties between equal marginals go to the
/// lower index.
inline TypedPmf quantize(std::span<const double> q, std::uint64_t m, const Options& opts = {}) {
  if (m < 1) throw Error(ErrorCode::invalid_argument, "M must be at least 1");
  detail::validate_target(q);

  std::vector<std::size_t> support;
  std::vector<double> x;  // M q_a over the support
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (q[a] > 0.0) {
      support.push_back(a);
      x.push_back(static_cast<double>(m) * q[a]);
    }
  }

  std::vector<std::uint64_t> counts(q.size(), 0);
  if (m > opts.greedy_limit) detail::seed_counts(support, x, m, counts);

  std::uint64_t assigned = 0;
  for (std::uint64_t c : counts) assigned += c;

  using Entry = std::pair<double, std::size_t>;  // (marginal, position in support)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (counts[support[i]] < detail::unit_cap(x[i], m)) {
      heap.emplace(detail::scaled_marginal(counts[support[i]], x[i]), i);
    }
  }
  for (; assigned < m; ++assigned) {
    if (heap.empty()) throw Error(ErrorCode::internal, "caps leave no room for the remaining units");
    const std::size_t i = heap.top().second;
    heap.pop();
    const std::uint64_t c = ++counts[support[i]];
    if (c < detail::unit_cap(x[i], m)) heap.emplace(detail::scaled_marginal(c, x[i]), i);
  }
  return TypedPmf(std::move(counts), m);
}

inline TypedPmf quantize(const Pmf& q, std::uint64_t m, const Options& opts = {}) {
  return quantize(q.probs(), m, opts);
}

/// Oracle: exhaustive search over all compositions of M onto supp q that
/// respect c_a <= M q_a + 1.
/// Near-ties (1e-14 relative) keep the lexicographically larger count
/// vector, matching the greedy's lower-index preference.
inline TypedPmf brute_force_quantize(std::span<const double> q, std::uint64_t m) {
  if (m < 1) throw Error(ErrorCode::invalid_argument, "M must be at least 1");
  detail::validate_target(q);

  std::vector<std::size_t> support;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (q[a] > 0.0) support.push_back(a);
  }
  const std::size_t k = support.size();
  if (k > 8) throw Error(ErrorCode::instance_too_large, std::to_string(k) + " support points");
  // C(M + k - 1, k - 1)
  double compositions = 1.0;
  for (std::size_t j = 1; j < k; ++j) {
    compositions *= static_cast<double>(m + j) / static_cast<double>(j);
  }
  if (compositions > 1e7) {
    throw Error(ErrorCode::instance_too_large, std::to_string(compositions) + " compositions");
  }

  std::vector<std::uint64_t> cap(q.size(), 0);
  for (std::size_t a : support) cap[a] = detail::unit_cap(static_cast<double>(m) * q[a], m);
  std::vector<std::uint64_t> cur(q.size(), 0);
  std::vector<std::uint64_t> best;
  double best_kl = std::numeric_limits<double>::infinity();
  const double md = static_cast<double>(m);

  // Enumerate with the first support point taking the largest share first,
  // i.e. in lexicographically descending order.
  std::function<void(std::size_t, std::uint64_t)> recurse = [&](std::size_t pos, std::uint64_t left) {
    if (pos + 1 == k) {
      if (left > cap[support[pos]]) return;
      cur[support[pos]] = left;
      double kl = 0.0;
      for (std::size_t a : support) {
        if (cur[a] == 0) continue;
        const double v = static_cast<double>(cur[a]) / md;
        kl += v * std::log2(v / q[a]);
      }
      if (best.empty() || kl < best_kl - 1e-14 * std::max(1.0, std::abs(best_kl))) {
        best_kl = kl;
        best = cur;
      }
      return;
    }
    for (std::uint64_t c = std::min(left, cap[support[pos]]) + 1; c-- > 0;) {
      cur[support[pos]] = c;
      recurse(pos + 1, left - c);
    }
  };
  recurse(0, m);
  return TypedPmf(std::move(best), m);
}

inline TypedPmf brute_force_quantize(const Pmf& q, std::uint64_t m) { return brute_force_quantize(q.probs(), m); }

}  // namespace vlres::mtype
