#pragma once

// Finite probability distributions, exact M-type distributions, and the
// divergence / distance functionals used throughout the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vlres/error.hpp"

namespace vlres {

/// Tolerance on the raw sum of an input probability vector before it is
/// renormalized.
inline constexpr double kInputSumTolerance = 1e-9;

/// A probability mass function over the symbols 0..D-1.
///
/// The input vector is checked to sum to one within kInputSumTolerance and
/// then renormalized once; afterwards the stored values are treated as exact.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
      throw Error(ErrorCode::invalid_distribution, "empty probability vector");
    }
    double sum = 0.0;
    for (double v : probs_) {
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::invalid_distribution, "probabilities must be finite and non-negative");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kInputSumTolerance) {
      throw Error(ErrorCode::invalid_distribution,
                  "probabilities sum to " + std::to_string(sum) + ", expected 1");
    }
    for (double& v : probs_) v /= sum;
  }

  static Pmf uniform(std::size_t alphabet_size) {
    if (alphabet_size == 0) throw Error(ErrorCode::invalid_distribution, "empty alphabet");
    return Pmf(std::vector<double>(alphabet_size, 1.0 / static_cast<double>(alphabet_size)));
  }

  std::size_t alphabet_size() const noexcept { return probs_.size(); }
  double operator[](std::size_t a) const { return probs_[a]; }
  std::span<const double> probs() const noexcept { return probs_; }

  bool full_support() const noexcept {
    return std::all_of(probs_.begin(), probs_.end(), [](double v) { return v > 0.0; });
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t a = 0; a < probs_.size(); ++a) {
      if (probs_[a] > 0.0) s.push_back(a);
    }
    return s;
  }

  /// Smallest positive probability.
  double mu() const noexcept {
    double m = 1.0;
    for (double v : probs_) {
      if (v > 0.0) m = std::min(m, v);
    }
    return m;
  }

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  std::vector<double> probs_;
};

/// An M-type distribution: integer counts over a common denominator M.
/// Only the integers are stored; real probabilities are derived on demand.
class TypedPmf {
 public:
  TypedPmf(std::vector<std::uint64_t> counts, std::uint64_t denominator)
      : counts_(std::move(counts)), denominator_(denominator) {
    if (denominator_ == 0) throw Error(ErrorCode::invalid_distribution, "denominator must be positive");
    if (counts_.empty()) throw Error(ErrorCode::invalid_distribution, "empty count vector");
    std::uint64_t sum = 0;
    for (std::uint64_t c : counts_) {
      if (c > denominator_ - sum) {
        throw Error(ErrorCode::invalid_distribution, "counts exceed the denominator");
      }
      sum += c;
    }
    if (sum != denominator_) {
      throw Error(ErrorCode::invalid_distribution,
                  "counts sum to " + std::to_string(sum) + ", expected " + std::to_string(denominator_));
    }
  }

  std::uint64_t denominator() const noexcept { return denominator_; }
  std::size_t size() const noexcept { return counts_.size(); }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t count(std::size_t a) const { return counts_[a]; }

  double prob(std::size_t a) const {
    return static_cast<double>(counts_[a]) / static_cast<double>(denominator_);
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(counts_.size());
    for (std::size_t a = 0; a < counts_.size(); ++a) p[a] = prob(a);
    return p;
  }

  friend bool operator==(const TypedPmf&, const TypedPmf&) = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t denominator_;
};

namespace detail {

inline void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::index_mismatch,
                "sizes " + std::to_string(a) + " and " + std::to_string(b) + " differ");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entropy (bits). 0 log 0 := 0.

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

inline double entropy(const Pmf& p) { return entropy(p.probs()); }

inline double entropy(const TypedPmf& p) {
  const double m = static_cast<double>(p.denominator());
  double h = 0.0;
  for (std::uint64_t c : p.counts()) {
    if (c == 0) continue;
    const double v = static_cast<double>(c) / m;
    h -= v * std::log2(v);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Informational divergence D(p || q) in bits. Returns +infinity when p puts
// mass where q has none.

inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  detail::require_same_size(p.size(), q.size());
  double d = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    if (q[a] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p[a] * std::log2(p[a] / q[a]);
  }
  return d;
}

inline double kl_divergence(const Pmf& p, const Pmf& q) { return kl_divergence(p.probs(), q.probs()); }
inline double kl_divergence(const Pmf& p, std::span<const double> q) { return kl_divergence(p.probs(), q); }

inline double kl_divergence(const TypedPmf& p, std::span<const double> q) {
  detail::require_same_size(p.size(), q.size());
  const double m = static_cast<double>(p.denominator());
  double d = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    const std::uint64_t c = p.count(a);
    if (c == 0) continue;
    if (q[a] <= 0.0) return std::numeric_limits<double>::infinity();
    const double v = static_cast<double>(c) / m;
    d += v * std::log2(v / q[a]);
  }
  return d;
}

inline double kl_divergence(const TypedPmf& p, const Pmf& q) { return kl_divergence(p, q.probs()); }

// ---------------------------------------------------------------------------
// Variational distance sum_a |p(a) - q(a)|, in [0, 2].

inline double variational_distance(std::span<const double> p, std::span<const double> q) {
  detail::require_same_size(p.size(), q.size());
  double d = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) d += std::abs(p[a] - q[a]);
  return d;
}

inline double variational_distance(const Pmf& p, const Pmf& q) {
  return variational_distance(p.probs(), q.probs());
}

inline double variational_distance(const TypedPmf& p, std::span<const double> q) {
  const auto pr = p.probabilities();
  return variational_distance(pr, q);
}

/// Upper bound on D(p || q) in nats from the variational distance:
/// sqrt(d) * (1 + d_max) with d_max = max over supp p of ln(p/q), clamped at 0.
/// Requires supp p within supp q and d(p, q) < 1.
inline double kl_tv_bound(std::span<const double> p, std::span<const double> q) {
  detail::require_same_size(p.size(), q.size());
  double d_max = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    if (q[a] <= 0.0) {
      throw Error(ErrorCode::unbounded_ratio, "p(" + std::to_string(a) + ") > 0 but q(" +
                                                  std::to_string(a) + ") = 0");
    }
    d_max = std::max(d_max, std::log(p[a] / q[a]));
  }
  const double tv = variational_distance(p, q);
  if (!(tv < 1.0)) {
    throw Error(ErrorCode::precondition_violation,
                "variational distance " + std::to_string(tv) + " is not below 1");
  }
  return std::sqrt(tv) * (1.0 + d_max);
}

inline double kl_tv_bound(const Pmf& p, const Pmf& q) { return kl_tv_bound(p.probs(), q.probs()); }

/// M_X: the least M' such that p is M'-type. Divides p.denominator().
inline std::uint64_t min_type_order(const TypedPmf& p) {
  std::uint64_t g = p.denominator();
  for (std::uint64_t c : p.counts()) g = std::gcd(g, c);
  return p.denominator() / g;
}

}  // namespace vlres
