#pragma once

// Rates, divergences and the finite-length bounds for a resolution code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vlres/f2v_encoder.hpp"
#include "vlres/probdist.hpp"
#include "vlres/tunstall.hpp"

namespace vlres {

struct RateReport {
  Scheme scheme = Scheme::f2v;
  unsigned m = 0;
  std::uint64_t n_codewords = 0;  ///< N
  double n_bits = 0.0;            ///< log2 N
  double q = 0.0;                 ///< m - n_bits
  double rate = 0.0;              ///< R = m / E[l(X)]
  double entropy_rate = 0.0;      ///< H(P_X) / E[l(X)]
  double hv_rate = 0.0;           ///< log2(M_X) / E[l(X)]
  double kl = 0.0;                ///< D(P_X || P_Y^X), bits
  double kl_normalized = 0.0;     ///< kl / E[l(X)]
  double kl_bound = 0.0;          ///< 2^-q log2(e) / mu
  double entropy_lower = 0.0;     ///< n_bits - log2(1/mu + 2^-q)
  double exp_len = 0.0;           ///< E[l(X)] under the generated P_X
  double target_exp_len = 0.0;    ///< E[l] under P_Y^X, diagnostics only
  double px_entropy = 0.0;        ///< H(P_X)
  double max_px = 0.0;
  double mu = 0.0;
  double target_entropy = 0.0;    ///< H(P_Y)
  std::uint64_t min_type_order = 0;  ///< M_X
};

inline RateReport rate_report(const ResolutionCode& code) {
  RateReport r;
  const TypedPmf& px = code.counts();
  r.scheme = code.scheme();
  r.m = code.m();
  r.n_codewords = code.size();
  r.n_bits = code.n_bits();
  r.q = code.q();
  r.mu = code.source().mu();
  r.target_entropy = entropy(code.source());

  const double denom = static_cast<double>(px.denominator());
  unsigned __int128 weighted = 0;  // sum counts * length, exact
  std::uint64_t max_count = 0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    weighted += static_cast<unsigned __int128>(px.count(i)) * code.codebook().length(i);
    max_count = std::max(max_count, px.count(i));
  }
  r.exp_len = static_cast<double>(weighted) / denom;
  r.target_exp_len = code.target().expected_len;
  r.max_px = static_cast<double>(max_count) / denom;
  r.px_entropy = entropy(px);
  r.min_type_order = min_type_order(px);

  r.rate = static_cast<double>(r.m) / r.exp_len;
  r.entropy_rate = r.px_entropy / r.exp_len;
  r.hv_rate = std::log2(static_cast<double>(r.min_type_order)) / r.exp_len;
  r.kl = kl_divergence(px, code.target().leaf_probs);
  r.kl_normalized = r.kl / r.exp_len;
  r.kl_bound = std::exp2(-r.q) * std::numbers::log2e / r.mu;
  r.entropy_lower = r.n_bits - std::log2(1.0 / r.mu + std::exp2(-r.q));
  return r;
}

inline RateReport rate_report(const ResolutionCode& code, const Pmf& p) {
  if (!(code.source() == p)) throw Error(ErrorCode::invalid_argument, "code was built for another target");
  return rate_report(code);
}

struct BoundCheck {
  std::string name;
  bool applicable = true;
  bool passed = true;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs <= rhs up to a relative slack.
inline bool within(double lhs, double rhs, double slack = 1e-9) {
  return lhs <= rhs + slack * std::max(std::abs(lhs), std::abs(rhs));
}

/// The finite-length inequalities. Checks built on the Tunstall balance
/// (divergence bound, entropy lower bound, max P_X bound) apply only to f2v.
inline std::vector<BoundCheck> bound_suite(const RateReport& r) {
  const bool f2v = r.scheme == Scheme::f2v;
  const double n = static_cast<double>(r.n_codewords);
  auto make = [](std::string name, bool applicable, double lhs, double rhs) {
    BoundCheck c{std::move(name), applicable, true, lhs, rhs};
    if (applicable) c.passed = within(lhs, rhs);
    return c;
  };
  std::vector<BoundCheck> out;
  out.push_back(make("kl <= 2^-q log2(e)/mu", f2v, r.kl, r.kl_bound));
  out.push_back(make("H(P_X) >= n - log2(1/mu + 2^-q)", f2v, r.entropy_lower, r.px_entropy));
  out.push_back(make("R >= entropy rate", true, r.entropy_rate, r.rate));
  {
    BoundCheck c{"R >= R_hv >= entropy rate", true, true, r.hv_rate, r.rate};
    c.passed = within(r.hv_rate, r.rate) && within(r.entropy_rate, r.hv_rate);
    out.push_back(c);
  }
  out.push_back(make("max P_X <= 1/(N mu) + 2^-m", f2v, r.max_px,
                     1.0 / (n * r.mu) + std::exp2(-static_cast<double>(r.m))));
  out.push_back(make("kl / E[l] <= kl", true, r.kl_normalized, r.kl));
  return out;
}

inline std::vector<BoundCheck> bound_suite(const ResolutionCode& code) { return bound_suite(rate_report(code)); }

inline bool all_passed(const std::vector<BoundCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
}

/// Chooses the codebook size N for input length m over a D-ary alphabet.
using GrowthPolicy = std::function<std::uint64_t(unsigned m, std::size_t alphabet_size)>;

/// n_bits = m - ceil(sqrt(m)): q grows without bound while q/n -> 0.
/// N = 2^n_bits rounded down to a valid Tunstall size.
inline std::uint64_t sqrt_growth(unsigned m, std::size_t alphabet_size) {
  const auto excess = static_cast<unsigned>(std::ceil(std::sqrt(static_cast<double>(m))));
  const unsigned n = m > excess ? m - excess : 1;
  return tunstall::floor_valid_size(alphabet_size, std::uint64_t{1} << n);
}

inline std::vector<RateReport> convergence_probe(const Pmf& p, std::span<const unsigned> m_list,
                                                 const GrowthPolicy& policy = sqrt_growth) {
  std::vector<RateReport> out;
  out.reserve(m_list.size());
  for (unsigned m : m_list) {
    out.push_back(rate_report(build_code(p, policy(m, p.alphabet_size()), m)));
  }
  return out;
}

}  // namespace vlres
