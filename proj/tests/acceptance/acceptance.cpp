// Acceptance run. Prints one PASS/FAIL line per criterion; exit status is
// nonzero if any selected criterion fails.
//
//   acceptance            all criteria
//   acceptance c4 c6      a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "vlres/vlres.hpp"

using namespace vlres;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

const Pmf& reference_target() {
  static const Pmf p({0.211, 0.789});
  return p;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Every quantizer output produced by this run, with the target it came from.
struct QuantRecord {
  std::vector<double> q;
  TypedPmf t;
};
std::vector<QuantRecord>& quant_log() {
  static std::vector<QuantRecord> log;
  return log;
}
void record(std::span<const double> q, const TypedPmf& t) { quant_log().push_back({{q.begin(), q.end()}, t}); }
void record(const ResolutionCode& c) { record(c.target().leaf_probs, c.counts()); }

// Every code with m <= 16 built by this run.
std::vector<ResolutionCode>& small_codes() {
  static std::vector<ResolutionCode> codes;
  return codes;
}
void keep(const ResolutionCode& c) {
  record(c);
  if (c.m() <= 16) small_codes().push_back(c);
}

std::vector<ResolutionCode> grid_codes(const std::vector<Scheme>& schemes, bool with_extra) {
  auto points = expand_grid(default_grid_table(), schemes, 2);
  if (with_extra) points.push_back({Scheme::f2v, 12, 3072});
  std::vector<ResolutionCode> out;
  for (const auto& g : points) out.push_back(build_point(reference_target(), g));
  return out;
}

// --- 1 -------------------------------------------------------------------------

Outcome quantizer_optimality() {
  std::mt19937_64 rng(1001);
  std::size_t cases = 0, bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 250; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
    const auto q = testing::random_probs(rng, n);
    for (std::uint64_t m : {4, 8, 16, 32}) {
      const TypedPmf g = mtype::quantize(q, m);
      const TypedPmf b = mtype::brute_force_quantize(q, m);
      record(q, g);
      record(q, b);
      const double diff = std::abs(kl_divergence(g, q) - kl_divergence(b, q));
      worst = std::max(worst, diff);
      if (diff > 1e-12) ++bad;
      ++cases;
    }
  }
  return {bad == 0, std::to_string(cases) + " cases (250 distributions x 4 M), max |greedy - brute| = " + fmt(worst)};
}

// --- 2 (runs last, over everything recorded) -------------------------------------

Outcome quant_bounds() {
  // Extra large instances on top of what the other criteria recorded.
  std::mt19937_64 rng(2002);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 500)(rng);
    const auto q = trial % 3 == 0 ? testing::random_sparse_probs(rng, n, n / 3) : testing::random_probs(rng, n);
    const std::uint64_t m = std::uint64_t{1} << std::uniform_int_distribution<unsigned>(1, 40)(rng);
    record(q, mtype::quantize(q, m));
  }
  std::size_t bad = 0, atoms = 0;
  for (const auto& r : quant_log()) {
    const double m = static_cast<double>(r.t.denominator());
    for (std::size_t a = 0; a < r.q.size(); ++a) {
      ++atoms;
      // Exact form of P_X(a) <= Q(a) + 1/M: c <= M Q(a) + 1, in long double.
      const long double lhs = static_cast<long double>(r.t.count(a));
      const long double rhs = static_cast<long double>(m) * static_cast<long double>(r.q[a]) + 1.0L;
      if (lhs > rhs * (1.0L + 1e-15L)) ++bad;
    }
  }
  return {bad == 0 && !quant_log().empty(),
          std::to_string(quant_log().size()) + " quantizer outputs, " + std::to_string(atoms) + " atoms, " +
              std::to_string(bad) + " violations"};
}

// --- 3 ---------------------------------------------------------------------------

Outcome tunstall_balance() {
  std::mt19937_64 rng(3003);
  std::size_t trees = 0, bad = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t d = trial % 2 == 0 ? 2 : 3;
    const Pmf p(testing::random_probs(rng, d, 0.05));
    std::uint64_t n;
    if (trial % 4 < 2) {
      n = tunstall::floor_valid_size(d, 4096);
    } else {
      n = tunstall::floor_valid_size(d, std::uniform_int_distribution<std::uint64_t>(d, 4096)(rng));
    }
    const LeafDistribution ld = tunstall::build(p, n);
    const auto r = tunstall::check_balance(ld, p.mu());
    const double nd = static_cast<double>(n);
    const bool ok = r.ratio <= (1.0 / p.mu()) * (1 + 1e-9) && r.min_prob >= (p.mu() / nd) * (1 - 1e-9) &&
                    r.max_prob <= (1.0 / (nd * p.mu())) * (1 + 1e-9) && ld.codebook.size() == n;
    if (!ok) ++bad;
    worst_ratio = std::max(worst_ratio, r.ratio * p.mu());
    ++trees;
  }
  return {bad == 0, std::to_string(trees) + " trees, max (max/min)*mu = " + fmt(worst_ratio)};
}

// --- 4 ---------------------------------------------------------------------------

Outcome grid_bounds() {
  std::size_t checks = 0, failed = 0;
  std::string first_failure;
  for (const auto& code : grid_codes({Scheme::f2v}, true)) {
    keep(code);
    const RateReport r = rate_report(code);
    for (const auto& c : bound_suite(r)) {
      if (!c.applicable) continue;
      ++checks;
      if (!c.passed) {
        ++failed;
        if (first_failure.empty()) {
          first_failure = " first: m=" + std::to_string(r.m) + " N=" + std::to_string(r.n_codewords) + " " + c.name;
        }
      }
    }
  }
  return {failed == 0, std::to_string(checks) + " checks on 15 codes, " + std::to_string(failed) + " failed" +
                           first_failure};
}

// --- 5 (runs late, over everything kept) -----------------------------------------

Outcome exactness() {
  keep(build_code(Pmf({0.8, 0.2}), 3, 3));
  keep(build_code(Pmf::uniform(2), 2, 1));
  for (const auto& c : grid_codes({Scheme::b2b}, false)) keep(c);
  std::mt19937_64 rng(5005);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const Pmf p(testing::random_probs(rng, d, 0.05));
    const unsigned m = std::uniform_int_distribution<unsigned>(1, 16)(rng);
    keep(build_code(p, tunstall::floor_valid_size(d, std::uniform_int_distribution<std::uint64_t>(d, 1024)(rng)), m));
  }
  std::size_t bad = 0;
  std::uint64_t inputs = 0;
  for (const auto& code : small_codes()) {
    std::vector<std::uint64_t> hist(code.size(), 0);
    for (std::uint64_t u = 0; u < code.inputs(); ++u) ++hist[encode_index(code, u)];
    inputs += code.inputs();
    if (!std::equal(hist.begin(), hist.end(), code.counts().counts().begin(), code.counts().counts().end())) ++bad;
  }
  return {bad == 0, std::to_string(small_codes().size()) + " codes, " + std::to_string(inputs) +
                        " inputs enumerated, " + std::to_string(bad) + " mismatches"};
}

// --- 6 ---------------------------------------------------------------------------

Outcome figure_trends() {
  const double h = entropy(reference_target());
  std::vector<RateReport> f2v, b2b;
  for (const auto& code : grid_codes({Scheme::f2v, Scheme::b2b}, false)) {
    keep(code);
    (code.scheme() == Scheme::f2v ? f2v : b2b).push_back(rate_report(code));
  }

  // Cross-check the quantizer on every point small enough for the DP oracle.
  std::size_t cross_bad = 0;
  for (const auto* rows : {&f2v, &b2b}) {
    for (const auto& r : *rows) {
      if (r.m > 9 || r.n_codewords > 64) continue;
      const std::uint64_t size =
          r.scheme == Scheme::f2v ? r.n_codewords : static_cast<std::uint64_t>(std::log2(r.n_codewords));
      const ResolutionCode code = build_point(reference_target(), {r.scheme, r.m, size});
      if (std::abs(testing::dp_min_kl_bits(code.target().leaf_probs, code.inputs()) - r.kl) > 1e-12) ++cross_bad;
    }
  }

  auto min_kl = [&](unsigned m) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : f2v) {
      if (r.m == m) best = std::min(best, r.kl);
    }
    return best;
  };
  const double kl6 = min_kl(6), kl12 = min_kl(12);
  const bool a = kl12 < kl6;

  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& r : f2v) {
    if (r.m == 12) best_gap = std::min(best_gap, std::abs(r.rate - h));
  }
  const bool b = best_gap <= 0.06;

  std::size_t dominated = 0;
  std::string undominated;
  for (const auto& r : b2b) {
    const bool ok = std::any_of(f2v.begin(), f2v.end(), [&](const RateReport& f) {
      return f.rate <= r.rate + 0.02 && f.kl <= r.kl;
    });
    if (ok) {
      ++dominated;
    } else {
      undominated += " (m=" + std::to_string(r.m) + ",N=" + std::to_string(r.n_codewords) + ")";
    }
  }
  const bool c = dominated == b2b.size() || 10 * dominated >= 8 * b2b.size();

  std::ostringstream d;
  d << "(a) min kl m=12 " << fmt(kl12) << " < m=6 " << fmt(kl6) << (a ? " ok" : " NO") << "; (b) best m=12 |R-H| "
    << fmt(best_gap) << " (H=" << fmt(h) << ")" << (b ? " ok" : " NO") << "; (c) " << dominated << "/"
    << b2b.size() << " b2b points dominated" << (undominated.empty() ? "" : ", not:" + undominated)
    << "; oracle cross-check mismatches " << cross_bad;
  return {a && b && c && cross_bad == 0, d.str()};
}

// --- 7 ---------------------------------------------------------------------------

Outcome convergence() {
  const double h = entropy(reference_target());
  const std::vector<unsigned> ms{8, 12, 16, 20};
  const auto reports = convergence_probe(reference_target(), ms);
  bool monotone = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    d << "m=" << r.m << " N=" << r.n_codewords << " kl=" << fmt(r.kl) << " |R-H|=" << fmt(std::abs(r.rate - h))
      << "; ";
    if (i > 0 && !(r.kl < reports[i - 1].kl)) monotone = false;
  }
  const bool gap = std::abs(reports.back().rate - h) < std::abs(reports.front().rate - h);
  d << "kl monotone " << (monotone ? "yes" : "NO") << ", |R-H| shrinks " << (gap ? "yes" : "NO");
  return {monotone && gap, d.str()};
}

// --- 8 ---------------------------------------------------------------------------

Outcome statistical_generation() {
  const ResolutionCode code = build_code(reference_target(), 3072, 12);
  record(code);
  PrngBitSource bits(42);
  StreamGenerator gen(code, bits);
  while (gen.stats().output_symbols < 1000000) {
    if (!gen.next()) return {false, "bit source exhausted"};
  }
  const auto& s = gen.stats();
  std::vector<double> empirical(code.size());
  for (std::size_t i = 0; i < code.size(); ++i) {
    empirical[i] = static_cast<double>(s.leaf_counts[i]) / static_cast<double>(s.codewords);
  }
  const double tv = variational_distance(code.counts(), empirical);
  const double rate = rate_report(code).rate;
  const double rel = std::abs(s.empirical_rate() - rate) / rate;
  std::ostringstream d;
  d << s.codewords << " codewords, " << s.output_symbols << " symbols; TV=" << fmt(tv) << " (<= 0.01 "
    << (tv <= 0.01 ? "ok" : "NO") << "); empirical rate " << fmt(s.empirical_rate()) << " vs R " << fmt(rate)
    << ", rel err " << fmt(rel) << (rel <= 0.02 ? " ok" : " NO");
  return {tv <= 0.01 && rel <= 0.02, d.str()};
}

// --- 9 ---------------------------------------------------------------------------

Outcome tv_kl_bound() {
  std::mt19937_64 rng(9009);
  std::size_t pairs = 0, bad = 0;
  double tightest = 0.0;
  while (pairs < 1500) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    const auto q = testing::random_probs(rng, n, 0.01);
    std::vector<double> p;
    if (pairs % 2 == 0) {
      // small perturbation of q
      std::vector<double> w(n);
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += (w[a] = q[a] * std::exp(std::normal_distribution<double>(0, 0.3)(rng)));
      for (auto& v : w) v /= s;
      p = std::move(w);
    } else {
      p = testing::random_sparse_probs(rng, n, pairs % 3);
    }
    double tv = 0.0, dmax = 0.0, kl = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      tv += std::abs(p[a] - q[a]);
      if (p[a] > 0) {
        dmax = std::max(dmax, std::log(p[a] / q[a]));
        kl += p[a] * std::log(p[a] / q[a]);
      }
    }
    if (!(tv < 1.0)) continue;
    ++pairs;
    const double bound = std::sqrt(tv) * (1.0 + dmax);
    const double lib = kl_tv_bound(p, q);
    if (!(kl <= bound) || std::abs(lib - bound) > 1e-12 * std::max(1.0, bound) ||
        std::abs(kl_divergence(p, q) * std::numbers::ln2 - kl) > 1e-12) {
      ++bad;
    }
    tightest = std::max(tightest, kl / bound);
  }
  return {bad == 0, std::to_string(pairs) + " pairs with TV < 1, " + std::to_string(bad) +
                        " failures, max kl/bound = " + fmt(tightest)};
}

}  // namespace

int main(int argc, char** argv) {
  // Order matters: 2 and 5 audit what the others produced.
  const std::vector<Criterion> all{
      {"c1", "quantizer optimality (greedy = brute force)", 10.0, quantizer_optimality},
      {"c3", "Tunstall balance bounds", 30.0, tunstall_balance},
      {"c4", "bound suite on the default grid", 5.0, grid_bounds},
      {"c6", "figure trends", 0.0, figure_trends},
      {"c7", "convergence probe", 60.0, convergence},
      {"c8", "statistical generation", 10.0, statistical_generation},
      {"c9", "TV to KL bound", 0.0, tv_kl_bound},
      {"c5", "exhaustive enumeration exactness", 0.0, exactness},
      {"c2", "quantizer bound P_X(a) <= Q(a) + 1/M", 0.0, quant_bounds},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return c.id == w; })) {
      std::fprintf(stderr, "unknown criterion %s\n", w.c_str());
      return 2;
    }
  }
  auto selected = [&](const std::string& id) {
    return wanted.empty() || std::find(wanted.begin(), wanted.end(), id) != wanted.end();
  };
  // A lone c2 or c5 still needs the producers to have run.
  const bool audit_only = !wanted.empty() && std::all_of(wanted.begin(), wanted.end(), [](const std::string& w) {
    return w == "c2" || w == "c5";
  });

  int failures = 0;
  for (const auto& c : all) {
    const bool show = selected(c.id);
    if (!show && !audit_only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!show) continue;
    bool pass = o.pass;
    std::string timing = fmt(secs) + " s";
    if (c.time_limit_s > 0) {
      timing += " (limit " + fmt(c.time_limit_s) + " s)";
      if (secs >= c.time_limit_s) pass = false;
    }
    std::printf("%s %s: %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(), o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
