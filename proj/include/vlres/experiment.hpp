#pragma once

// Rate-divergence sweeps over (scheme, m, N) grid points and their CSV /
// gnuplot renderings.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "vlres/baseline_b2b.hpp"
#include "vlres/f2v_encoder.hpp"
#include "vlres/io.hpp"
#include "vlres/metrics.hpp"
#include "vlres/tunstall.hpp"

namespace vlres {

struct GridPoint {
  Scheme scheme = Scheme::f2v;
  unsigned m = 0;
  /// f2v: Tunstall codebook size N. b2b: block length n.
  std::uint64_t size = 0;
};

/// m -> list of n. The 14-point table: m=6: 3..6, m=9: 5..9, m=12: 8..12.
using GridTable = std::map<unsigned, std::vector<unsigned>>;

inline GridTable default_grid_table() {
  return {{6, {3, 4, 5, 6}}, {9, {5, 6, 7, 8, 9}}, {12, {8, 9, 10, 11, 12}}};
}

/// Number of codewords a grid point produces (N for f2v, D^n for b2b).
inline std::uint64_t codebook_size(const GridPoint& g, std::size_t alphabet_size) {
  if (g.scheme == Scheme::f2v) return g.size;
  std::uint64_t n = 1;
  for (std::uint64_t i = 0; i < g.size; ++i) n *= alphabet_size;
  return n;
}

/// Expands a table into grid points. f2v entries use N = 2^n; when that is
/// not a valid Tunstall size for the alphabet it is rounded down if
/// `round_size`, otherwise rejected.
inline std::vector<GridPoint> expand_grid(const GridTable& table, const std::vector<Scheme>& schemes,
                                          std::size_t alphabet_size, bool round_size = false) {
  std::vector<GridPoint> out;
  for (Scheme s : schemes) {
    for (const auto& [m, ns] : table) {
      for (unsigned n : ns) {
        if (s == Scheme::b2b) {
          out.push_back({s, m, n});
          continue;
        }
        if (n >= 63) throw Error(ErrorCode::invalid_size, "n=" + std::to_string(n) + " too large");
        std::uint64_t size = std::uint64_t{1} << n;
        if (!tunstall::is_valid_size(alphabet_size, size)) {
          if (!round_size) {
            throw Error(ErrorCode::invalid_size, "N=2^" + std::to_string(n) + " is not a valid size for D=" +
                                                     std::to_string(alphabet_size));
          }
          size = tunstall::floor_valid_size(alphabet_size, size);
          if (size == 0) throw Error(ErrorCode::invalid_size, "no valid size below 2^" + std::to_string(n));
        }
        out.push_back({s, m, size});
      }
    }
  }
  return out;
}

inline ResolutionCode build_point(const Pmf& p, const GridPoint& g) {
  if (g.scheme == Scheme::f2v) return build_code(p, g.size, g.m);
  return build_block_code(p, static_cast<std::size_t>(g.size), g.m);
}

/// Evaluates every point, `jobs` at a time. The result is sorted by
/// (scheme, m, N) and duplicates are dropped, independent of completion order.
inline std::vector<RateReport> run_sweep(const Pmf& p, std::vector<GridPoint> points, unsigned jobs = 1) {
  const std::size_t d = p.alphabet_size();
  auto key = [d](const GridPoint& g) { return std::make_tuple(g.scheme, g.m, codebook_size(g, d)); };
  std::sort(points.begin(), points.end(), [&](const GridPoint& a, const GridPoint& b) { return key(a) < key(b); });
  points.erase(std::unique(points.begin(), points.end(),
                           [&](const GridPoint& a, const GridPoint& b) { return key(a) == key(b); }),
               points.end());

  std::vector<RateReport> reports(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      try {
        reports[i] = rate_report(build_point(p, points[i]));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return reports;
}

inline constexpr const char* kCurveHeader =
    "scheme,m,N,n_bits,q,rate,entropy_rate,hv_rate,kl_bits,kl_bound_bits,exp_len";

/// One CSV row. kl_bound_bits is left empty for b2b rows, where the bound
/// does not apply.
inline std::string curve_row(const RateReport& r) {
  std::string s = to_string(r.scheme);
  s += ',' + std::to_string(r.m);
  s += ',' + std::to_string(r.n_codewords);
  s += ',' + format_real(r.n_bits);
  s += ',' + format_real(r.q);
  s += ',' + format_real(r.rate);
  s += ',' + format_real(r.entropy_rate);
  s += ',' + format_real(r.hv_rate);
  s += ',' + format_real(r.kl);
  s += ',';
  if (r.scheme == Scheme::f2v) s += format_real(r.kl_bound);
  s += ',' + format_real(r.exp_len);
  return s;
}

inline std::string curve_csv(const std::vector<RateReport>& rows) {
  std::string out = kCurveHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += curve_row(r);
    out += '\n';
  }
  return out;
}

/// Blocks of "rate kl" pairs, one block per (scheme, m), separated by two
/// blank lines so gnuplot can address them with `index`.
inline std::string curve_gnuplot(const std::vector<RateReport>& rows) {
  std::ostringstream out;
  out.precision(17);
  const RateReport* prev = nullptr;
  for (const auto& r : rows) {
    if (!prev || prev->scheme != r.scheme || prev->m != r.m) {
      if (prev) out << "\n\n";
      out << "# scheme=" << to_string(r.scheme) << " m=" << r.m << "\n# rate kl_bits N\n";
    }
    out << format_real(r.rate) << ' ' << format_real(r.kl) << ' ' << r.n_codewords << '\n';
    prev = &r;
  }
  if (!rows.empty()) out << "\n\n# target_entropy\n" << format_real(rows.front().target_entropy) << " 0\n";
  return out.str();
}

}  // namespace vlres
