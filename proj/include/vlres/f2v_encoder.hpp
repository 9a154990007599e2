#pragma once

// Fixed-to-variable length resolution code. m fair bits index one of 2^m
// inputs; a deterministic many-to-one map sends each input to a codeword of a
// Tunstall codebook, so that the codeword distribution is the 2^m-type
// quantization of the Tunstall leaf distribution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vlres/bit_source.hpp"
#include "vlres/codetree.hpp"
#include "vlres/error.hpp"
#include "vlres/mtype.hpp"
#include "vlres/probdist.hpp"
#include "vlres/tunstall.hpp"

namespace vlres {

enum class Scheme { b2b, f2v };

inline const char* to_string(Scheme s) { return s == Scheme::f2v ? "f2v" : "b2b"; }

inline constexpr unsigned kMaxInputBits = 62;

/// Dictionary {0,1}^m, codebook, 2^m-type codeword counts and the canonical
/// map: codeword i receives the input integers [cum[i], cum[i+1]).
class ResolutionCode {
 public:
  /// Quantizes the target leaf distribution to 2^m-type and lays out the
  /// contiguous input ranges.
  ResolutionCode(Scheme scheme, Pmf source, unsigned m, LeafDistribution target,
                 const mtype::Options& qopts = {})
      : scheme_(scheme),
        source_(std::move(source)),
        m_(check_m(m)),
        target_(std::move(target)),
        counts_(mtype::quantize(target_.leaf_probs, std::uint64_t{1} << m_, qopts)) {
    cum_.resize(counts_.size() + 1, 0);
    for (std::size_t i = 0; i < counts_.size(); ++i) cum_[i + 1] = cum_[i] + counts_.count(i);
  }

  Scheme scheme() const noexcept { return scheme_; }
  const Pmf& source() const noexcept { return source_; }
  unsigned m() const noexcept { return m_; }
  std::uint64_t inputs() const noexcept { return std::uint64_t{1} << m_; }
  const Codebook& codebook() const noexcept { return target_.codebook; }
  const LeafDistribution& target() const noexcept { return target_; }
  const TypedPmf& counts() const noexcept { return counts_; }
  const std::vector<std::uint64_t>& cum() const noexcept { return cum_; }
  std::size_t size() const noexcept { return counts_.size(); }

  double n_bits() const { return std::log2(static_cast<double>(size())); }
  double q() const { return static_cast<double>(m_) - n_bits(); }

 private:
  static unsigned check_m(unsigned m) {
    if (m < 1 || m > kMaxInputBits) {
      throw Error(ErrorCode::invalid_argument,
                  "m must be in [1, " + std::to_string(kMaxInputBits) + "], got " + std::to_string(m));
    }
    return m;
  }

  Scheme scheme_;
  Pmf source_;
  unsigned m_;
  LeafDistribution target_;
  TypedPmf counts_;
  std::vector<std::uint64_t> cum_;
};

/// Tunstall codebook of size N for p, then the 2^m-type quantization.
inline ResolutionCode build_code(const Pmf& p, std::uint64_t n, unsigned m, const tunstall::Options& topts = {},
                                 const mtype::Options& qopts = {}) {
  if (m < 1 || m > kMaxInputBits) {
    throw Error(ErrorCode::invalid_argument, "m must be in [1, 62], got " + std::to_string(m));
  }
  return ResolutionCode(Scheme::f2v, p, m, tunstall::build(p, n, topts), qopts);
}

/// Index of the codeword that input word u maps to.
inline std::size_t encode_index(const ResolutionCode& code, std::uint64_t u) {
  if (u >= code.inputs()) {
    throw Error(ErrorCode::out_of_range,
                "input word " + std::to_string(u) + " needs more than " + std::to_string(code.m()) + " bits");
  }
  const auto& cum = code.cum();
  // Last i with cum[i] <= u; empty ranges are skipped automatically.
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return static_cast<std::size_t>(it - cum.begin()) - 1;
}

inline const Path& encode_word(const ResolutionCode& code, std::uint64_t u) {
  return code.codebook().leaf(encode_index(code, u));
}

/// Histogram of the map over all 2^m inputs. Enumerates every input when
/// m <= exhaustive_limit; above that it reads the range table.
inline TypedPmf induced_distribution(const ResolutionCode& code, unsigned exhaustive_limit = 16) {
  std::vector<std::uint64_t> hist(code.size(), 0);
  if (code.m() <= exhaustive_limit) {
    for (std::uint64_t u = 0; u < code.inputs(); ++u) ++hist[encode_index(code, u)];
  } else {
    for (std::size_t i = 0; i < code.size(); ++i) hist[i] = code.cum()[i + 1] - code.cum()[i];
  }
  return TypedPmf(std::move(hist), code.inputs());
}

struct StreamStats {
  std::uint64_t input_bits = 0;
  std::uint64_t output_symbols = 0;
  std::uint64_t codewords = 0;
  std::vector<std::uint64_t> leaf_counts;

  double empirical_rate() const {
    return output_symbols == 0 ? 0.0 : static_cast<double>(input_bits) / static_cast<double>(output_symbols);
  }
};

/// Pulls m bits per codeword from a bit source. Holds a cursor, so one
/// generator per stream.
class StreamGenerator {
 public:
  StreamGenerator(const ResolutionCode& code, BitSource& bits) : code_(code), bits_(bits) {
    stats_.leaf_counts.assign(code.size(), 0);
  }

  /// Next codeword index, or nullopt when the source cannot supply m bits.
  std::optional<std::size_t> next() {
    std::uint64_t u = 0;
    if (!bits_.read(code_.m(), u)) return std::nullopt;
    const std::size_t i = encode_index(code_, u);
    stats_.input_bits += code_.m();
    stats_.output_symbols += code_.codebook().length(i);
    ++stats_.codewords;
    ++stats_.leaf_counts[i];
    return i;
  }

  const StreamStats& stats() const noexcept { return stats_; }

 private:
  const ResolutionCode& code_;
  BitSource& bits_;
  StreamStats stats_;
};

struct StreamResult {
  std::vector<Symbol> symbols;
  StreamStats stats;
};

/// Emits k codewords. Throws SourceExhaustedError (with the progress so
/// far) if the source runs out first.
inline StreamResult generate_stream(const ResolutionCode& code, BitSource& bits, std::uint64_t k) {
  StreamGenerator gen(code, bits);
  StreamResult out;
  for (std::uint64_t j = 0; j < k; ++j) {
    const auto i = gen.next();
    if (!i) throw SourceExhaustedError(gen.stats().codewords, gen.stats().output_symbols);
    const Path& leaf = code.codebook().leaf(*i);
    out.symbols.insert(out.symbols.end(), leaf.begin(), leaf.end());
  }
  out.stats = gen.stats();
  return out;
}

}  // namespace vlres
