#pragma once

// Complete prefix-free D-ary codebooks and the leaf distribution induced by
// using a DMS as branching distribution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "vlres/error.hpp"
#include "vlres/probdist.hpp"

namespace vlres {

using Symbol = std::uint8_t;
using Path = std::vector<Symbol>;

/// Paths are written as digit strings 0-9 then a-z, so at most 36 symbols.
inline constexpr std::size_t kMaxAlphabet = 36;

struct CodebookLimits {
  std::size_t max_depth = 64;
  std::uint64_t max_leaves = std::uint64_t{1} << 20;
};

inline char symbol_char(Symbol s) {
  return s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + (s - 10));
}

inline std::string path_string(std::span<const Symbol> path) {
  std::string s;
  s.reserve(path.size());
  for (Symbol x : path) s.push_back(symbol_char(x));
  return s;
}

inline Path parse_path(std::string_view text, std::size_t alphabet_size) {
  Path p;
  p.reserve(text.size());
  for (char ch : text) {
    int v = -1;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'z') v = ch - 'a' + 10;
    if (v < 0 || static_cast<std::size_t>(v) >= alphabet_size) {
      throw Error(ErrorCode::parse_error, "bad symbol '" + std::string(1, ch) + "' in path \"" +
                                              std::string(text) + "\"");
    }
    p.push_back(static_cast<Symbol>(v));
  }
  return p;
}

class Codebook;
inline Codebook validate_complete(std::vector<Path> leaves, std::size_t alphabet_size,
                                  const CodebookLimits& limits = {});
inline Codebook product_codebook(std::size_t alphabet_size, std::size_t depth,
                                 std::uint64_t cap = std::uint64_t{1} << 20);

/// A complete prefix-free D-ary codebook, leaves in lexicographic order.
/// Only obtainable through validate_complete / product_codebook, so every
/// instance satisfies the Kraft equality exactly.
class Codebook {
 public:
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  std::size_t size() const noexcept { return leaves_.size(); }
  const std::vector<Path>& leaves() const noexcept { return leaves_; }
  const Path& leaf(std::size_t i) const { return leaves_[i]; }
  std::size_t length(std::size_t i) const { return leaves_[i].size(); }

  std::size_t max_length() const noexcept {
    std::size_t l = 0;
    for (const auto& p : leaves_) l = std::max(l, p.size());
    return l;
  }

  /// Index of a leaf in canonical order, or size() if absent.
  std::size_t index_of(const Path& path) const {
    auto it = std::lower_bound(leaves_.begin(), leaves_.end(), path);
    if (it == leaves_.end() || *it != path) return leaves_.size();
    return static_cast<std::size_t>(it - leaves_.begin());
  }

  friend bool operator==(const Codebook&, const Codebook&) = default;

 private:
  Codebook(std::size_t d, std::vector<Path> leaves) : alphabet_size_(d), leaves_(std::move(leaves)) {}

  friend Codebook validate_complete(std::vector<Path> leaves, std::size_t alphabet_size,
                                    const CodebookLimits& limits);
  friend Codebook product_codebook(std::size_t alphabet_size, std::size_t depth, std::uint64_t cap);

  std::size_t alphabet_size_;
  std::vector<Path> leaves_;
};

/// Checks that `leaves` form a complete prefix-free D-ary codebook and
/// returns it in canonical (lexicographic) order.
inline Codebook validate_complete(std::vector<Path> leaves, std::size_t alphabet_size,
                                  const CodebookLimits& limits) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;

  if (alphabet_size < 2 || alphabet_size > kMaxAlphabet) {
    throw Error(ErrorCode::invalid_argument,
                "alphabet size must be in [2, " + std::to_string(kMaxAlphabet) + "]");
  }
  if (leaves.empty()) throw Error(ErrorCode::invalid_argument, "empty leaf list");
  if (leaves.size() > limits.max_leaves) {
    throw Error(ErrorCode::size_cap_exceeded, std::to_string(leaves.size()) + " leaves");
  }

  std::size_t depth = 0;
  for (const auto& p : leaves) {
    if (p.empty()) throw Error(ErrorCode::invalid_argument, "leaf of length 0");
    if (p.size() > limits.max_depth) {
      throw Error(ErrorCode::size_cap_exceeded,
                  "leaf length " + std::to_string(p.size()) + " exceeds " + std::to_string(limits.max_depth));
    }
    for (Symbol s : p) {
      if (s >= alphabet_size) {
        throw Error(ErrorCode::out_of_range, "symbol " + std::to_string(s) + " in leaf " + path_string(p));
      }
    }
    depth = std::max(depth, p.size());
  }

  std::sort(leaves.begin(), leaves.end());

  // In lexicographic order a prefix sorts immediately before some extension
  // of it, so adjacent pairs are enough.
  for (std::size_t i = 1; i < leaves.size(); ++i) {
    const Path& a = leaves[i - 1];
    const Path& b = leaves[i];
    if (a == b) throw Error(ErrorCode::duplicate_leaf, path_string(a));
    if (a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin())) {
      throw Error(ErrorCode::prefix_violation, path_string(a) + " is a prefix of " + path_string(b));
    }
  }

  // Kraft sum over the common denominator D^depth.
  std::vector<std::uint64_t> per_length(depth + 1, 0);
  for (const auto& p : leaves) ++per_length[p.size()];
  cpp_int sum = 0;
  cpp_int weight = 1;  // D^(depth - l), l running downward
  for (std::size_t l = depth; l >= 1; --l) {
    sum += weight * per_length[l];
    weight *= alphabet_size;
  }
  const cpp_int& total = weight;  // D^depth
  if (sum != total) {
    if (sum > total) throw Error(ErrorCode::internal, "Kraft sum exceeds one for a prefix-free set");
    const cpp_rational deficit(cpp_int(total - sum), total);
    throw IncompleteError(deficit.str());
  }
  return Codebook(alphabet_size, std::move(leaves));
}

/// All D^n paths of length n, in lexicographic order.
inline Codebook product_codebook(std::size_t alphabet_size, std::size_t depth, std::uint64_t cap) {
  if (alphabet_size < 2 || alphabet_size > kMaxAlphabet) {
    throw Error(ErrorCode::invalid_argument, "alphabet size must be in [2, 36]");
  }
  if (depth < 1) throw Error(ErrorCode::invalid_argument, "block length must be at least 1");
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < depth; ++i) {
    if (count > cap / alphabet_size) {
      throw Error(ErrorCode::size_cap_exceeded,
                  std::to_string(alphabet_size) + "^" + std::to_string(depth) + " exceeds " + std::to_string(cap));
    }
    count *= alphabet_size;
  }
  std::vector<Path> leaves;
  leaves.reserve(count);
  Path cur(depth, 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    leaves.push_back(cur);
    for (std::size_t k = depth; k-- > 0;) {
      if (++cur[k] < alphabet_size) break;
      cur[k] = 0;
    }
  }
  return Codebook(alphabet_size, std::move(leaves));
}

/// A codebook together with the probabilities its leaves get when the
/// target DMS is used as branching distribution.
struct LeafDistribution {
  Codebook codebook;
  std::vector<double> leaf_probs;
  double expected_len = 0.0;  ///< under leaf_probs, in symbols
};

inline double path_probability(const Pmf& p, std::span<const Symbol> path) {
  double v = 1.0;
  for (Symbol s : path) v *= p[s];
  return v;
}

inline LeafDistribution leaf_distribution(const Pmf& p, Codebook codebook) {
  if (p.alphabet_size() != codebook.alphabet_size()) {
    throw Error(ErrorCode::alphabet_mismatch, "distribution has " + std::to_string(p.alphabet_size()) +
                                                  " symbols, codebook " +
                                                  std::to_string(codebook.alphabet_size()));
  }
  if (!p.full_support()) {
    throw Error(ErrorCode::zero_probability_symbol, "tree constructions need a full-support target");
  }
  LeafDistribution ld{std::move(codebook), {}, 0.0};
  ld.leaf_probs.reserve(ld.codebook.size());
  for (const auto& leaf : ld.codebook.leaves()) {
    const double v = path_probability(p, leaf);
    ld.leaf_probs.push_back(v);
    ld.expected_len += v * static_cast<double>(leaf.size());
  }
  return ld;
}

}  // namespace vlres
