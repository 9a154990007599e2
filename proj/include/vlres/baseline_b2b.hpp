#pragma once

// Optimal block-to-block resolution code: m input bits map onto the n-fold
// product codebook Y^n, with the KL-optimal 2^m-type codeword distribution.

#include <cstdint>

#include "vlres/codetree.hpp"
#include "vlres/f2v_encoder.hpp"
#include "vlres/mtype.hpp"
#include "vlres/probdist.hpp"

namespace vlres {

inline ResolutionCode build_block_code(const Pmf& p, std::size_t n, unsigned m,
                                       std::uint64_t cap = std::uint64_t{1} << 20,
                                       const mtype::Options& qopts = {}) {
  return ResolutionCode(Scheme::b2b, p, m, leaf_distribution(p, product_codebook(p.alphabet_size(), n, cap)),
                        qopts);
}

/// Block length n of a b2b code (every codeword has the same length).
inline std::size_t block_length(const ResolutionCode& code) { return code.codebook().length(0); }

}  // namespace vlres
