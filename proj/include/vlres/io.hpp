#pragma once

// Text and JSON representations: distribution strings, codebooks, code
// dumps, and shortest round-trip number formatting.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "vlres/baseline_b2b.hpp"
#include "vlres/codetree.hpp"
#include "vlres/error.hpp"
#include "vlres/f2v_encoder.hpp"
#include "vlres/probdist.hpp"

namespace vlres {

using json = nlohmann::json;

/// Shortest decimal that parses back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) throw Error(ErrorCode::internal, "number formatting failed");
  return std::string(buf, res.ptr);
}

/// "0.211,0.789" -> {0.211, 0.789}. No normalization here.
inline std::vector<double> parse_reals(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view field = text.substr(pos, end - pos);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      throw Error(ErrorCode::parse_error, "bad number \"" + std::string(field) + "\"");
    }
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

inline Pmf parse_distribution(std::string_view text) { return Pmf(parse_reals(text)); }

inline std::string format_distribution(const Pmf& p) {
  std::string s;
  for (std::size_t a = 0; a < p.alphabet_size(); ++a) {
    if (a) s += ',';
    s += format_real(p[a]);
  }
  return s;
}

// --- codebooks -------------------------------------------------------------

inline json codebook_to_json(const Codebook& c) {
  json leaves = json::array();
  for (const auto& p : c.leaves()) leaves.push_back(path_string(p));
  return json{{"d", c.alphabet_size()}, {"leaves", std::move(leaves)}};
}

inline Codebook codebook_from_json(const json& j, const CodebookLimits& limits = {}) {
  try {
    const auto d = j.at("d").get<std::size_t>();
    std::vector<Path> leaves;
    for (const auto& s : j.at("leaves")) leaves.push_back(parse_path(s.get<std::string>(), d));
    return validate_complete(std::move(leaves), d, limits);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

inline json leaf_distribution_to_json(const LeafDistribution& ld) {
  json j = codebook_to_json(ld.codebook);
  j["target_probs"] = ld.leaf_probs;
  return j;
}

// --- resolution codes --------------------------------------------------------

inline json code_to_json(const ResolutionCode& code) {
  json leaves = json::array();
  for (const auto& p : code.codebook().leaves()) leaves.push_back(path_string(p));
  std::vector<double> p(code.source().probs().begin(), code.source().probs().end());
  std::vector<std::uint64_t> counts(code.counts().counts().begin(), code.counts().counts().end());
  return json{{"scheme", to_string(code.scheme())},
              {"p", std::move(p)},
              {"d", code.codebook().alphabet_size()},
              {"m", code.m()},
              {"N", code.size()},
              {"leaves", std::move(leaves)},
              {"target_probs", code.target().leaf_probs},
              {"counts", std::move(counts)}};
}

/// Rebuilds the code from (scheme, p, m, N) and checks that the stored
/// leaves and counts agree with the rebuild.
inline ResolutionCode code_from_json(const json& j) {
  try {
    const std::string scheme = j.value("scheme", std::string("f2v"));
    const Pmf p(j.at("p").get<std::vector<double>>());
    const auto m = j.at("m").get<unsigned>();
    const auto n = j.at("N").get<std::uint64_t>();
    const auto leaf_text = j.at("leaves").get<std::vector<std::string>>();
    const auto counts = j.at("counts").get<std::vector<std::uint64_t>>();
    if (leaf_text.empty()) throw Error(ErrorCode::parse_error, "no leaves");

    auto rebuild = [&]() -> ResolutionCode {
      if (scheme == "f2v") return build_code(p, n, m);
      if (scheme == "b2b") return build_block_code(p, leaf_text.front().size(), m);
      throw Error(ErrorCode::parse_error, "unknown scheme \"" + scheme + "\"");
    };
    ResolutionCode code = rebuild();
    if (code.size() != n || leaf_text.size() != n) throw Error(ErrorCode::parse_error, "N does not match leaves");
    for (std::size_t i = 0; i < n; ++i) {
      if (path_string(code.codebook().leaf(i)) != leaf_text[i]) {
        throw Error(ErrorCode::parse_error, "leaf " + std::to_string(i) + " differs from the rebuilt codebook");
      }
    }
    if (!std::equal(counts.begin(), counts.end(), code.counts().counts().begin(), code.counts().counts().end())) {
      throw Error(ErrorCode::parse_error, "counts differ from the rebuilt quantization");
    }
    return code;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

}  // namespace vlres
