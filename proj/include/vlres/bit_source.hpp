#pragma once

// Sources of fair input bits. Bits are always consumed most-significant
// first: within a 64-bit generator word, and within a byte of a bit file.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "vlres/error.hpp"

namespace vlres {

class BitSource {
 public:
  virtual ~BitSource() = default;

  /// Reads `count` (<= 64) bits as an unsigned integer, first bit most
  /// significant. Returns false without consuming anything if fewer than
  /// `count` bits remain.
  virtual bool read(unsigned count, std::uint64_t& out) = 0;
};

/// Pseudorandom bits from std::mt19937_64 with the given seed.
class PrngBitSource final : public BitSource {
 public:
  explicit PrngBitSource(std::uint64_t seed) : gen_(seed) {}

  bool read(unsigned count, std::uint64_t& out) override {
    std::uint64_t v = 0;
    while (count > 0) {
      if (left_ == 0) {
        word_ = gen_();
        left_ = 64;
      }
      const unsigned take = count < left_ ? count : left_;
      const std::uint64_t chunk = (word_ >> (left_ - take)) & low_mask(take);
      v = take == 64 ? chunk : (v << take) | chunk;
      left_ -= take;
      count -= take;
    }
    out = v;
    return true;
  }

 private:
  static std::uint64_t low_mask(unsigned k) { return k >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1; }

  std::mt19937_64 gen_;
  std::uint64_t word_ = 0;
  unsigned left_ = 0;
};

/// A finite bit string held in memory.
class BufferBitSource final : public BitSource {
 public:
  BufferBitSource() = default;
  explicit BufferBitSource(std::vector<bool> bits) : bits_(std::move(bits)) {}

  /// Every byte contributes 8 bits, most significant first.
  static BufferBitSource from_bytes(const std::vector<std::uint8_t>& bytes) {
    std::vector<bool> bits;
    bits.reserve(bytes.size() * 8);
    for (std::uint8_t b : bytes) {
      for (int k = 7; k >= 0; --k) bits.push_back(((b >> k) & 1U) != 0);
    }
    return BufferBitSource(std::move(bits));
  }

  /// '0' / '1' characters; whitespace is skipped.
  static BufferBitSource from_text(const std::string& text) {
    std::vector<bool> bits;
    for (char c : text) {
      if (c == '0' || c == '1') bits.push_back(c == '1');
      else if (c != ' ' && c != '\n' && c != '\r' && c != '\t') {
        throw Error(ErrorCode::parse_error, "bit text may only contain 0, 1 and whitespace");
      }
    }
    return BufferBitSource(std::move(bits));
  }

  std::size_t remaining() const noexcept { return bits_.size() - pos_; }

  bool read(unsigned count, std::uint64_t& out) override {
    if (count > 64 || remaining() < count) return false;
    std::uint64_t v = 0;
    for (unsigned i = 0; i < count; ++i) v = (v << 1) | (bits_[pos_ + i] ? 1U : 0U);
    pos_ += count;
    out = v;
    return true;
  }

 private:
  std::vector<bool> bits_;
  std::size_t pos_ = 0;
};

enum class BitFileFormat { automatic, raw, text };

/// Loads a bit file. `automatic` treats a non-empty file made only of
/// '0', '1' and whitespace as text, anything else as raw bytes.
inline BufferBitSource load_bit_file(const std::string& path, BitFileFormat format = BitFileFormat::automatic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open bit file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (format == BitFileFormat::automatic) {
    bool looks_text = !bytes.empty();
    for (std::uint8_t b : bytes) {
      if (b != '0' && b != '1' && b != ' ' && b != '\n' && b != '\r' && b != '\t') {
        looks_text = false;
        break;
      }
    }
    format = looks_text ? BitFileFormat::text : BitFileFormat::raw;
  }
  if (format == BitFileFormat::text) return BufferBitSource::from_text(std::string(bytes.begin(), bytes.end()));
  return BufferBitSource::from_bytes(bytes);
}

}  // namespace vlres
