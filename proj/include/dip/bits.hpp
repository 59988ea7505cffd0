#pragma once

#include "dip/bigint.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dip {

// A message: an exact-length bit string. Its size() is what the engine charges.
class Bits {
  public:
    Bits() = default;

    size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    bool operator[](size_t i) const { return bits_[i]; }
    void push_back(bool b) { bits_.push_back(b); }
    void append(const Bits& other) { bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end()); }
    Bits slice(size_t from, size_t len) const;
    bool operator==(const Bits& o) const { return bits_ == o.bits_; }
    std::string to_string() const;
    // Packs into bytes, little-endian within a byte; used for hashing.
    std::vector<uint8_t> to_bytes() const;

  private:
    std::vector<bool> bits_;
};

class BitWriter {
  public:
    // Writes the low `w` bits of v, most significant first.
    BitWriter& put(uint64_t v, unsigned w);
    BitWriter& put_big(const Big& v, unsigned w);
    BitWriter& flag(bool b) { return put(b ? 1 : 0, 1); }
    BitWriter& bits(const Bits& b);
    const Bits& out() const { return out_; }
    Bits take() { return std::move(out_); }

  private:
    Bits out_;
};

// Reads never throw; running past the end sets fail() and yields zeros.
class BitReader {
  public:
    explicit BitReader(const Bits& b) : b_(b) {}

    uint64_t get(unsigned w);
    Big get_big(unsigned w);
    bool flag() { return get(1) != 0; }
    Bits bits(size_t len);
    bool fail() const { return fail_; }
    size_t remaining() const { return pos_ <= b_.size() ? b_.size() - pos_ : 0; }
    // True iff every bit was consumed and no read overran.
    bool done() const { return !fail_ && pos_ == b_.size(); }

  private:
    const Bits& b_;
    size_t pos_ = 0;
    bool fail_ = false;
};

} // namespace dip
