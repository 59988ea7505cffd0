#include "dip/bits.hpp"

namespace dip {

Bits Bits::slice(size_t from, size_t len) const
{
    Bits r;
    for (size_t i = from; i < from + len && i < bits_.size(); ++i) {
        r.push_back(bits_[i]);
    }
    return r;
}

std::string Bits::to_string() const
{
    std::string s;
    s.reserve(bits_.size());
    for (bool b : bits_) {
        s.push_back(b ? '1' : '0');
    }
    return s;
}

std::vector<uint8_t> Bits::to_bytes() const
{
    std::vector<uint8_t> out((bits_.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) {
            out[i / 8] |= static_cast<uint8_t>(1u << (i % 8));
        }
    }
    return out;
}

BitWriter& BitWriter::put(uint64_t v, unsigned w)
{
    for (unsigned i = w; i-- > 0;) {
        out_.push_back(i < 64 && ((v >> i) & 1u));
    }
    return *this;
}

BitWriter& BitWriter::put_big(const Big& v, unsigned w)
{
    for (unsigned i = w; i-- > 0;) {
        out_.push_back(i < 512 && boost::multiprecision::bit_test(v, i));
    }
    return *this;
}

BitWriter& BitWriter::bits(const Bits& b)
{
    out_.append(b);
    return *this;
}

uint64_t BitReader::get(unsigned w)
{
    uint64_t v = 0;
    for (unsigned i = 0; i < w; ++i) {
        bool b = false;
        if (pos_ < b_.size()) {
            b = b_[pos_];
        } else {
            fail_ = true;
        }
        ++pos_;
        v = (v << 1) | (b ? 1u : 0u);
    }
    return v;
}

Big BitReader::get_big(unsigned w)
{
    Big v = 0;
    for (unsigned i = 0; i < w; ++i) {
        bool b = false;
        if (pos_ < b_.size()) {
            b = b_[pos_];
        } else {
            fail_ = true;
        }
        ++pos_;
        v <<= 1;
        if (b) {
            v |= 1u;
        }
    }
    return v;
}

Bits BitReader::bits(size_t len)
{
    Bits r;
    for (size_t i = 0; i < len; ++i) {
        if (pos_ < b_.size()) {
            r.push_back(b_[pos_]);
        } else {
            fail_ = true;
            r.push_back(false);
        }
        ++pos_;
    }
    return r;
}

} // namespace dip
