#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>

namespace dip {

// Field elements and packed tuples live in 512-bit words; products use 1024.
using Big = boost::multiprecision::uint512_t;
using Big2 = boost::multiprecision::uint1024_t;

inline unsigned bit_length(const Big& x)
{
    return x == 0 ? 0u : static_cast<unsigned>(boost::multiprecision::msb(x)) + 1u;
}

inline unsigned bit_length(uint64_t x)
{
    return x == 0 ? 0u : 64u - static_cast<unsigned>(__builtin_clzll(x));
}

// Bits needed to write any value in [0, m).
inline unsigned width_for(uint64_t m)
{
    return m <= 1 ? 0u : bit_length(m - 1);
}

inline unsigned width_for(const Big& m)
{
    return m <= 1 ? 0u : bit_length(Big(m - 1));
}

inline unsigned ceil_log2(uint64_t m)
{
    return width_for(m);
}

} // namespace dip
