#pragma once

#include "dip/bigint.hpp"

#include <cstdint>
#include <string>

namespace dip {

bool is_prime(const Big& x);
bool is_prime_u64(uint64_t x);
// Smallest prime >= x. Memoized; x must stay below 2^500.
Big next_prime(const Big& x);
uint64_t next_prime_u64(uint64_t x);
// n^e as a Big (no overflow check beyond the 512-bit range).
Big big_pow(uint64_t n, unsigned e);

// Prime field F_p with residues kept in [0, p). Moduli below 2^62 take a
// 128-bit fast path; larger ones go through 1024-bit products.
class Field {
  public:
    Field() = default;
    explicit Field(const Big& p);

    const Big& modulus() const { return p_; }
    // Bits of a canonical encoding of one element.
    unsigned bits() const { return bits_; }
    bool contains(const Big& x) const { return x < p_; }

    Big reduce(const Big& x) const;
    Big from_u64(uint64_t x) const { return reduce(Big(x)); }
    Big add(const Big& a, const Big& b) const;
    Big sub(const Big& a, const Big& b) const;
    Big neg(const Big& a) const { return a == 0 ? a : Big(p_ - a); }
    Big mul(const Big& a, const Big& b) const;
    Big pow(Big a, Big e) const;
    Big inv(const Big& a) const;

    bool operator==(const Field& o) const { return p_ == o.p_; }

  private:
    Big p_ = 2;
    unsigned bits_ = 1;
    bool small_ = true;
    uint64_t p64_ = 2;
};

// Field of size >= n^(c+3) where c makes every element < n^c; the
// identity-test field for lists of at most n elements per node.
Field identity_test_field(uint64_t n, const Big& element_bound);
// The c above: smallest c >= 1 with n^c >= element_bound.
unsigned element_exponent(uint64_t n, const Big& element_bound);

} // namespace dip
