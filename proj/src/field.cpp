#include "dip/field.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

namespace dip {

namespace {

uint64_t mulmod64(uint64_t a, uint64_t b, uint64_t m)
{
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod64(uint64_t a, uint64_t e, uint64_t m)
{
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) {
            r = mulmod64(r, a, m);
        }
        a = mulmod64(a, a, m);
        e >>= 1;
    }
    return r;
}

} // namespace

bool is_prime_u64(uint64_t n)
{
    if (n < 2) {
        return false;
    }
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) {
            return n == p;
        }
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // This base set is deterministic for all 64-bit n.
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod64(a, d, n);
        if (x == 1 || x == n - 1) {
            continue;
        }
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod64(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) {
            return false;
        }
    }
    return true;
}

bool is_prime(const Big& x)
{
    if (x <= Big(UINT64_MAX)) {
        return is_prime_u64(static_cast<uint64_t>(x));
    }
    std::mt19937_64 gen(0x5eedULL);
    return boost::multiprecision::miller_rabin_test(x, 40, gen);
}

uint64_t next_prime_u64(uint64_t x)
{
    if (x <= 2) {
        return 2;
    }
    uint64_t c = x | 1u;
    while (!is_prime_u64(c)) {
        c += 2;
    }
    return c;
}

Big next_prime(const Big& x)
{
    if (x <= Big(UINT64_MAX / 2)) {
        return Big(next_prime_u64(static_cast<uint64_t>(x)));
    }
    static std::mutex mu;
    static std::map<Big, Big> memo;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(x);
        if (it != memo.end()) {
            return it->second;
        }
    }
    if (bit_length(x) > 500) {
        throw std::invalid_argument("field modulus above 2^500");
    }
    Big c = x | 1u;
    while (!is_prime(c)) {
        c += 2;
    }
    std::lock_guard<std::mutex> lock(mu);
    memo[x] = c;
    return c;
}

Big big_pow(uint64_t n, unsigned e)
{
    Big r = 1;
    for (unsigned i = 0; i < e; ++i) {
        r *= n;
    }
    return r;
}

Field::Field(const Big& p)
    : p_(p)
{
    if (p < 2) {
        throw std::invalid_argument("field modulus must be >= 2");
    }
    bits_ = width_for(p);
    small_ = bit_length(p) <= 62;
    p64_ = small_ ? static_cast<uint64_t>(p) : 0;
}

Big Field::reduce(const Big& x) const
{
    return x < p_ ? x : Big(x % p_);
}

Big Field::add(const Big& a, const Big& b) const
{
    Big r = a + b;
    if (r >= p_) {
        r -= p_;
    }
    return r;
}

Big Field::sub(const Big& a, const Big& b) const
{
    return a >= b ? Big(a - b) : Big(p_ - (b - a));
}

Big Field::mul(const Big& a, const Big& b) const
{
    if (small_) {
        return Big(mulmod64(static_cast<uint64_t>(a), static_cast<uint64_t>(b), p64_));
    }
    Big2 r = Big2(a) * Big2(b);
    r %= Big2(p_);
    return static_cast<Big>(r);
}

Big Field::pow(Big a, Big e) const
{
    Big r = reduce(Big(1));
    a = reduce(a);
    while (e != 0) {
        if (boost::multiprecision::bit_test(e, 0)) {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Big Field::inv(const Big& a) const
{
    if (a == 0) {
        throw std::domain_error("inverse of zero");
    }
    return pow(a, p_ - 2);
}

unsigned element_exponent(uint64_t n, const Big& element_bound)
{
    uint64_t base = n < 2 ? 2 : n;
    unsigned c = 1;
    Big acc = base;
    while (acc < element_bound) {
        acc *= base;
        ++c;
    }
    return c;
}

Field identity_test_field(uint64_t n, const Big& element_bound)
{
    uint64_t base = n < 2 ? 2 : n;
    unsigned c = element_exponent(base, element_bound);
    return Field(next_prime(big_pow(base, c + 3)));
}

} // namespace dip
