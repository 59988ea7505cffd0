#include "dip/hashes.hpp"

#include "dip/field.hpp"

#include <stdexcept>

namespace dip {

namespace {

unsigned degree_of(uint64_t p)
{
    return p == 0 ? 0u : 63u - static_cast<unsigned>(__builtin_clzll(p));
}

uint64_t poly_mod(uint64_t a, uint64_t m)
{
    unsigned dm = degree_of(m);
    while (a != 0 && degree_of(a) >= dm) {
        a ^= m << (degree_of(a) - dm);
    }
    return a;
}

} // namespace

bool gf2_irreducible(uint64_t poly)
{
    unsigned d = degree_of(poly);
    if (d == 0) {
        return false;
    }
    // Trial division by every polynomial of degree 1..d/2.
    for (unsigned e = 1; 2 * e <= d; ++e) {
        for (uint64_t q = uint64_t{1} << e; q < (uint64_t{2} << e); ++q) {
            if (poly_mod(poly, q) == 0) {
                return false;
            }
        }
    }
    return true;
}

GF2m::GF2m(unsigned m) : m_(m)
{
    if (m < 1 || m > 32) {
        throw std::invalid_argument("GF(2^m) needs 1 <= m <= 32");
    }
    for (uint64_t low = 1; low < (uint64_t{1} << m); low += 2) {
        uint64_t p = (uint64_t{1} << m) | low;
        if (gf2_irreducible(p)) {
            poly_ = p;
            return;
        }
    }
    throw std::logic_error("no irreducible polynomial found");
}

uint64_t GF2m::mul(uint64_t a, uint64_t b) const
{
    uint64_t r = 0;
    while (b != 0) {
        if (b & 1) {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if (a >> m_) {
            a ^= poly_;
        }
    }
    return r;
}

unsigned local_hash_bits(int n)
{
    return 3 * std::max(1u, ceil_log2(static_cast<uint64_t>(n)));
}

std::vector<uint64_t> row_words(uint64_t row, int n, unsigned m)
{
    std::vector<uint64_t> out;
    for (int at = 0; at < n; at += static_cast<int>(m)) {
        uint64_t mask = m >= 64 ? ~uint64_t{0} : (uint64_t{1} << m) - 1;
        out.push_back((row >> at) & mask);
    }
    return out;
}

uint64_t local_hash(const GF2m& f, const LocalHashSeed& s, const std::vector<uint64_t>& words)
{
    uint64_t acc = s.b;
    uint64_t pw = s.a;
    for (uint64_t x : words) {
        acc ^= f.mul(x, pw);
        pw = f.mul(pw, s.a);
    }
    return acc;
}

std::vector<uint64_t> local_graph_hash(const GF2m& f, const std::vector<LocalHashSeed>& seeds,
                                       const std::vector<uint64_t>& rows, int n)
{
    if (seeds.size() != rows.size()) {
        throw std::invalid_argument("one seed per row");
    }
    std::vector<uint64_t> y(rows.size());
    for (size_t j = 0; j < rows.size(); ++j) {
        y[j] = local_hash(f, seeds[j], row_words(rows[j], n, f.degree()));
    }
    return y;
}

uint64_t word_hash_value(const WordHashSeed& s, const std::vector<uint64_t>& y)
{
    if (y.empty() || y.size() != s.k.size() || y.size() != s.c.size()) {
        throw std::invalid_argument("word hash length mismatch");
    }
    unsigned __int128 v = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        v += s.c[i];
        v += static_cast<unsigned __int128>(s.k[i]) * (y[i] % s.W);
        v %= s.W;
    }
    return static_cast<uint64_t>(v);
}

uint64_t word_hash(const WordHashSeed& s, const std::vector<uint64_t>& y, unsigned ell)
{
    unsigned __int128 v = word_hash_value(s, y);
    return static_cast<uint64_t>((v << ell) / s.W);
}

uint64_t zero_threshold(uint64_t W, unsigned ell)
{
    uint64_t q = uint64_t{1} << ell;
    return (W + q - 1) / q;
}

uint64_t factorial(int n)
{
    uint64_t f = 1;
    for (int i = 2; i <= n; ++i) {
        f *= static_cast<uint64_t>(i);
    }
    return f;
}

unsigned set_size_ell(int n, uint64_t factor)
{
    uint64_t target = factor * factorial(n);
    unsigned ell = 0;
    while ((uint64_t{1} << ell) < target) {
        ++ell;
    }
    return ell;
}

uint64_t word_modulus(unsigned ell)
{
    return next_prime_u64((uint64_t{1} << (ell + 16)) + 1);
}

} // namespace dip
