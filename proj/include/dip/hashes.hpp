#pragma once

#include <cstdint>
#include <vector>

namespace dip {

// GF(2^m) for 1 <= m <= 32, modulo the lexicographically first irreducible
// polynomial of degree m.
class GF2m {
  public:
    GF2m() = default;
    explicit GF2m(unsigned m);

    unsigned degree() const { return m_; }
    uint64_t size() const { return uint64_t{1} << m_; }
    uint64_t poly() const { return poly_; }
    uint64_t add(uint64_t a, uint64_t b) const { return a ^ b; }
    uint64_t mul(uint64_t a, uint64_t b) const;

  private:
    unsigned m_ = 1;
    uint64_t poly_ = 0b11;
};

bool gf2_irreducible(uint64_t poly);

// Output width of the per-node hash: 3 * ceil(log2 n).
unsigned local_hash_bits(int n);

// h_{a,b}(x_1..x_d) = b + sum_i x_i a^i over GF(2^m); a row of n bits is
// cut into d = ceil(n/m) words, low bits first. Collision probability of
// two distinct rows is at most d / 2^m.
struct LocalHashSeed {
    uint64_t a = 0;
    uint64_t b = 0;
};

std::vector<uint64_t> row_words(uint64_t row, int n, unsigned m);
uint64_t local_hash(const GF2m& f, const LocalHashSeed& s, const std::vector<uint64_t>& words);

// y_j = h_j(row j) for every position j, with h_j keyed by seeds[j].
std::vector<uint64_t> local_graph_hash(const GF2m& f, const std::vector<LocalHashSeed>& seeds,
                                       const std::vector<uint64_t>& rows, int n);

// g_K(y) = floor(v * 2^ell / W) with v = sum_i c_i + sum_i k_i y_i mod W and
// W prime; each node i contributes (k_i, c_i). Pairwise independent over K,
// so Pr[g_K(y) = 0] = ceil(W / 2^ell) / W.
struct WordHashSeed {
    uint64_t W = 2;
    std::vector<uint64_t> k;
    std::vector<uint64_t> c;
};

uint64_t word_hash_value(const WordHashSeed& s, const std::vector<uint64_t>& y);
uint64_t word_hash(const WordHashSeed& s, const std::vector<uint64_t>& y, unsigned ell);
// v < zero_threshold(W, ell) iff g_K(y) = 0.
uint64_t zero_threshold(uint64_t W, unsigned ell);

// Smallest ell with 2^ell >= factor * n!.
unsigned set_size_ell(int n, uint64_t factor);
// First prime above 2^(ell + 16).
uint64_t word_modulus(unsigned ell);

uint64_t factorial(int n);

} // namespace dip
