#pragma once

#include "dip/bigint.hpp"
#include "dip/bits.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace dip {

uint64_t mix64(uint64_t x);
// Seed of trial i under a master seed; also used for per-node streams.
uint64_t derive_seed(uint64_t master, uint64_t index);

// A node's private random tape. Every bit a node reveals must come out of
// emit(), which records the tape interval so a replay can check it.
class RandomTape {
  public:
    RandomTape(uint64_t seed, uint64_t node);
    // A tape whose contents are the concatenation source(0), source(1), ...
    explicit RandomTape(std::function<Bits(uint64_t block)> source);

    // Reads k fresh bits without revealing them.
    Bits read(size_t k);
    // Marks [pos, pos+len) as revealed.
    void mark_emitted(size_t pos, size_t len) { emitted_.emplace_back(pos, len); }
    // Reads and reveals k bits.
    Bits take(size_t k);
    // Uniform value in [0, m) by rejection on width_for(m)-bit draws; the
    // accepted draw is revealed verbatim and returned as bits too.
    Big uniform(const Big& m, Bits* revealed);
    uint64_t uniform_u64(uint64_t m, Bits* revealed);

    size_t position() const { return pos_; }
    const std::vector<std::pair<size_t, size_t>>& emitted() const { return emitted_; }
    // Tape contents in [pos, pos+len), regenerating as needed.
    Bits at(size_t pos, size_t len);

  private:
    void ensure(size_t upto);

    std::mt19937_64 gen_;
    std::function<Bits(uint64_t)> source_;
    uint64_t block_ = 0;
    std::vector<bool> buf_;
    size_t pos_ = 0;
    std::vector<std::pair<size_t, size_t>> emitted_;
};

// Deterministic generator for provers, generators and harness code.
std::mt19937_64 make_rng(uint64_t seed, uint64_t stream = 0);

} // namespace dip
