#include "dip/rng.hpp"

#include <stdexcept>

namespace dip {

uint64_t mix64(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t master, uint64_t index)
{
    return mix64(mix64(master) ^ mix64(index + 0x1234567ULL));
}

RandomTape::RandomTape(uint64_t seed, uint64_t node)
    : gen_(derive_seed(seed, node ^ 0xa5a5a5a5ULL))
{
}

RandomTape::RandomTape(std::function<Bits(uint64_t block)> source)
    : source_(std::move(source))
{
}

void RandomTape::ensure(size_t upto)
{
    while (source_ && buf_.size() < upto) {
        Bits b = source_(block_++);
        if (b.empty()) {
            throw std::logic_error("tape source returned an empty block");
        }
        for (size_t i = 0; i < b.size(); ++i) {
            buf_.push_back(b[i]);
        }
    }
    while (buf_.size() < upto) {
        uint64_t w = gen_();
        for (int i = 0; i < 64; ++i) {
            buf_.push_back((w >> i) & 1u);
        }
    }
}

Bits RandomTape::at(size_t pos, size_t len)
{
    ensure(pos + len);
    Bits b;
    for (size_t i = 0; i < len; ++i) {
        b.push_back(buf_[pos + i]);
    }
    return b;
}

Bits RandomTape::read(size_t k)
{
    Bits b = at(pos_, k);
    pos_ += k;
    return b;
}

Bits RandomTape::take(size_t k)
{
    size_t p = pos_;
    Bits b = read(k);
    mark_emitted(p, k);
    return b;
}

Big RandomTape::uniform(const Big& m, Bits* revealed)
{
    unsigned w = width_for(m);
    while (true) {
        size_t p = pos_;
        Bits b = read(w);
        BitReader r(b);
        Big v = r.get_big(w);
        if (v < m) {
            mark_emitted(p, w);
            if (revealed) {
                *revealed = b;
            }
            return v;
        }
    }
}

uint64_t RandomTape::uniform_u64(uint64_t m, Bits* revealed)
{
    return static_cast<uint64_t>(uniform(Big(m), revealed));
}

std::mt19937_64 make_rng(uint64_t seed, uint64_t stream)
{
    return std::mt19937_64(derive_seed(seed, stream ^ 0x51ed5eedULL));
}

} // namespace dip
