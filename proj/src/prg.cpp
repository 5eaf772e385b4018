#include "privhc/prg.hpp"

#include <random>

namespace privhc {

std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

prg::prg(block key) : aes_(key) {}

prg prg::from_seed(std::uint64_t seed, std::string_view stream)
{
    return prg(make_block(fnv1a64(stream), seed));
}

prg prg::from_entropy()
{
    std::random_device rd;
    std::uint64_t w[2];
    for (auto& x : w)
        x = (std::uint64_t(rd()) << 32) ^ rd();
    return prg(make_block(w[0], w[1]));
}

prg prg::derive(std::string_view stream)
{
    block k = _mm_xor_si128(next_block(), make_block(fnv1a64(stream), 0x5eedULL));
    return prg(k);
}

void prg::refill()
{
    for (auto& b : buf_)
        b = make_block(0, counter_++);
    aes_.encrypt_n<8>(buf_);
    pos_ = 0;
}

block prg::next_block()
{
    if (pos_ == 8)
        refill();
    return buf_[pos_++];
}

void prg::fill(std::uint8_t* out, std::size_t n)
{
    while (n >= 16) {
        store_block(out, next_block());
        out += 16;
        n -= 16;
    }
    if (n) {
        std::uint8_t tmp[16];
        store_block(tmp, next_block());
        std::memcpy(out, tmp, n);
    }
}

std::uint64_t prg::next_u64() { return block_lo(next_block()); }

word_t prg::bits(unsigned nbits)
{
    block b = next_block();
    word_t w = (word_t(block_hi(b)) << 64) | block_lo(b);
    return w & word_mask(nbits);
}

std::uint64_t prg::below(std::uint64_t bound)
{
    if (bound <= 1)
        return 0;
    // reject the low 2^64 mod bound values so the rest split evenly
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint64_t x = next_u64();
        if (x >= threshold)
            return x % bound;
    }
}

double prg::uniform01()
{
    return double(next_u64() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> random_permutation(std::size_t n, prg& rng)
{
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i)
        p[i] = i;
    for (std::size_t i = n; i > 1; --i)
        std::swap(p[i - 1], p[rng.below(i)]);
    return p;
}

} // namespace privhc
