#pragma once

#include <immintrin.h>
#include <wmmintrin.h>

#include <cstdint>
#include <cstring>

namespace privhc {

using block = __m128i;

inline block make_block(std::uint64_t hi, std::uint64_t lo) { return _mm_set_epi64x(hi, lo); }
inline block zero_block() { return _mm_setzero_si128(); }
inline bool lsb(block b) { return (_mm_cvtsi128_si64(b) & 1) != 0; }
inline bool block_eq(block a, block b)
{
    return _mm_movemask_epi8(_mm_cmpeq_epi8(a, b)) == 0xffff;
}
inline block load_block(const std::uint8_t* p) { return _mm_loadu_si128(reinterpret_cast<const block*>(p)); }
inline void store_block(std::uint8_t* p, block b) { _mm_storeu_si128(reinterpret_cast<block*>(p), b); }
inline std::uint64_t block_lo(block b) { return static_cast<std::uint64_t>(_mm_cvtsi128_si64(b)); }
inline std::uint64_t block_hi(block b) { return static_cast<std::uint64_t>(_mm_extract_epi64(b, 1)); }

// Linear orthomorphism (x_hi ^ x_lo, x_hi).
inline block sigma(block x)
{
    return _mm_xor_si128(_mm_shuffle_epi32(x, 0x4e), _mm_and_si128(x, _mm_set_epi64x(-1, 0)));
}

class aes128 {
public:
    aes128() = default;
    explicit aes128(block key) { set_key(key); }

    void set_key(block key);

    block encrypt(block in) const
    {
        block x = _mm_xor_si128(in, rk_[0]);
        for (int r = 1; r < 10; ++r)
            x = _mm_aesenc_si128(x, rk_[r]);
        return _mm_aesenclast_si128(x, rk_[10]);
    }

    template <int N>
    void encrypt_n(block* x) const
    {
        for (int i = 0; i < N; ++i)
            x[i] = _mm_xor_si128(x[i], rk_[0]);
        for (int r = 1; r < 10; ++r)
            for (int i = 0; i < N; ++i)
                x[i] = _mm_aesenc_si128(x[i], rk_[r]);
        for (int i = 0; i < N; ++i)
            x[i] = _mm_aesenclast_si128(x[i], rk_[10]);
    }

    void encrypt_many(block* x, std::size_t n) const;

private:
    block rk_[11];
};

// Process-wide fixed-key permutation used by the correlation-robust hashes.
const aes128& fixed_aes();

// H(x, t) = pi(sigma(x) ^ t) ^ sigma(x) ^ t
inline block ccr_hash(block x, block tweak)
{
    block s = _mm_xor_si128(sigma(x), tweak);
    return _mm_xor_si128(fixed_aes().encrypt(s), s);
}

} // namespace privhc
