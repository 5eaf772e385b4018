#include "privhc/aes.hpp"

namespace privhc {

namespace {

template <int Rcon>
block expand_step(block key)
{
    block t = _mm_aeskeygenassist_si128(key, Rcon);
    t = _mm_shuffle_epi32(t, 0xff);
    key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
    key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
    key = _mm_xor_si128(key, _mm_slli_si128(key, 4));
    return _mm_xor_si128(key, t);
}

} // namespace

void aes128::set_key(block key)
{
    rk_[0] = key;
    rk_[1] = expand_step<0x01>(rk_[0]);
    rk_[2] = expand_step<0x02>(rk_[1]);
    rk_[3] = expand_step<0x04>(rk_[2]);
    rk_[4] = expand_step<0x08>(rk_[3]);
    rk_[5] = expand_step<0x10>(rk_[4]);
    rk_[6] = expand_step<0x20>(rk_[5]);
    rk_[7] = expand_step<0x40>(rk_[6]);
    rk_[8] = expand_step<0x80>(rk_[7]);
    rk_[9] = expand_step<0x1b>(rk_[8]);
    rk_[10] = expand_step<0x36>(rk_[9]);
}

void aes128::encrypt_many(block* x, std::size_t n) const
{
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        encrypt_n<8>(x + i);
    for (; i < n; ++i)
        x[i] = encrypt(x[i]);
}

const aes128& fixed_aes()
{
    // digits of pi
    static const aes128 a(make_block(0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL));
    return a;
}

} // namespace privhc
