#include "privhc/gc/ot.hpp"

#include "privhc/codec.hpp"

#include <sodium.h>

#include <cstring>

namespace privhc::gc {

namespace {

constexpr std::size_t point_bytes = crypto_core_ristretto255_BYTES;
constexpr std::size_t scalar_bytes = crypto_core_ristretto255_SCALARBYTES;

void init_sodium()
{
    static const bool ok = sodium_init() >= 0;
    if (!ok)
        throw error("ot: libsodium initialization failed");
}

void random_scalar(prg& rng, std::uint8_t* out)
{
    std::uint8_t wide[crypto_core_ristretto255_NONREDUCEDSCALARBYTES];
    rng.fill(wide, sizeof wide);
    crypto_core_ristretto255_scalar_reduce(out, wide);
}

block key_hash(std::size_t i, const std::uint8_t* point)
{
    std::uint8_t in[8 + point_bytes];
    for (int k = 0; k < 8; ++k)
        in[k] = std::uint8_t(std::uint64_t(i) >> (8 * k));
    std::memcpy(in + 8, point, point_bytes);
    std::uint8_t out[16];
    crypto_generichash(out, sizeof out, in, sizeof in, nullptr, 0);
    return load_block(out);
}

void scalarmult(std::uint8_t* out, const std::uint8_t* scalar, const std::uint8_t* point)
{
    if (crypto_scalarmult_ristretto255(out, scalar, point) != 0)
        throw error("ot: degenerate group element");
}

// Expands column i of the seed matrix into `bytes` bytes at counter ctr.
void expand(const aes128& key, std::uint64_t ctr, std::uint8_t* out, std::size_t bytes)
{
    std::size_t blocks = bytes / 16;
    std::vector<block> buf(blocks);
    for (std::size_t b = 0; b < blocks; ++b)
        buf[b] = make_block(0, ctr + b);
    key.encrypt_many(buf.data(), blocks);
    std::memcpy(out, buf.data(), bytes);
}

inline block row_hash(std::uint64_t j, block x) { return ccr_hash(x, make_block(j, 0x07)); }

std::size_t padded(std::size_t m) { return (m + 127) / 128 * 128; }

} // namespace

void transpose_128(const std::uint8_t* in, std::uint8_t* out, std::size_t m)
{
    const std::size_t row = m / 8;
    for (std::size_t rr = 0; rr < 128; rr += 16) {
        for (std::size_t cc = 0; cc < m; cc += 8) {
            alignas(16) std::uint8_t v[16];
            for (int k = 0; k < 16; ++k)
                v[k] = in[(rr + k) * row + cc / 8];
            block vec = _mm_load_si128(reinterpret_cast<const block*>(v));
            for (int i = 7; i >= 0; --i) {
                std::uint16_t w = std::uint16_t(_mm_movemask_epi8(vec));
                std::memcpy(out + (cc + i) * 16 + rr / 8, &w, 2);
                vec = _mm_slli_epi64(vec, 1);
            }
        }
    }
}

// Base OT: the extension receiver acts as base sender.
void ot_receiver::setup()
{
    init_sodium();
    std::uint8_t a[scalar_bytes], A[point_bytes], aA[point_bytes];
    random_scalar(rng_, a);
    crypto_scalarmult_ristretto255_base(A, a);
    scalarmult(aA, a, A);
    s_.send(net::tag::ot_msg1, std::vector<std::uint8_t>(A, A + point_bytes));

    auto msg = s_.recv(net::tag::ot_msg1);
    if (msg.size() != ot_security * point_bytes)
        throw error("ot: malformed base OT reply");
    column_prg_.resize(ot_security);
    for (std::size_t i = 0; i < ot_security; ++i) {
        const std::uint8_t* B = msg.data() + i * point_bytes;
        std::uint8_t k0[point_bytes], k1[point_bytes];
        scalarmult(k0, a, B);
        crypto_core_ristretto255_sub(k1, k0, aA);
        column_prg_[i][0].set_key(key_hash(i, k0));
        column_prg_[i][1].set_key(key_hash(i, k1));
    }
    ready_ = true;
}

void ot_sender::setup()
{
    init_sodium();
    auto A = s_.recv(net::tag::ot_msg1);
    if (A.size() != point_bytes || !crypto_core_ristretto255_is_valid_point(A.data()))
        throw error("ot: malformed base OT message");
    choice_ = rng_.next_block();
    std::uint8_t sbits[16];
    store_block(sbits, choice_);

    std::vector<std::uint8_t> reply(ot_security * point_bytes);
    column_prg_.resize(ot_security);
    for (std::size_t i = 0; i < ot_security; ++i) {
        std::uint8_t b[scalar_bytes], gb[point_bytes], key[point_bytes];
        random_scalar(rng_, b);
        crypto_scalarmult_ristretto255_base(gb, b);
        std::uint8_t* B = reply.data() + i * point_bytes;
        if ((sbits[i / 8] >> (i % 8)) & 1)
            crypto_core_ristretto255_add(B, A.data(), gb);
        else
            std::memcpy(B, gb, point_bytes);
        scalarmult(key, b, A.data());
        column_prg_[i].set_key(key_hash(i, key));
    }
    s_.send(net::tag::ot_msg1, std::move(reply));
    ready_ = true;
}

std::vector<block> ot_receiver::receive(const std::vector<bool>& choices)
{
    if (!ready_)
        setup();
    const std::size_t m = padded(choices.size());
    const std::size_t row = m / 8;
    std::vector<std::uint8_t> r(row, 0);
    for (std::size_t j = 0; j < choices.size(); ++j)
        if (choices[j])
            r[j / 8] |= std::uint8_t(1u << (j % 8));

    std::vector<std::uint8_t> t(ot_security * row), g1(row);
    writer u;
    u.u64(choices.size());
    u.buf.reserve(8 + ot_security * row);
    for (std::size_t i = 0; i < ot_security; ++i) {
        std::uint8_t* ti = t.data() + i * row;
        expand(column_prg_[i][0], ctr_, ti, row);
        expand(column_prg_[i][1], ctr_, g1.data(), row);
        for (std::size_t k = 0; k < row; ++k)
            g1[k] ^= ti[k] ^ r[k];
        u.bytes(g1.data(), row);
    }
    ctr_ += row / 16;
    s_.send(net::tag::ot_msg2, std::move(u.buf));

    std::vector<std::uint8_t> tt(m * 16);
    transpose_128(t.data(), tt.data(), m);

    auto y = s_.recv(net::tag::ot_msg3);
    if (y.size() != choices.size() * 32)
        throw error("ot: malformed extension reply");
    std::vector<block> out(choices.size());
    for (std::size_t j = 0; j < choices.size(); ++j) {
        block h = row_hash(ot_index_ + j, load_block(tt.data() + j * 16));
        out[j] = _mm_xor_si128(load_block(y.data() + j * 32 + (choices[j] ? 16 : 0)), h);
    }
    ot_index_ += choices.size();
    return out;
}

void ot_sender::send(const std::vector<std::array<block, 2>>& pairs)
{
    if (!ready_)
        setup();
    auto msg = s_.recv(net::tag::ot_msg2);
    reader in(msg);
    if (in.u64() != pairs.size())
        throw error("ot: batch size mismatch");
    const std::size_t m = padded(pairs.size());
    const std::size_t row = m / 8;
    if (in.remaining() != ot_security * row)
        throw error("ot: malformed extension matrix");
    std::uint8_t sbits[16];
    store_block(sbits, choice_);

    std::vector<std::uint8_t> q(ot_security * row);
    for (std::size_t i = 0; i < ot_security; ++i) {
        std::uint8_t* qi = q.data() + i * row;
        expand(column_prg_[i], ctr_, qi, row);
        const std::uint8_t* ui = in.take(row);
        if ((sbits[i / 8] >> (i % 8)) & 1)
            for (std::size_t k = 0; k < row; ++k)
                qi[k] ^= ui[k];
    }
    ctr_ += row / 16;

    std::vector<std::uint8_t> qt(m * 16);
    transpose_128(q.data(), qt.data(), m);

    std::vector<std::uint8_t> y(pairs.size() * 32);
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        block qj = load_block(qt.data() + j * 16);
        block h0 = row_hash(ot_index_ + j, qj);
        block h1 = row_hash(ot_index_ + j, _mm_xor_si128(qj, choice_));
        store_block(y.data() + j * 32, _mm_xor_si128(pairs[j][0], h0));
        store_block(y.data() + j * 32 + 16, _mm_xor_si128(pairs[j][1], h1));
    }
    ot_index_ += pairs.size();
    s_.send(net::tag::ot_msg3, std::move(y));
}

} // namespace privhc::gc
