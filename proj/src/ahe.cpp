#include "privhc/ahe.hpp"

#include <cstring>

namespace privhc::ahe {

namespace {

std::uint64_t id_of(const mpz_class& n)
{
    std::vector<std::uint8_t> bytes;
    put_mpz(bytes, n, (mpz_sizeinbase(n.get_mpz_t(), 2) + 7) / 8);
    return fnv1a64(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

mpz_class random_bits(prg& rng, unsigned bits)
{
    std::vector<std::uint8_t> buf((bits + 7) / 8);
    rng.fill(buf.data(), buf.size());
    if (bits % 8)
        buf[0] &= std::uint8_t((1u << (bits % 8)) - 1);
    mpz_class r;
    mpz_import(r.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
    return r;
}

mpz_class random_prime(prg& rng, unsigned bits)
{
    mpz_class x = random_bits(rng, bits);
    mpz_setbit(x.get_mpz_t(), bits - 1);
    mpz_setbit(x.get_mpz_t(), bits - 2);
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), x.get_mpz_t());
    return p;
}

} // namespace

struct public_key::fixed_base {
    unsigned window = 0;
    unsigned exp_bits = 0;
    std::vector<mpz_class> t; // t[i * 2^w + v] = h^(v * 2^(w i))
};

public_key::public_key(mpz_class n) : n_(std::move(n))
{
    n2_ = n_ * n_;
    bits_ = unsigned(mpz_sizeinbase(n_.get_mpz_t(), 2));
    key_id_ = id_of(n_);
}

void public_key::precompute(unsigned window, prg& rng)
{
    auto fb = std::make_shared<fixed_base>();
    fb->window = window;
    fb->exp_bits = (bits_ + 1) / 2;
    mpz_class x = random_bits(rng, bits_ - 1) + 2;
    mpz_class h = n_ - (x * x) % n_;
    mpz_powm(h.get_mpz_t(), h.get_mpz_t(), n_.get_mpz_t(), n2_.get_mpz_t());

    const unsigned windows = (fb->exp_bits + window - 1) / window;
    const std::size_t width = std::size_t(1) << window;
    fb->t.resize(windows * width);
    mpz_class base = h;
    for (unsigned i = 0; i < windows; ++i) {
        mpz_class* row = &fb->t[i * width];
        row[0] = 1;
        for (std::size_t v = 1; v < width; ++v)
            row[v] = (row[v - 1] * base) % n2_;
        base = (row[width - 1] * base) % n2_;
    }
    table_ = std::move(fb);
}

mpz_class public_key::randomizer(prg& rng) const
{
    if (table_) {
        const auto& fb = *table_;
        const unsigned windows = (fb.exp_bits + fb.window - 1) / fb.window;
        const std::size_t width = std::size_t(1) << fb.window;
        mpz_class a = random_bits(rng, fb.exp_bits);
        mpz_class acc = 1;
        bool first = true;
        for (unsigned i = 0; i < windows; ++i) {
            unsigned long digit = 0;
            for (unsigned b = 0; b < fb.window; ++b)
                if (mpz_tstbit(a.get_mpz_t(), i * fb.window + b))
                    digit |= 1ul << b;
            if (digit == 0)
                continue;
            if (first) {
                acc = fb.t[i * width + digit];
                first = false;
            } else {
                mpz_mul(acc.get_mpz_t(), acc.get_mpz_t(), fb.t[i * width + digit].get_mpz_t());
                mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), n2_.get_mpz_t());
            }
        }
        return acc;
    }
    mpz_class r;
    do {
        r = random_bits(rng, bits_) % n_;
    } while (r == 0 || gcd(r, n_) != 1);
    mpz_powm(r.get_mpz_t(), r.get_mpz_t(), n_.get_mpz_t(), n2_.get_mpz_t());
    return r;
}

secret_key::secret_key(const mpz_class& p, const mpz_class& q) : p_(p), q_(q)
{
    n_ = p * q;
    p2_ = p * p;
    q2_ = q * q;
    // with g = N + 1, L_p(g^(p-1) mod p^2) = -q mod p
    mpz_class t = p - q % p;
    mpz_invert(hp_.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
    t = q - p % q;
    mpz_invert(hq_.get_mpz_t(), t.get_mpz_t(), q.get_mpz_t());
    mpz_invert(p_inv_q_.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    key_id_ = id_of(n_);
}

void secret_key::check(const ciphertext& c) const
{
    if (c.key_id != key_id_)
        throw error("ahe: ciphertext under a different key");
}

mpz_class secret_key::half(const mpz_class& c, const mpz_class& prime, const mpz_class& prime2,
                           const mpz_class& h) const
{
    mpz_class x = c % prime2;
    mpz_class e = prime - 1;
    mpz_powm(x.get_mpz_t(), x.get_mpz_t(), e.get_mpz_t(), prime2.get_mpz_t());
    x = (x - 1) / prime;
    return (x * h) % prime;
}

mpz_class secret_key::decrypt(const ciphertext& c) const
{
    check(c);
    mpz_class mp = half(c.value, p_, p2_, hp_);
    mpz_class mq = half(c.value, q_, q2_, hq_);
    // CRT: m = mp + p * ((mq - mp) * p^-1 mod q)
    mpz_class u = ((mq - mp) * p_inv_q_) % q_;
    if (u < 0)
        u += q_;
    return mp + p_ * u;
}

mpz_class secret_key::decrypt_small(const ciphertext& c, unsigned bound_bits) const
{
    if (bound_bits + 1 >= mpz_sizeinbase(p_.get_mpz_t(), 2))
        return decrypt(c);
    check(c);
    return half(c.value, p_, p2_, hp_);
}

keypair keygen(unsigned bits, prg& rng)
{
    if (bits != 512 && bits != 1024 && bits != 2048)
        throw error("keygen: unsupported modulus size");
    for (int attempt = 0; attempt < 64; ++attempt) {
        mpz_class p = random_prime(rng, bits / 2);
        mpz_class q = random_prime(rng, bits / 2);
        if (p == q)
            continue;
        mpz_class n = p * q;
        if (mpz_sizeinbase(n.get_mpz_t(), 2) != bits)
            continue;
        if (gcd(n, (p - 1) * (q - 1)) != 1)
            continue;
        if (p > q)
            std::swap(p, q);
        return {public_key(n), secret_key(p, q)};
    }
    throw error("keygen: prime generation failed");
}

ciphertext encrypt(const public_key& pk, const mpz_class& m, prg& rng)
{
    if (m < 0 || m >= pk.n())
        throw error("ahe: plaintext out of range");
    ciphertext c;
    c.key_id = pk.key_id();
    c.value = pk.randomizer(rng);
    mpz_class gm = m * pk.n() + 1;
    mpz_mul(c.value.get_mpz_t(), c.value.get_mpz_t(), gm.get_mpz_t());
    mpz_mod(c.value.get_mpz_t(), c.value.get_mpz_t(), pk.n2().get_mpz_t());
    return c;
}

mpz_class decrypt(const secret_key& sk, const ciphertext& c) { return sk.decrypt(c); }

static void same_key(const public_key& pk, const ciphertext& c)
{
    if (c.key_id != pk.key_id())
        throw error("ahe: key mismatch");
}

ciphertext add_ct(const public_key& pk, const ciphertext& a, const ciphertext& b)
{
    ciphertext r = a;
    add_ct_inplace(pk, r, b);
    return r;
}

void add_ct_inplace(const public_key& pk, ciphertext& a, const ciphertext& b)
{
    same_key(pk, a);
    same_key(pk, b);
    mpz_mul(a.value.get_mpz_t(), a.value.get_mpz_t(), b.value.get_mpz_t());
    mpz_mod(a.value.get_mpz_t(), a.value.get_mpz_t(), pk.n2().get_mpz_t());
}

ciphertext add_plain(const public_key& pk, const ciphertext& c, const mpz_class& m)
{
    same_key(pk, c);
    mpz_class mm = m % pk.n();
    if (mm < 0)
        mm += pk.n();
    ciphertext r;
    r.key_id = c.key_id;
    r.value = mm * pk.n() + 1;
    mpz_mul(r.value.get_mpz_t(), r.value.get_mpz_t(), c.value.get_mpz_t());
    mpz_mod(r.value.get_mpz_t(), r.value.get_mpz_t(), pk.n2().get_mpz_t());
    return r;
}

ciphertext scalar_mul(const public_key& pk, const ciphertext& c, const mpz_class& k)
{
    same_key(pk, c);
    if (k < 0 || k >= pk.n())
        throw error("ahe: scalar out of range");
    ciphertext r;
    r.key_id = c.key_id;
    mpz_powm(r.value.get_mpz_t(), c.value.get_mpz_t(), k.get_mpz_t(), pk.n2().get_mpz_t());
    return r;
}

ciphertext rerandomize(const public_key& pk, const ciphertext& c, prg& rng)
{
    same_key(pk, c);
    ciphertext r = c;
    mpz_class z = pk.randomizer(rng);
    mpz_mul(r.value.get_mpz_t(), r.value.get_mpz_t(), z.get_mpz_t());
    mpz_mod(r.value.get_mpz_t(), r.value.get_mpz_t(), pk.n2().get_mpz_t());
    return r;
}

ciphertext identity(const public_key& pk)
{
    ciphertext c;
    c.key_id = pk.key_id();
    c.value = 1;
    return c;
}

mpz_class to_mpz(word_t w)
{
    std::uint64_t parts[2] = {std::uint64_t(w), std::uint64_t(w >> 64)};
    mpz_class r;
    mpz_import(r.get_mpz_t(), 2, -1, sizeof(std::uint64_t), 0, 0, parts);
    return r;
}

word_t to_word(const mpz_class& m)
{
    if (m < 0 || mpz_sizeinbase(m.get_mpz_t(), 2) > 128)
        throw error("ahe: value exceeds 128 bits");
    std::uint64_t parts[2] = {0, 0};
    std::size_t count = 0;
    mpz_export(parts, &count, -1, sizeof(std::uint64_t), 0, 0, m.get_mpz_t());
    return (word_t(parts[1]) << 64) | parts[0];
}

void put_mpz(std::vector<std::uint8_t>& out, const mpz_class& v, std::size_t width)
{
    if (v < 0 || (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8 > width)
        throw error("ahe: value does not fit encoding width");
    std::size_t at = out.size();
    out.resize(at + width, 0);
    if (v == 0)
        return;
    std::size_t count = 0;
    std::size_t len = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    mpz_export(out.data() + at + width - len, &count, 1, 1, 1, 0, v.get_mpz_t());
}

mpz_class get_mpz(const std::uint8_t*& in, const std::uint8_t* end, std::size_t width)
{
    if (std::size_t(end - in) < width)
        throw error("ahe: truncated integer");
    mpz_class v;
    mpz_import(v.get_mpz_t(), width, 1, 1, 1, 0, in);
    in += width;
    return v;
}

void put_ciphertext(std::vector<std::uint8_t>& out, const public_key& pk, const ciphertext& c)
{
    same_key(pk, c);
    put_mpz(out, c.value, pk.ciphertext_bytes());
}

ciphertext get_ciphertext(const std::uint8_t*& in, const std::uint8_t* end, const public_key& pk)
{
    ciphertext c;
    c.value = get_mpz(in, end, pk.ciphertext_bytes());
    if (c.value >= pk.n2())
        throw error("ahe: ciphertext out of range");
    c.key_id = pk.key_id();
    return c;
}

namespace {

void put_prefixed(std::vector<std::uint8_t>& out, const mpz_class& v)
{
    std::uint32_t len = std::uint32_t((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
    for (int s = 24; s >= 0; s -= 8)
        out.push_back(std::uint8_t(len >> s));
    put_mpz(out, v, len);
}

mpz_class get_prefixed(const std::uint8_t*& in, const std::uint8_t* end)
{
    if (end - in < 4)
        throw error("ahe: truncated key");
    std::uint32_t len = 0;
    for (int k = 0; k < 4; ++k)
        len = (len << 8) | *in++;
    return get_mpz(in, end, len);
}

} // namespace

std::vector<std::uint8_t> serialize(const public_key& pk)
{
    std::vector<std::uint8_t> out;
    put_prefixed(out, pk.n());
    return out;
}

public_key deserialize_public(const std::vector<std::uint8_t>& bytes)
{
    const std::uint8_t* in = bytes.data();
    mpz_class n = get_prefixed(in, bytes.data() + bytes.size());
    if (in != bytes.data() + bytes.size() || n < 3)
        throw error("ahe: malformed public key");
    return public_key(n);
}

std::vector<std::uint8_t> serialize(const secret_key& sk)
{
    std::vector<std::uint8_t> out;
    put_prefixed(out, sk.p());
    put_prefixed(out, sk.q());
    return out;
}

secret_key deserialize_secret(const std::vector<std::uint8_t>& bytes)
{
    const std::uint8_t* in = bytes.data();
    const std::uint8_t* end = bytes.data() + bytes.size();
    mpz_class p = get_prefixed(in, end);
    mpz_class q = get_prefixed(in, end);
    if (in != end)
        throw error("ahe: malformed secret key");
    return secret_key(p, q);
}

} // namespace privhc::ahe
