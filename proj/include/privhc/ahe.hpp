#pragma once

#include "privhc/prg.hpp"
#include "privhc/types.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <vector>

namespace privhc::ahe {

struct ciphertext {
    mpz_class value;
    std::uint64_t key_id = 0;
};

// Paillier public key with g = N + 1.
class public_key {
public:
    public_key() = default;
    explicit public_key(mpz_class n);

    const mpz_class& n() const { return n_; }
    const mpz_class& n2() const { return n2_; }
    unsigned bits() const { return bits_; }
    std::size_t modulus_bytes() const { return (bits_ + 7) / 8; }
    std::size_t ciphertext_bytes() const { return 2 * modulus_bytes(); }
    std::uint64_t key_id() const { return key_id_; }

    // Builds a fixed-base table for the randomizer h^N, h = -x^2 mod N.
    // Exponents are bits/2 long, so encryption costs about bits/(2 window) multiplications.
    void precompute(unsigned window, prg& rng);
    bool has_table() const { return table_ != nullptr; }

    mpz_class randomizer(prg& rng) const;

private:
    struct fixed_base;
    mpz_class n_, n2_;
    unsigned bits_ = 0;
    std::uint64_t key_id_ = 0;
    std::shared_ptr<const fixed_base> table_;
};

class secret_key {
public:
    secret_key() = default;
    secret_key(const mpz_class& p, const mpz_class& q);

    const mpz_class& p() const { return p_; }
    const mpz_class& q() const { return q_; }
    std::uint64_t key_id() const { return key_id_; }

    mpz_class decrypt(const ciphertext& c) const;
    // Faster path when the plaintext is known to be below 2^bound_bits < p.
    mpz_class decrypt_small(const ciphertext& c, unsigned bound_bits) const;

private:
    mpz_class half(const mpz_class& c, const mpz_class& prime, const mpz_class& prime2, const mpz_class& h) const;
    void check(const ciphertext& c) const;

    mpz_class p_, q_, n_, p2_, q2_, hp_, hq_, p_inv_q_;
    std::uint64_t key_id_ = 0;
};

struct keypair {
    public_key pk;
    secret_key sk;
};

keypair keygen(unsigned bits, prg& rng);

ciphertext encrypt(const public_key& pk, const mpz_class& m, prg& rng);
mpz_class decrypt(const secret_key& sk, const ciphertext& c);

ciphertext add_ct(const public_key& pk, const ciphertext& a, const ciphertext& b);
void add_ct_inplace(const public_key& pk, ciphertext& a, const ciphertext& b);
// Adds a public plaintext without fresh randomness.
ciphertext add_plain(const public_key& pk, const ciphertext& c, const mpz_class& m);
ciphertext scalar_mul(const public_key& pk, const ciphertext& c, const mpz_class& k);
ciphertext rerandomize(const public_key& pk, const ciphertext& c, prg& rng);

// Encryption of 0 with randomness 1; neutral element for add_ct.
ciphertext identity(const public_key& pk);

mpz_class to_mpz(word_t w);
word_t to_word(const mpz_class& m);

// Fixed-width big-endian encodings.
void put_ciphertext(std::vector<std::uint8_t>& out, const public_key& pk, const ciphertext& c);
ciphertext get_ciphertext(const std::uint8_t*& in, const std::uint8_t* end, const public_key& pk);
void put_mpz(std::vector<std::uint8_t>& out, const mpz_class& v, std::size_t width);
mpz_class get_mpz(const std::uint8_t*& in, const std::uint8_t* end, std::size_t width);

// Length-prefixed big-endian key encodings.
std::vector<std::uint8_t> serialize(const public_key& pk);
public_key deserialize_public(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> serialize(const secret_key& sk);
secret_key deserialize_secret(const std::vector<std::uint8_t>& bytes);

} // namespace privhc::ahe
