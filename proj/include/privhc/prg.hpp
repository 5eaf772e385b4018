#pragma once

#include "privhc/aes.hpp"
#include "privhc/types.hpp"

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace privhc {

// AES-128 in counter mode. Satisfies UniformRandomBitGenerator.
class prg {
public:
    using result_type = std::uint64_t;

    explicit prg(block key);

    static prg from_seed(std::uint64_t seed, std::string_view stream = {});
    static prg from_entropy();

    // Independent child stream; consumes one block of this generator.
    prg derive(std::string_view stream);

    block next_block();
    void fill(std::uint8_t* out, std::size_t n);
    std::uint64_t next_u64();
    word_t bits(unsigned nbits);
    std::uint64_t below(std::uint64_t bound);
    double uniform01();

    result_type operator()() { return next_u64(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    void refill();

    aes128 aes_;
    std::uint64_t counter_ = 0;
    block buf_[8];
    unsigned pos_ = 8;
};

std::uint64_t fnv1a64(std::string_view s);

// Seeded Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, prg& rng);

} // namespace privhc
