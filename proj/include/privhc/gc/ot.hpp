#pragma once

#include "privhc/aes.hpp"
#include "privhc/net.hpp"
#include "privhc/prg.hpp"

#include <array>
#include <vector>

namespace privhc::gc {

constexpr std::size_t ot_security = 128;

// 1-out-of-2 OT of 128-bit strings. Base OTs (Chou-Orlandi over
// ristretto255) run once per session with roles reversed, then every batch
// is served by IKNP extension. The label sender is the garbler.
class ot_sender {
public:
    ot_sender(net::session& s, prg& rng) : s_(s), rng_(rng) {}
    void send(const std::vector<std::array<block, 2>>& pairs);

private:
    void setup();

    net::session& s_;
    prg& rng_;
    bool ready_ = false;
    block choice_{};                 // s
    std::vector<aes128> column_prg_; // keyed by k_{s_i}
    std::uint64_t ctr_ = 0;
    std::uint64_t ot_index_ = 0;
};

class ot_receiver {
public:
    ot_receiver(net::session& s, prg& rng) : s_(s), rng_(rng) {}
    std::vector<block> receive(const std::vector<bool>& choices);

private:
    void setup();

    net::session& s_;
    prg& rng_;
    bool ready_ = false;
    std::vector<std::array<aes128, 2>> column_prg_;
    std::uint64_t ctr_ = 0;
    std::uint64_t ot_index_ = 0;
};

// Transposes a 128 x m bit matrix (rows of m/8 bytes, LSB-first) into m
// rows of 16 bytes. m must be a multiple of 8.
void transpose_128(const std::uint8_t* in, std::uint8_t* out, std::size_t m);

} // namespace privhc::gc
