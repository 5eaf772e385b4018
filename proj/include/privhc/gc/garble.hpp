#pragma once

#include "privhc/aes.hpp"
#include "privhc/gc/circuit.hpp"
#include "privhc/prg.hpp"

#include <functional>
#include <vector>

namespace privhc::gc {

constexpr std::size_t label_bytes = 16;
constexpr std::size_t pad_bytes = 5; // 40 zero bits for verifiable range
constexpr std::size_t row_bytes = label_bytes + pad_bytes;
constexpr std::size_t table_bytes = 4 * row_bytes;
constexpr std::size_t decode_bytes = 16;

// Destination for garbled material; may flush between reserve() calls.
class byte_sink {
public:
    virtual ~byte_sink() = default;
    virtual std::uint8_t* reserve(std::size_t n) = 0;
};

class byte_source {
public:
    virtual ~byte_source() = default;
    virtual const std::uint8_t* take(std::size_t n) = 0;
};

class vector_sink final : public byte_sink {
public:
    std::vector<std::uint8_t> bytes;
    std::uint8_t* reserve(std::size_t n) override
    {
        bytes.resize(bytes.size() + n);
        return bytes.data() + bytes.size() - n;
    }
};

class vector_source final : public byte_source {
public:
    explicit vector_source(const std::vector<std::uint8_t>& b) : b_(b) {}
    const std::uint8_t* take(std::size_t n) override
    {
        if (b_.size() - pos_ < n)
            throw error("gc: truncated garbled circuit");
        pos_ += n;
        return b_.data() + pos_ - n;
    }

private:
    const std::vector<std::uint8_t>& b_;
    std::size_t pos_ = 0;
};

std::size_t garbled_size(const bool_circuit& c);
std::size_t decode_entries(const bool_circuit& c);

// Garbles one instance. input_zero holds the 0-labels of all input wires;
// delta has lsb 1 and the 1-label of every wire is its 0-label ^ delta.
// gate_base offsets the per-gate hash tweaks so instances never share one.
void garble(const bool_circuit& c, block delta, const block* input_zero, prg& rng, byte_sink& out,
            std::vector<block>& scratch, std::uint64_t gate_base = 0);

// Evaluates one instance from active input labels; returns output bits.
std::vector<bool> evaluate(const bool_circuit& c, const block* input_labels, byte_source& in,
                           std::vector<block>& scratch, std::uint64_t gate_base = 0);

block random_delta(prg& rng);

// Convenience form holding everything in memory.
struct garbled_circuit {
    std::vector<std::uint8_t> bytes;
    block delta{};
    std::vector<block> input_zero;
};

garbled_circuit garble(const bool_circuit& c, prg& rng);
std::vector<block> select_labels(const garbled_circuit& g, const std::vector<bool>& input_bits);
std::vector<bool> evaluate(const bool_circuit& c, const garbled_circuit& g, const std::vector<block>& input_labels);

} // namespace privhc::gc
