#pragma once

#include "privhc/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace privhc::gc {

enum class party { garbler, evaluator };

// Word-level gate vocabulary. Operands are truncated or zero-extended to the
// op width. min/max emit one selector bit: min is 1 iff b < a, max is 1 iff
// b > a (strict, so the first operand wins ties). mux yields a when the
// selector is 0 and b when it is 1.
enum class op_kind : std::uint8_t { input, add, sub, min, max, mux, con, output };

struct word_op {
    op_kind kind{};
    unsigned width = 0;
    std::uint32_t a = 0, b = 0, c = 0;
    word_t value = 0;
    party owner = party::garbler;
};

enum class gate_kind : std::uint8_t { xor_, and_, inv };

// Gate i defines wire (input_bits + i).
struct gate {
    gate_kind kind{};
    std::uint32_t a = 0, b = 0;
};

constexpr std::uint32_t const0 = 0xfffffffeu;
constexpr std::uint32_t const1 = 0xffffffffu;

struct bool_circuit {
    std::uint32_t garbler_bits = 0;
    std::uint32_t evaluator_bits = 0;
    std::vector<gate> gates;
    std::vector<std::uint32_t> outputs; // wire ids or const0/const1
    std::uint32_t and_count = 0;

    std::uint32_t input_bits() const { return garbler_bits + evaluator_bits; }
    std::uint32_t wires() const { return input_bits() + std::uint32_t(gates.size()); }
};

struct circuit_spec {
    std::string name;
    std::vector<word_op> ops;
    std::vector<unsigned> garbler_widths;
    std::vector<unsigned> evaluator_widths;
    std::vector<unsigned> output_widths;
    bool_circuit net;

    std::size_t count(op_kind k) const;
    std::size_t comparators() const { return count(op_kind::min) + count(op_kind::max); }
    std::uint32_t garbler_bits() const { return net.garbler_bits; }
    std::uint32_t evaluator_bits() const { return net.evaluator_bits; }
};

// Records word ops and lowers each one to XOR/AND/INV gates on the fly.
class builder {
public:
    explicit builder(std::string name);

    std::uint32_t input(party p, unsigned width);
    std::uint32_t add(std::uint32_t a, std::uint32_t b, unsigned width);
    std::uint32_t sub(std::uint32_t a, std::uint32_t b, unsigned width);
    std::uint32_t min_sel(std::uint32_t a, std::uint32_t b, unsigned width);
    std::uint32_t max_sel(std::uint32_t a, std::uint32_t b, unsigned width);
    std::uint32_t mux(std::uint32_t sel, std::uint32_t a, std::uint32_t b, unsigned width);
    std::uint32_t con(word_t value, unsigned width);
    void output(std::uint32_t w);

    circuit_spec finish();

private:
    using bits = std::vector<std::uint32_t>;

    std::uint32_t record(word_op op, bits b);
    std::uint32_t bit_at(std::uint32_t w, unsigned i) const;
    std::uint32_t emit(gate_kind k, std::uint32_t a, std::uint32_t b);
    std::uint32_t xor_(std::uint32_t a, std::uint32_t b);
    std::uint32_t and_(std::uint32_t a, std::uint32_t b);
    std::uint32_t not_(std::uint32_t a);
    bits adder(std::uint32_t a, std::uint32_t b, unsigned width, bool subtract);
    std::uint32_t less_than(std::uint32_t a, std::uint32_t b, unsigned width);

    circuit_spec spec_;
    std::vector<bits> words_;
    // inputs are declared before any gate, so wires are renumbered in finish()
    std::vector<std::uint32_t> garbler_in_, evaluator_in_;
    std::vector<gate> gates_;
    std::uint32_t next_input_ = 0;
};

// Cleartext evaluation of the boolean netlist (not the word-level oracle).
std::vector<bool> evaluate_plain(const bool_circuit& c, const std::vector<bool>& garbler_bits,
                                 const std::vector<bool>& evaluator_bits);

// LSB-first packing of words into bits according to widths.
std::vector<bool> pack_words(const std::vector<word_t>& values, const std::vector<unsigned>& widths);
std::vector<word_t> unpack_words(const std::vector<bool>& bits, const std::vector<unsigned>& widths);

} // namespace privhc::gc
