#include "privhc/gc/circuit.hpp"

#include <algorithm>

namespace privhc::gc {

namespace {
constexpr std::uint32_t input_flag = 0x40000000u;

bool is_const(std::uint32_t w) { return w == const0 || w == const1; }
} // namespace

std::size_t circuit_spec::count(op_kind k) const
{
    return std::size_t(std::count_if(ops.begin(), ops.end(), [&](const word_op& o) { return o.kind == k; }));
}

builder::builder(std::string name) { spec_.name = std::move(name); }

std::uint32_t builder::record(word_op op, bits b)
{
    spec_.ops.push_back(op);
    words_.push_back(std::move(b));
    return std::uint32_t(words_.size() - 1);
}

std::uint32_t builder::bit_at(std::uint32_t w, unsigned i) const
{
    const auto& b = words_.at(w);
    return i < b.size() ? b[i] : const0;
}

std::uint32_t builder::emit(gate_kind k, std::uint32_t a, std::uint32_t b)
{
    gates_.push_back({k, a, b});
    if (k == gate_kind::and_)
        ++spec_.net.and_count;
    return std::uint32_t(gates_.size() - 1);
}

std::uint32_t builder::xor_(std::uint32_t a, std::uint32_t b)
{
    if (a == const0)
        return b;
    if (b == const0)
        return a;
    if (a == const1)
        return not_(b);
    if (b == const1)
        return not_(a);
    if (a == b)
        return const0;
    return emit(gate_kind::xor_, a, b);
}

std::uint32_t builder::and_(std::uint32_t a, std::uint32_t b)
{
    if (a == const0 || b == const0)
        return const0;
    if (a == const1)
        return b;
    if (b == const1)
        return a;
    if (a == b)
        return a;
    return emit(gate_kind::and_, a, b);
}

std::uint32_t builder::not_(std::uint32_t a)
{
    if (a == const0)
        return const1;
    if (a == const1)
        return const0;
    return emit(gate_kind::inv, a, 0);
}

std::uint32_t builder::input(party p, unsigned width)
{
    if (width == 0 || width > 127)
        throw error("gc: bad input width");
    bits b(width);
    for (auto& x : b)
        x = input_flag | next_input_++;
    auto& list = p == party::garbler ? garbler_in_ : evaluator_in_;
    for (auto x : b)
        list.push_back(x);
    (p == party::garbler ? spec_.garbler_widths : spec_.evaluator_widths).push_back(width);
    word_op op{op_kind::input, width};
    op.owner = p;
    return record(op, std::move(b));
}

builder::bits builder::adder(std::uint32_t a, std::uint32_t b, unsigned width, bool subtract)
{
    bits out(width);
    std::uint32_t carry = subtract ? const1 : const0;
    for (unsigned i = 0; i < width; ++i) {
        std::uint32_t x = bit_at(a, i);
        std::uint32_t y = bit_at(b, i);
        if (subtract)
            y = not_(y);
        std::uint32_t xc = xor_(x, carry);
        out[i] = xor_(xc, y);
        if (i + 1 < width)
            carry = xor_(carry, and_(xc, xor_(y, carry)));
    }
    return out;
}

std::uint32_t builder::less_than(std::uint32_t a, std::uint32_t b, unsigned width)
{
    // carry out of a + ~b + 1 is 1 iff a >= b
    std::uint32_t carry = const1;
    for (unsigned i = 0; i < width; ++i) {
        std::uint32_t x = bit_at(a, i);
        std::uint32_t y = not_(bit_at(b, i));
        carry = xor_(carry, and_(xor_(x, carry), xor_(y, carry)));
    }
    return not_(carry);
}

std::uint32_t builder::add(std::uint32_t a, std::uint32_t b, unsigned width)
{
    auto r = adder(a, b, width, false);
    return record({op_kind::add, width, a, b}, std::move(r));
}

std::uint32_t builder::sub(std::uint32_t a, std::uint32_t b, unsigned width)
{
    auto r = adder(a, b, width, true);
    return record({op_kind::sub, width, a, b}, std::move(r));
}

std::uint32_t builder::min_sel(std::uint32_t a, std::uint32_t b, unsigned width)
{
    auto s = less_than(b, a, width);
    return record({op_kind::min, width, a, b}, {s});
}

std::uint32_t builder::max_sel(std::uint32_t a, std::uint32_t b, unsigned width)
{
    auto s = less_than(a, b, width);
    return record({op_kind::max, width, a, b}, {s});
}

std::uint32_t builder::mux(std::uint32_t sel, std::uint32_t a, std::uint32_t b, unsigned width)
{
    std::uint32_t s = bit_at(sel, 0);
    bits out(width);
    for (unsigned i = 0; i < width; ++i) {
        std::uint32_t x = bit_at(a, i), y = bit_at(b, i);
        out[i] = xor_(x, and_(s, xor_(x, y)));
    }
    return record({op_kind::mux, width, sel, a, b}, std::move(out));
}

std::uint32_t builder::con(word_t value, unsigned width)
{
    bits out(width);
    for (unsigned i = 0; i < width; ++i)
        out[i] = ((value >> i) & 1) ? const1 : const0;
    word_op op{op_kind::con, width};
    op.value = value & word_mask(width);
    return record(op, std::move(out));
}

void builder::output(std::uint32_t w)
{
    const auto& b = words_.at(w);
    spec_.output_widths.push_back(unsigned(b.size()));
    for (auto x : b)
        spec_.net.outputs.push_back(x);
    record({op_kind::output, unsigned(b.size()), w}, {});
}

circuit_spec builder::finish()
{
    auto& net = spec_.net;
    net.garbler_bits = std::uint32_t(garbler_in_.size());
    net.evaluator_bits = std::uint32_t(evaluator_in_.size());
    std::vector<std::uint32_t> input_map(next_input_);
    std::uint32_t k = 0;
    for (auto x : garbler_in_)
        input_map[x & ~input_flag] = k++;
    for (auto x : evaluator_in_)
        input_map[x & ~input_flag] = k++;
    const std::uint32_t base = k;
    auto remap = [&](std::uint32_t w) {
        if (is_const(w))
            return w;
        if (w & input_flag)
            return input_map[w & ~input_flag];
        return base + w;
    };
    net.gates = std::move(gates_);
    for (auto& g : net.gates) {
        g.a = remap(g.a);
        if (g.kind != gate_kind::inv)
            g.b = remap(g.b);
    }
    for (auto& o : net.outputs)
        o = remap(o);
    words_.clear();
    return std::move(spec_);
}

std::vector<bool> evaluate_plain(const bool_circuit& c, const std::vector<bool>& garbler_bits,
                                 const std::vector<bool>& evaluator_bits)
{
    if (garbler_bits.size() != c.garbler_bits || evaluator_bits.size() != c.evaluator_bits)
        throw error("gc: input size mismatch");
    std::vector<char> v(c.wires());
    std::uint32_t k = 0;
    for (bool b : garbler_bits)
        v[k++] = b;
    for (bool b : evaluator_bits)
        v[k++] = b;
    for (const auto& g : c.gates) {
        switch (g.kind) {
        case gate_kind::xor_: v[k] = v[g.a] ^ v[g.b]; break;
        case gate_kind::and_: v[k] = v[g.a] & v[g.b]; break;
        case gate_kind::inv: v[k] = !v[g.a]; break;
        }
        ++k;
    }
    std::vector<bool> out;
    for (auto o : c.outputs)
        out.push_back(o == const1 ? true : o == const0 ? false : bool(v[o]));
    return out;
}

std::vector<bool> pack_words(const std::vector<word_t>& values, const std::vector<unsigned>& widths)
{
    if (values.size() != widths.size())
        throw error("gc: input word count mismatch");
    std::vector<bool> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (widths[i] < 128 && (values[i] >> widths[i]) != 0)
            throw error("gc: input value exceeds declared width");
        for (unsigned b = 0; b < widths[i]; ++b)
            out.push_back((values[i] >> b) & 1);
    }
    return out;
}

std::vector<word_t> unpack_words(const std::vector<bool>& bits, const std::vector<unsigned>& widths)
{
    std::vector<word_t> out;
    std::size_t k = 0;
    for (unsigned w : widths) {
        word_t v = 0;
        for (unsigned b = 0; b < w; ++b)
            if (bits.at(k++))
                v |= word_t(1) << b;
        out.push_back(v);
    }
    if (k != bits.size())
        throw error("gc: output size mismatch");
    return out;
}

} // namespace privhc::gc
