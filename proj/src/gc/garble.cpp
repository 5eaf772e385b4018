#include "privhc/gc/garble.hpp"

#include <cstring>

namespace privhc::gc {

namespace {

inline block tweak(std::uint64_t gate, unsigned k) { return make_block(gate, k); }

// Two-block pad G(L, gate, side) from the correlation-robust hash.
inline void pads4(const block* labels, std::uint64_t gate, block* out)
{
    // labels[0..1] use side 0 (left input), labels[2..3] side 1
    block s[8];
    for (int i = 0; i < 4; ++i) {
        block sl = sigma(labels[i]);
        unsigned side = i / 2;
        s[2 * i] = _mm_xor_si128(sl, tweak(gate, 4 * side));
        s[2 * i + 1] = _mm_xor_si128(sl, tweak(gate, 4 * side + 1));
    }
    block e[8];
    std::memcpy(e, s, sizeof s);
    fixed_aes().encrypt_n<8>(e);
    for (int i = 0; i < 8; ++i)
        out[i] = _mm_xor_si128(e[i], s[i]);
}

inline void pads2(block left, block right, std::uint64_t gate, block* out)
{
    block sl = sigma(left), sr = sigma(right);
    block s[4] = {_mm_xor_si128(sl, tweak(gate, 0)), _mm_xor_si128(sl, tweak(gate, 1)),
                  _mm_xor_si128(sr, tweak(gate, 4)), _mm_xor_si128(sr, tweak(gate, 5))};
    block e[4] = {s[0], s[1], s[2], s[3]};
    fixed_aes().encrypt_n<4>(e);
    for (int i = 0; i < 4; ++i)
        out[i] = _mm_xor_si128(e[i], s[i]);
}

inline std::uint64_t digest(block label, std::uint64_t index)
{
    return block_lo(ccr_hash(label, make_block(index, 0xdec0de)));
}

} // namespace

std::size_t decode_entries(const bool_circuit& c)
{
    std::size_t k = 0;
    for (auto o : c.outputs)
        k += o != const0 && o != const1;
    return k;
}

std::size_t garbled_size(const bool_circuit& c)
{
    return std::size_t(c.and_count) * table_bytes + decode_entries(c) * decode_bytes;
}

block random_delta(prg& rng)
{
    return _mm_or_si128(rng.next_block(), make_block(0, 1));
}

void garble(const bool_circuit& c, block delta, const block* input_zero, prg& rng, byte_sink& out,
            std::vector<block>& w, std::uint64_t gate_base)
{
    w.resize(c.wires());
    std::memcpy(w.data(), input_zero, sizeof(block) * c.input_bits());
    std::uint32_t k = c.input_bits();
    std::uint64_t and_index = gate_base;
    for (const auto& g : c.gates) {
        switch (g.kind) {
        case gate_kind::xor_:
            w[k] = _mm_xor_si128(w[g.a], w[g.b]);
            break;
        case gate_kind::inv:
            w[k] = _mm_xor_si128(w[g.a], delta);
            break;
        case gate_kind::and_: {
            const block a0 = w[g.a], b0 = w[g.b];
            const block in[4] = {a0, _mm_xor_si128(a0, delta), b0, _mm_xor_si128(b0, delta)};
            block p[8];
            pads4(in, and_index, p);
            const block o0 = rng.next_block();
            w[k] = o0;
            const block o1 = _mm_xor_si128(o0, delta);
            const unsigned pa = lsb(a0), pb = lsb(b0);
            std::uint8_t* t = out.reserve(table_bytes);
            for (unsigned va = 0; va < 2; ++va)
                for (unsigned vb = 0; vb < 2; ++vb) {
                    const unsigned row = 2 * (pa ^ va) + (pb ^ vb);
                    const block lab = (va & vb) ? o1 : o0;
                    block lo = _mm_xor_si128(lab, _mm_xor_si128(p[2 * va], p[4 + 2 * vb]));
                    block hi = _mm_xor_si128(p[2 * va + 1], p[4 + 2 * vb + 1]);
                    std::uint8_t tmp[16];
                    store_block(t + row * row_bytes, lo);
                    store_block(tmp, hi);
                    std::memcpy(t + row * row_bytes + label_bytes, tmp, pad_bytes);
                }
            ++and_index;
            break;
        }
        }
        ++k;
    }
    std::uint64_t oi = 0;
    for (auto o : c.outputs) {
        if (o == const0 || o == const1)
            continue;
        std::uint8_t* d = out.reserve(decode_bytes);
        std::uint64_t d0 = digest(w[o], oi), d1 = digest(_mm_xor_si128(w[o], delta), oi);
        std::memcpy(d, &d0, 8);
        std::memcpy(d + 8, &d1, 8);
        ++oi;
    }
}

std::vector<bool> evaluate(const bool_circuit& c, const block* input_labels, byte_source& in,
                           std::vector<block>& w, std::uint64_t gate_base)
{
    w.resize(c.wires());
    std::memcpy(w.data(), input_labels, sizeof(block) * c.input_bits());
    std::uint32_t k = c.input_bits();
    std::uint64_t and_index = gate_base;
    for (const auto& g : c.gates) {
        switch (g.kind) {
        case gate_kind::xor_:
        case gate_kind::inv:
            w[k] = g.kind == gate_kind::xor_ ? _mm_xor_si128(w[g.a], w[g.b]) : w[g.a];
            break;
        case gate_kind::and_: {
            const block a = w[g.a], b = w[g.b];
            const std::uint8_t* t = in.take(table_bytes);
            block p[4];
            pads2(a, b, and_index, p);
            const unsigned row = 2 * lsb(a) + lsb(b);
            const std::uint8_t* r = t + row * row_bytes;
            block lo = _mm_xor_si128(load_block(r), _mm_xor_si128(p[0], p[2]));
            std::uint8_t tail[16];
            store_block(tail, _mm_xor_si128(p[1], p[3]));
            for (std::size_t i = 0; i < pad_bytes; ++i)
                if ((tail[i] ^ r[label_bytes + i]) != 0)
                    throw error("gc: no row decrypts (corrupted labels or tables)");
            w[k] = lo;
            ++and_index;
            break;
        }
        }
        ++k;
    }
    std::vector<bool> out;
    out.reserve(c.outputs.size());
    std::uint64_t oi = 0;
    for (auto o : c.outputs) {
        if (o == const0 || o == const1) {
            out.push_back(o == const1);
            continue;
        }
        const std::uint8_t* d = in.take(decode_bytes);
        std::uint64_t d0, d1, mine = digest(w[o], oi);
        std::memcpy(&d0, d, 8);
        std::memcpy(&d1, d + 8, 8);
        if (mine == d0)
            out.push_back(false);
        else if (mine == d1)
            out.push_back(true);
        else
            throw error("gc: output label not in decode map");
        ++oi;
    }
    return out;
}

garbled_circuit garble(const bool_circuit& c, prg& rng)
{
    garbled_circuit g;
    g.delta = random_delta(rng);
    g.input_zero.resize(c.input_bits());
    for (auto& l : g.input_zero)
        l = rng.next_block();
    vector_sink sink;
    std::vector<block> scratch;
    garble(c, g.delta, g.input_zero.data(), rng, sink, scratch);
    g.bytes = std::move(sink.bytes);
    return g;
}

std::vector<block> select_labels(const garbled_circuit& g, const std::vector<bool>& input_bits)
{
    if (input_bits.size() != g.input_zero.size())
        throw error("gc: input size mismatch");
    std::vector<block> out(input_bits.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = input_bits[i] ? _mm_xor_si128(g.input_zero[i], g.delta) : g.input_zero[i];
    return out;
}

std::vector<bool> evaluate(const bool_circuit& c, const garbled_circuit& g, const std::vector<block>& input_labels)
{
    if (input_labels.size() != c.input_bits())
        throw error("gc: one label per input wire required");
    vector_source src(g.bytes);
    std::vector<block> scratch;
    return evaluate(c, input_labels.data(), src, scratch);
}

} // namespace privhc::gc
