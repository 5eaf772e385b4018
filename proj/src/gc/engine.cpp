#include "privhc/gc/engine.hpp"

#include "privhc/codec.hpp"
#include "privhc/gc/garble.hpp"

#include <cstring>

namespace privhc::gc {

namespace {

class frame_sink final : public byte_sink {
public:
    frame_sink(net::session& s, net::tag t, std::size_t cap) : w_(s, t, cap) {}
    std::uint8_t* reserve(std::size_t n) override { return w_.reserve(n); }
    void flush() { w_.flush(); }

private:
    net::chunk_writer w_;
};

class frame_source final : public byte_source {
public:
    frame_source(net::session& s, net::tag t) : r_(s, t) {}
    const std::uint8_t* take(std::size_t n) override { return r_.take(n); }
    bool drained() const { return r_.drained(); }

private:
    net::chunk_reader r_;
};

std::vector<std::uint8_t> pack_bits(const std::vector<bool>& bits)
{
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i])
            out[i / 8] |= std::uint8_t(1u << (i % 8));
    return out;
}

std::vector<bool> unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t n)
{
    if (bytes.size() != (n + 7) / 8)
        throw error("gc: malformed output message");
    std::vector<bool> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = (bytes[i / 8] >> (i % 8)) & 1;
    return out;
}

std::vector<bool> input_bits(const circuit_spec& spec, const std::vector<std::vector<word_t>>& inputs,
                             const std::vector<unsigned>& widths)
{
    std::vector<bool> bits;
    for (const auto& in : inputs) {
        if (in.size() != widths.size())
            throw error("gc: " + spec.name + " expects " + std::to_string(widths.size()) + " input words");
        auto b = pack_words(in, widths);
        bits.insert(bits.end(), b.begin(), b.end());
    }
    return bits;
}

} // namespace

gc_party::gc_party(net::session& s, party role, prg& rng)
    : s_(s), role_(role), rng_(rng), ot_send_(s, rng), ot_recv_(s, rng)
{
}

std::vector<std::vector<word_t>> gc_party::run(const circuit_spec& spec,
                                               const std::vector<std::vector<word_t>>& inputs, reveal r)
{
    const std::size_t nin = std::max<std::size_t>(1, spec.net.input_bits());
    const std::size_t step = std::max<std::size_t>(1, max_wires / nin);
    std::vector<std::vector<word_t>> out;
    out.reserve(inputs.size());
    for (std::size_t lo = 0; lo < inputs.size() || (lo == 0 && inputs.empty()); lo += step) {
        const std::size_t hi = std::min(inputs.size(), lo + step);
        std::vector<std::vector<word_t>> part(inputs.begin() + std::ptrdiff_t(lo), inputs.begin() + std::ptrdiff_t(hi));
        auto got = role_ == party::garbler ? garble_side(spec, part, r) : evaluate_side(spec, part, r);
        for (auto& v : got)
            out.push_back(std::move(v));
        gate_base_ += (hi - lo) * spec.net.and_count;
        if (inputs.empty())
            break;
    }
    const std::uint64_t k = inputs.size();
    counters_.runs += 1;
    counters_.instances += k;
    counters_.comparators += k * spec.comparators();
    counters_.and_gates += k * spec.net.and_count;
    return out;
}

std::vector<word_t> gc_party::run_one(const circuit_spec& spec, const std::vector<word_t>& inputs, reveal r)
{
    return run(spec, {inputs}, r).front();
}

std::vector<std::vector<word_t>> gc_party::garble_side(const circuit_spec& spec,
                                                       const std::vector<std::vector<word_t>>& inputs, reveal r)
{
    const auto& c = spec.net;
    const std::size_t k = inputs.size();
    const std::size_t nin = c.input_bits();
    auto mine = input_bits(spec, inputs, spec.garbler_widths);

    const block delta = random_delta(rng_);
    std::vector<block> zero(k * nin);
    for (auto& l : zero)
        l = rng_.next_block();

    // evaluator's labels by OT
    const std::size_t ne = std::size_t(c.evaluator_bits) * k;
    for (std::size_t lo = 0; lo < ne; lo += ot_batch) {
        const std::size_t hi = std::min(ne, lo + ot_batch);
        std::vector<std::array<block, 2>> pairs(hi - lo);
        for (std::size_t x = lo; x < hi; ++x) {
            const std::size_t inst = x / c.evaluator_bits, bit = x % c.evaluator_bits;
            const block z = zero[inst * nin + c.garbler_bits + bit];
            pairs[x - lo] = {z, _mm_xor_si128(z, delta)};
        }
        ot_send_.send(pairs);
    }

    {
        frame_sink labels(s_, net::tag::gc_labels, chunk_bytes);
        for (std::size_t inst = 0; inst < k; ++inst)
            for (std::size_t bit = 0; bit < c.garbler_bits; ++bit) {
                block l = zero[inst * nin + bit];
                if (mine[inst * c.garbler_bits + bit])
                    l = _mm_xor_si128(l, delta);
                store_block(labels.reserve(label_bytes), l);
            }
        labels.flush();
    }

    {
        frame_sink tables(s_, net::tag::gc_tables, chunk_bytes);
        std::vector<block> scratch;
        std::uint64_t base = gate_base_;
        for (std::size_t inst = 0; inst < k; ++inst) {
            garble(c, delta, zero.data() + inst * nin, rng_, tables, scratch, base);
            base += c.and_count;
        }
        tables.flush();
    }

    std::vector<std::vector<word_t>> out(k);
    if (r == reveal::both) {
        auto bits = unpack_bits(s_.recv(net::tag::gc_output), k * c.outputs.size());
        for (std::size_t inst = 0; inst < k; ++inst) {
            std::vector<bool> b(bits.begin() + inst * c.outputs.size(), bits.begin() + (inst + 1) * c.outputs.size());
            out[inst] = unpack_words(b, spec.output_widths);
        }
    }
    return out;
}

std::vector<std::vector<word_t>> gc_party::evaluate_side(const circuit_spec& spec,
                                                         const std::vector<std::vector<word_t>>& inputs, reveal r)
{
    const auto& c = spec.net;
    const std::size_t k = inputs.size();
    const std::size_t nin = c.input_bits();
    auto mine = input_bits(spec, inputs, spec.evaluator_widths);

    std::vector<block> labels(k * nin);
    for (std::size_t lo = 0; lo < mine.size(); lo += ot_batch) {
        const std::size_t hi = std::min(mine.size(), lo + ot_batch);
        std::vector<bool> choice(mine.begin() + lo, mine.begin() + hi);
        auto got = ot_recv_.receive(choice);
        for (std::size_t x = lo; x < hi; ++x) {
            const std::size_t inst = x / c.evaluator_bits, bit = x % c.evaluator_bits;
            labels[inst * nin + c.garbler_bits + bit] = got[x - lo];
        }
    }

    {
        frame_source src(s_, net::tag::gc_labels);
        for (std::size_t inst = 0; inst < k; ++inst)
            for (std::size_t bit = 0; bit < c.garbler_bits; ++bit)
                labels[inst * nin + bit] = load_block(src.take(label_bytes));
        if (!src.drained())
            throw error("gc: surplus garbler labels");
    }

    std::vector<bool> all;
    all.reserve(k * c.outputs.size());
    {
        frame_source src(s_, net::tag::gc_tables);
        std::vector<block> scratch;
        std::uint64_t base = gate_base_;
        for (std::size_t inst = 0; inst < k; ++inst) {
            auto bits = evaluate(c, labels.data() + inst * nin, src, scratch, base);
            all.insert(all.end(), bits.begin(), bits.end());
            base += c.and_count;
        }
        if (!src.drained())
            throw error("gc: surplus garbled tables");
    }

    if (r == reveal::both)
        s_.send(net::tag::gc_output, pack_bits(all));

    std::vector<std::vector<word_t>> out(k);
    for (std::size_t inst = 0; inst < k; ++inst) {
        std::vector<bool> b(all.begin() + inst * c.outputs.size(), all.begin() + (inst + 1) * c.outputs.size());
        out[inst] = unpack_words(b, spec.output_widths);
    }
    return out;
}

} // namespace privhc::gc
