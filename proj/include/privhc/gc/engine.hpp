#pragma once

#include "privhc/gc/circuit.hpp"
#include "privhc/gc/ot.hpp"
#include "privhc/net.hpp"
#include "privhc/prg.hpp"

#include <vector>

namespace privhc::gc {

// evaluator_only: the garbler's result is empty (MinDist/MaxDist).
// both: the evaluator returns the decoded output to the garbler (ArgMin).
enum class reveal { evaluator_only, both };

struct gc_counters {
    std::uint64_t runs = 0;
    std::uint64_t instances = 0;
    std::uint64_t comparators = 0;
    std::uint64_t and_gates = 0;
};

// One side of a two-party GC session. run() evaluates a batch of independent
// instances of one circuit; each party passes only its own input words.
class gc_party {
public:
    gc_party(net::session& s, party role, prg& rng);

    std::vector<std::vector<word_t>> run(const circuit_spec& spec,
                                         const std::vector<std::vector<word_t>>& inputs, reveal r);

    // Single-instance convenience.
    std::vector<word_t> run_one(const circuit_spec& spec, const std::vector<word_t>& inputs, reveal r);

    party role() const { return role_; }
    const gc_counters& counters() const { return counters_; }

    // Upper bounds on a frame payload; tests shrink them to force chunking.
    std::size_t chunk_bytes = std::size_t(8) << 20;
    std::size_t ot_batch = std::size_t(1) << 20;
    // Input wires per garbling pass; larger batches run as several passes.
    std::size_t max_wires = std::size_t(1) << 20;

private:
    std::vector<std::vector<word_t>> garble_side(const circuit_spec& spec,
                                                 const std::vector<std::vector<word_t>>& inputs, reveal r);
    std::vector<std::vector<word_t>> evaluate_side(const circuit_spec& spec,
                                                   const std::vector<std::vector<word_t>>& inputs, reveal r);

    net::session& s_;
    party role_;
    prg& rng_;
    ot_sender ot_send_;
    ot_receiver ot_recv_;
    std::uint64_t gate_base_ = 0;
    gc_counters counters_;
};

} // namespace privhc::gc
