#pragma once

#include "privhc/ahe.hpp"
#include "privhc/gc/circuits.hpp"
#include "privhc/gc/engine.hpp"
#include "privhc/net.hpp"
#include "privhc/plainhc.hpp"
#include "privhc/prg.hpp"
#include "privhc/protocol/merge_history.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace privhc::protocol {

// p1 holds P, garbles, and keeps L and R; p2 holds Q, evaluates, keeps B and
// the key that opens L and B.
enum class role { p1, p2 };

const char* to_string(role r);

struct config {
    std::string variant = "pca";
    linkage_kind kind = linkage_kind::single;
    std::size_t target = 1;
    unsigned l = 16;
    unsigned d = 1;
    unsigned key_bits = 1024;
    bool opt = false;
    // Optional knobs hashed into the session header by the caller.
    std::string extra;

    widths w() const { return widths::derive(l, d); }
    void validate() const;
    std::uint64_t hash() const;
};

// Per-party session: keys, GC engine, circuit cache, phase timers.
class party_context {
public:
    // seed: fixes this party's protocol randomness; deterministic_keys also
    // derives the Paillier key from it.
    party_context(role r, net::session& s, config cfg, std::optional<std::uint64_t> seed = {},
                  bool deterministic_keys = false);

    role who() const { return role_; }
    net::session& wire() { return s_; }
    const config& cfg() const { return cfg_; }
    widths w() const { return w_; }
    prg& rng() { return rng_; }
    gc::gc_party& gc() { return gc_; }

    // Handshake, key generation and PUBKEY exchange. Idempotent.
    void start();

    const ahe::keypair& own() const { return own_; }
    const ahe::public_key& peer() const { return peer_; }
    // pk' (opens L and B; owned by p2) and pk (p1's blinding key).
    const ahe::public_key& data_key() const { return role_ == role::p2 ? own_.pk : peer_; }
    const ahe::public_key& blind_key() const { return role_ == role::p1 ? own_.pk : peer_; }

    // Cached by width; the reference stays valid until the next call.
    const gc::circuit_spec& argmin(std::size_t n);
    const gc::circuit_spec& update_circuit(); // MinDist or MaxDist per linkage

    // Phase bookkeeping: switches the meter phase and accumulates wall time.
    void enter(const std::string& phase);
    std::map<std::string, double> phase_ms() const;

    // GC comparators spent in cluster rounds, and the round count.
    std::uint64_t cluster_comparators = 0;
    std::uint64_t cluster_rounds = 0;

private:
    role role_;
    net::session& s_;
    config cfg_;
    widths w_;
    prg rng_;
    std::optional<std::uint64_t> seed_;
    bool det_keys_;
    gc::gc_party gc_;
    bool started_ = false;
    ahe::keypair own_;
    ahe::public_key peer_;
    std::map<std::size_t, gc::circuit_spec> argmin_;
    std::optional<gc::circuit_spec> update_;
    std::string phase_;
    std::chrono::steady_clock::time_point since_;
    std::map<std::string, double> ms_;
};

// One party's half of the split state. p1 fills L and R, p2 fills B.
struct split_state {
    std::size_t n = 0;
    std::size_t components = 0;
    std::vector<std::vector<ahe::ciphertext>> L; // n x components under pk'
    plainhc::sym_matrix R;
    plainhc::sym_matrix B;
    merge_history sigma;
    std::vector<std::size_t> perm; // this party's pi1 (p1) or pi2 (p2)
};

// Items a party brings to setup: L plaintexts and pairwise linkages among its
// own items. points is required for the coordinate-based cross terms.
struct setup_input {
    std::vector<std::vector<std::uint64_t>> values;
    plainhc::sym_matrix intra;
    std::vector<point_t> points;

    static setup_input from_points(const std::vector<point_t>& pts);
};

// Secret-shared cross linkages (row-major |P| x |Q|): p1 holds X, p2 holds Y,
// linkage = Y - X.
struct cross_shares {
    std::size_t rows = 0, cols = 0;
    std::vector<word_t> share;
};

split_state setup(party_context& ctx, const setup_input& in, const cross_shares* cross = nullptr);

// Full-matrix rounds until target clusters remain (or stop_at, if larger).
void cluster(party_context& ctx, split_state& st, std::size_t stop_at = 0);

// Row-minimum state for the single-linkage variant.
struct rowmin_state {
    std::vector<std::size_t> J; // public column of each row minimum
    std::vector<word_t> share;  // R-bar at p1, B-bar at p2
};

rowmin_state opt_init(party_context& ctx, const split_state& st);
void opt_cluster(party_context& ctx, split_state& st, rowmin_state& rm, std::size_t stop_at = 0);
// Recomputes rows whose minimum points at a retired slot (after elimination).
void opt_repair(party_context& ctx, const split_state& st, rowmin_state& rm);

struct target_output {
    std::size_t slot = 0;
    std::size_t cluster_id = 0;
    std::vector<std::size_t> members; // permuted positions
    std::vector<word_t> sums;         // per L component
    std::uint64_t size = 0;
};

std::vector<target_output> output(party_context& ctx, const split_state& st);

} // namespace privhc::protocol
