#pragma once

#include "privhc/plainhc.hpp"
#include "privhc/protocol/pca.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace privhc::cure {

enum class variant { plain, pcure0, pcure1, pcure2 };

const char* to_string(variant v);
variant parse_variant(const std::string& s);

struct params {
    std::size_t s = 1000; // sample size
    std::size_t p = 1;    // partitions
    std::size_t q = 3;    // per-partition reduction factor
    std::size_t t1 = 3;   // A-cluster elimination below this size
    std::size_t t2 = 5;   // B-cluster elimination below this size
    std::size_t R = 1;    // representatives per B-cluster; 1 means centroid

    // n is the data size the sample is drawn from.
    void validate(std::size_t n, std::size_t target, variant v = variant::plain) const;
    // per-partition A-stage target for a sample of the given size
    std::size_t a_target(std::size_t sample) const;
    std::string describe() const;
};

enum class provenance { local_p, local_q, joint };

const char* to_string(provenance p);

// Representative with coordinates sum / weight.
struct representative {
    std::vector<word_t> sum;
    std::uint64_t weight = 1;
    bool operator==(const representative&) const = default;
};

struct b_cluster {
    std::vector<representative> reps;
    std::uint64_t size = 0;
    provenance source = provenance::joint;
    bool operator==(const b_cluster&) const = default;
};

struct cluster_model {
    std::vector<b_cluster> clusters;

    // One line per cluster: "source size w:s0,s1,.. w:s0,..".
    std::string to_text() const;
    bool operator==(const cluster_model&) const = default;
};

// Index of the cluster owning the closest representative (squared distance,
// compared exactly); ties go to the lowest cluster index.
std::size_t classify_one(const cluster_model& m, const point_t& x);
std::vector<std::size_t> classify(const cluster_model& m, const std::vector<point_t>& pts);

// Positions of the clusters to drop: sizes below t, smallest first, never
// leaving fewer than keep_at_least.
std::vector<std::size_t> small_clusters(const std::vector<std::uint64_t>& sizes, std::size_t t,
                                        std::size_t keep_at_least);

// s distinct row indices, in sampled order.
std::vector<std::size_t> sample_rows(std::size_t n, std::size_t s, prg& rng);

// A-stage on a sample: split into p contiguous parts, cluster each part down
// to a_target, drop clusters below t1. Member lists index into sample.
std::vector<std::vector<std::size_t>> a_stage(const std::vector<point_t>& sample, const params& prm,
                                              linkage_kind kind, std::size_t keep_at_least);

// Pairwise linkage between member sets.
plainhc::sym_matrix set_linkages(const std::vector<point_t>& pts, const std::vector<std::vector<std::size_t>>& sets,
                                 linkage_kind kind);

struct result {
    cluster_model model;
    std::vector<std::size_t> labels; // cluster index per input point
    // diagnostics
    std::size_t sample = 0;
    std::size_t a_clusters = 0;
    std::uint64_t comparators = 0;
};

result cure_plain(const std::vector<point_t>& data, const params& prm, std::uint64_t seed, linkage_kind kind,
                  std::size_t target, provenance tag = provenance::joint);

// The protocol config a PCure run hashes into its handshake.
protocol::config make_config(variant v, linkage_kind kind, std::size_t target, unsigned l, unsigned d,
                             const params& prm, unsigned key_bits, bool opt);

// Per-party sample sizes: p1 takes the larger half.
std::size_t local_share(std::size_t total, protocol::role r);

// Each party clusters its own sample and the two models are exchanged;
// labels cover this party's own points.
result pcure0(protocol::party_context& ctx, const std::vector<point_t>& own, const params& prm, std::uint64_t seed);

// Local A-stage, joint B-stage over A-clusters.
result pcure1(protocol::party_context& ctx, const std::vector<point_t>& own, const params& prm, std::uint64_t seed);

// Joint A- and B-stage over both samples (p = 1).
result pcure2(protocol::party_context& ctx, const std::vector<point_t>& own, const params& prm, std::uint64_t seed);

result run_variant(variant v, protocol::party_context& ctx, const std::vector<point_t>& own, const params& prm,
                   std::uint64_t seed);

// Secret-shared linkages between p1's and p2's point sets (rows: p1 sets,
// cols: p2 sets); linkage = p2 share - p1 share. Exposed for testing.
protocol::cross_shares cross_linkages(protocol::party_context& ctx, const std::vector<point_t>& own,
                                      const std::vector<std::vector<std::size_t>>& sets);

} // namespace privhc::cure
