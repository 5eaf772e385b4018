#pragma once

#include "privhc/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace privhc::plainhc {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

word_t sq_dist(const point_t& a, const point_t& b);

// min (single) or max (complete) over all cross pairs
word_t linkage(const std::vector<point_t>& x, const std::vector<point_t>& y, linkage_kind kind);

// Cluster ids: leaves are 0..n-1, the merge of round r creates id n + r.
struct merge_step {
    std::size_t round = 0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t parent = 0;
    bool operator==(const merge_step&) const = default;
};

struct dendrogram {
    std::size_t leaf_count = 0;
    std::vector<merge_step> merges;
    // ordered by surviving slot, i.e. by smallest member index
    std::vector<std::vector<std::size_t>> target_clusters;
    bool operator==(const dendrogram&) const = default;
};

struct cluster_metadata {
    std::vector<std::uint64_t> rep_sum;
    std::uint64_t size = 0;
    bool operator==(const cluster_metadata&) const = default;
    auto operator<=>(const cluster_metadata&) const = default;
};

// Symmetric pairwise matrix, dense row-major storage.
class sym_matrix {
public:
    sym_matrix() = default;
    explicit sym_matrix(std::size_t n) : n_(n), a_(n * n, 0) {}
    std::size_t size() const { return n_; }
    word_t at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, word_t v)
    {
        a_[i * n_ + j] = v;
        a_[j * n_ + i] = v;
    }

private:
    std::size_t n_ = 0;
    std::vector<word_t> a_;
};

sym_matrix distance_matrix(const std::vector<point_t>& pts);

// Optional early-termination hook: called before each merge with the current
// active count and the linkage of the pair about to merge; true stops.
using end_predicate = std::function<bool(std::size_t active, word_t next_linkage)>;

struct hc_trace {
    dendrogram tree;
    // per merge: surviving slot i < absorbed slot j, and the linkage value
    std::vector<std::pair<std::size_t, std::size_t>> slot_pairs;
    std::vector<word_t> heights;
};

// Runs HCAlg on an initial linkage matrix. Tie-break: lexicographically
// smallest (i, j), i < j, over surviving slots.
hc_trace hc_matrix(sym_matrix m, linkage_kind kind, std::size_t target, const end_predicate& end = {});

struct hc_result {
    dendrogram tree;
    std::vector<cluster_metadata> meta; // aligned with tree.target_clusters
};

hc_result hc_run(const std::vector<point_t>& data, linkage_kind kind, std::size_t target,
                 const end_predicate& end = {});

cluster_metadata metadata_of(const std::vector<point_t>& data, const std::vector<std::size_t>& members);

struct selection {
    enum class kind { target, s_merging };
    kind k = kind::target;
    std::size_t s = 1;

    static selection target_only() { return {}; }
    static selection s_merging(std::size_t s) { return {kind::s_merging, s}; }
};

struct selected_cluster {
    std::size_t cluster_id = 0;
    cluster_metadata meta;
    bool operator==(const selected_cluster&) const = default;
};

struct ideal_output {
    dendrogram tree;
    std::vector<selected_cluster> metadata;
    std::vector<std::size_t> permutation;
};

// order[k] is the index into P||Q that lands at permuted position k.
ideal_output ideal_fhc(const std::vector<point_t>& p, const std::vector<point_t>& q, linkage_kind kind,
                       std::size_t target, selection select, const std::vector<std::size_t>& order);

ideal_output ideal_fhc(const std::vector<point_t>& p, const std::vector<point_t>& q, linkage_kind kind,
                       std::size_t target, selection select, std::uint64_t perm_seed);

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// result[k] = first[second[k]]: permute by first, then by second.
std::vector<std::size_t> compose(const std::vector<std::size_t>& first, const std::vector<std::size_t>& second);

template <class T>
std::vector<T> apply_permutation(const std::vector<T>& v, const std::vector<std::size_t>& order)
{
    std::vector<T> out;
    out.reserve(order.size());
    for (auto k : order)
        out.push_back(v.at(k));
    return out;
}

// Majority-label accuracy over all labeled points not excluded.
double accuracy(const std::vector<std::vector<std::size_t>>& clusters, const std::vector<std::int64_t>& labels,
                const std::vector<bool>* exclude = nullptr);

double accuracy_of_assignment(const std::vector<std::size_t>& assignment, const std::vector<std::int64_t>& labels,
                              const std::vector<bool>* exclude = nullptr);

} // namespace privhc::plainhc
