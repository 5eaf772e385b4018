#pragma once
// Independent test-side reference implementations.

#include "privhc/gc/circuit.hpp"
#include "privhc/plainhc.hpp"
#include "privhc/prg.hpp"

#include <algorithm>
#include <map>

namespace oracle {

using privhc::point_t;
using privhc::word_t;

inline word_t dist(const point_t& a, const point_t& b)
{
    word_t s = 0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        __int128 diff = (__int128)a[c] - (__int128)b[c];
        s += (word_t)(diff * diff);
    }
    return s;
}

// Naive all-pairs re-scan HC: recomputes every active pair's linkage from the
// member sets each round.
inline privhc::plainhc::dendrogram brute_hc(const std::vector<point_t>& pts, privhc::linkage_kind kind,
                                            std::size_t target)
{
    const std::size_t n = pts.size();
    std::vector<std::vector<std::size_t>> slot(n);
    std::vector<std::size_t> id(n);
    for (std::size_t i = 0; i < n; ++i) {
        slot[i] = {i};
        id[i] = i;
    }
    std::vector<bool> alive(n, true);
    privhc::plainhc::dendrogram t;
    t.leaf_count = n;
    std::size_t live = n;
    for (std::size_t round = 0; live > target; ++round) {
        bool have = false;
        word_t best = 0;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!alive[i] || !alive[j])
                    continue;
                bool first = true;
                word_t l = 0;
                for (auto a : slot[i])
                    for (auto b : slot[j]) {
                        word_t v = dist(pts[a], pts[b]);
                        if (first || (kind == privhc::linkage_kind::single ? v < l : v > l))
                            l = v;
                        first = false;
                    }
                if (!have || l < best) {
                    have = true;
                    best = l;
                    bi = i;
                    bj = j;
                }
            }
        t.merges.push_back({round, id[bi], id[bj], n + round});
        id[bi] = n + round;
        slot[bi].insert(slot[bi].end(), slot[bj].begin(), slot[bj].end());
        slot[bj].clear();
        alive[bj] = false;
        --live;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) {
            auto s = slot[i];
            std::sort(s.begin(), s.end());
            t.target_clusters.push_back(s);
        }
    return t;
}

inline std::vector<point_t> random_points(std::size_t n, std::size_t d, unsigned l, std::uint64_t seed)
{
    auto rng = privhc::prg::from_seed(seed, "oracle-points");
    std::vector<point_t> v(n, point_t(d));
    for (auto& p : v)
        for (auto& c : p)
            c = rng.below(std::uint64_t(1) << l);
    return v;
}

// Multiset of (rep_sum, size) from member sets.
inline std::vector<privhc::plainhc::cluster_metadata> metadata_multiset(
    const std::vector<point_t>& pts, const std::vector<std::vector<std::size_t>>& clusters)
{
    std::vector<privhc::plainhc::cluster_metadata> out;
    for (const auto& c : clusters) {
        privhc::plainhc::cluster_metadata m;
        m.rep_sum.assign(pts.front().size(), 0);
        for (auto k : c)
            for (std::size_t j = 0; j < m.rep_sum.size(); ++j)
                m.rep_sum[j] += pts[k][j];
        m.size = c.size();
        out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Word-level cleartext simulator: interprets the recorded op list with plain
// integer arithmetic, independent of the gate lowering.
inline std::vector<word_t> simulate(const privhc::gc::circuit_spec& spec, const std::vector<word_t>& garbler,
                                    const std::vector<word_t>& evaluator)
{
    using privhc::gc::op_kind;
    auto mask = [](word_t v, unsigned w) { return w >= 128 ? v : v & ((word_t(1) << w) - 1); };
    std::vector<word_t> val(spec.ops.size());
    std::size_t gi = 0, ei = 0;
    std::vector<word_t> out;
    for (std::size_t k = 0; k < spec.ops.size(); ++k) {
        const auto& o = spec.ops[k];
        const unsigned w = o.width;
        switch (o.kind) {
        case op_kind::input:
            val[k] = o.owner == privhc::gc::party::garbler ? garbler.at(gi++) : evaluator.at(ei++);
            break;
        case op_kind::add: val[k] = mask(mask(val[o.a], w) + mask(val[o.b], w), w); break;
        case op_kind::sub: val[k] = mask(mask(val[o.a], w) - mask(val[o.b], w), w); break;
        case op_kind::min: val[k] = mask(val[o.b], w) < mask(val[o.a], w); break;
        case op_kind::max: val[k] = mask(val[o.b], w) > mask(val[o.a], w); break;
        case op_kind::mux: val[k] = mask((val[o.a] & 1) ? val[o.c] : val[o.b], w); break;
        case op_kind::con: val[k] = mask(o.value, w); break;
        case op_kind::output: out.push_back(val[o.a]); break;
        }
    }
    return out;
}

} // namespace oracle
