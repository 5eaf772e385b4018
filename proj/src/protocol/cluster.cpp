#include "privhc/protocol/pca.hpp"

#include <spdlog/spdlog.h>

namespace privhc::protocol {

namespace {

using gc::reveal;

// This party's share of linkage (a, b).
inline word_t share_of(const party_context& ctx, const split_state& st, std::size_t a, std::size_t b)
{
    return ctx.who() == role::p1 ? st.R.at(a, b) : st.B.at(a, b);
}

inline void store(const party_context& ctx, split_state& st, std::size_t a, std::size_t b, word_t v)
{
    if (ctx.who() == role::p1)
        st.R.set(a, b, v);
    else
        st.B.set(a, b, v);
}

// Index of the first minimum among the shared values; both parties learn it.
std::size_t shared_argmin(party_context& ctx, const std::vector<word_t>& mine)
{
    if (mine.size() == 1)
        return 0;
    auto out = ctx.gc().run_one(ctx.argmin(mine.size()), mine, reveal::both);
    if (out.size() != 1 || out[0] >= mine.size())
        throw error("cluster: argmin index out of range");
    return std::size_t(out[0]);
}

// Batched argmin over equal-length vectors.
std::vector<std::size_t> shared_argmins(party_context& ctx, const std::vector<std::vector<word_t>>& rows)
{
    std::vector<std::size_t> out(rows.size(), 0);
    if (rows.empty() || rows.front().size() == 1)
        return out;
    auto res = ctx.gc().run(ctx.argmin(rows.front().size()), rows, reveal::both);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (res[i][0] >= rows[i].size())
            throw error("cluster: argmin index out of range");
        out[i] = std::size_t(res[i][0]);
    }
    return out;
}

// MinDist/MaxDist for every k: new linkage (i,k) from (i,k) and (j,k) under
// a fresh blind X picked by p1. Returns this party's new shares.
std::vector<word_t> update_linkages(party_context& ctx, const split_state& st, std::size_t i, std::size_t j,
                                    const std::vector<std::size_t>& ks)
{
    if (ks.empty())
        return {};
    std::vector<std::vector<word_t>> in(ks.size());
    std::vector<word_t> fresh(ks.size());
    for (std::size_t t = 0; t < ks.size(); ++t) {
        const auto k = ks[t];
        if (ctx.who() == role::p1) {
            fresh[t] = ctx.rng().bits(ctx.w().kappa);
            in[t] = {st.R.at(i, k), st.R.at(j, k), fresh[t]};
        } else {
            in[t] = {st.B.at(i, k), st.B.at(j, k)};
        }
    }
    auto res = ctx.gc().run(ctx.update_circuit(), in, reveal::evaluator_only);
    if (ctx.who() == role::p2)
        for (std::size_t t = 0; t < ks.size(); ++t)
            fresh[t] = res[t].at(0);
    return fresh;
}

std::vector<std::size_t> others(const merge_history& sg, std::size_t a, std::size_t b)
{
    std::vector<std::size_t> out;
    for (auto k : sg.active_slots())
        if (k != a && k != b)
            out.push_back(k);
    return out;
}

} // namespace

void cluster(party_context& ctx, split_state& st, std::size_t stop_at)
{
    ctx.enter("cluster");
    const std::size_t target = std::max(ctx.cfg().target, stop_at);
    while (st.sigma.active_count() > target) {
        const auto c0 = ctx.gc().counters().comparators;
        auto act = st.sigma.active_slots();
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        std::vector<word_t> mine;
        pairs.reserve(act.size() * (act.size() - 1) / 2);
        mine.reserve(pairs.capacity());
        for (std::size_t x = 0; x < act.size(); ++x)
            for (std::size_t y = x + 1; y < act.size(); ++y) {
                pairs.emplace_back(act[x], act[y]);
                mine.push_back(share_of(ctx, st, act[x], act[y]));
            }
        const auto [i, j] = pairs[shared_argmin(ctx, mine)];
        auto ks = others(st.sigma, i, j);
        auto fresh = update_linkages(ctx, st, i, j, ks);
        for (std::size_t t = 0; t < ks.size(); ++t)
            store(ctx, st, i, ks[t], fresh[t]);
        st.sigma.merge(i, j);
        ctx.cluster_comparators += ctx.gc().counters().comparators - c0;
        ++ctx.cluster_rounds;
    }
    spdlog::debug("{}: clustering stopped at {} clusters after {} rounds", to_string(ctx.who()),
                  st.sigma.active_count(), st.sigma.rounds());
}

namespace {

// Recomputes the row minimum of each listed row over all other active slots.
void recompute_rows(party_context& ctx, const split_state& st, rowmin_state& rm, const std::vector<std::size_t>& rows)
{
    if (rows.empty())
        return;
    auto act = st.sigma.active_slots();
    std::vector<std::vector<std::size_t>> cols(rows.size());
    std::vector<std::vector<word_t>> vals(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (auto c : act)
            if (c != rows[r]) {
                cols[r].push_back(c);
                vals[r].push_back(share_of(ctx, st, rows[r], c));
            }
    }
    if (cols.front().empty()) {
        for (auto r : rows)
            rm.J[r] = plainhc::npos;
        return;
    }
    auto idx = shared_argmins(ctx, vals);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rm.J[rows[r]] = cols[r][idx[r]];
        rm.share[rows[r]] = vals[r][idx[r]];
    }
}

} // namespace

rowmin_state opt_init(party_context& ctx, const split_state& st)
{
    if (ctx.cfg().kind != linkage_kind::single)
        throw usage_error("opt_init: row minima require single linkage");
    ctx.enter("opt-init");
    rowmin_state rm;
    rm.J.assign(st.n, plainhc::npos);
    rm.share.assign(st.n, 0);
    recompute_rows(ctx, st, rm, st.sigma.active_slots());
    return rm;
}

void opt_repair(party_context& ctx, const split_state& st, rowmin_state& rm)
{
    std::vector<std::size_t> rows;
    for (auto k : st.sigma.active_slots())
        if (rm.J[k] == plainhc::npos || !st.sigma.active(rm.J[k]))
            rows.push_back(k);
    for (std::size_t k = 0; k < st.n; ++k)
        if (!st.sigma.active(k))
            rm.J[k] = plainhc::npos;
    recompute_rows(ctx, st, rm, rows);
}

void opt_cluster(party_context& ctx, split_state& st, rowmin_state& rm, std::size_t stop_at)
{
    if (ctx.cfg().kind != linkage_kind::single)
        throw usage_error("opt_cluster: row minima require single linkage");
    ctx.enter("cluster");
    const std::size_t target = std::max(ctx.cfg().target, stop_at);
    while (st.sigma.active_count() > target) {
        const auto c0 = ctx.gc().counters().comparators;
        auto act = st.sigma.active_slots();
        std::vector<word_t> mine;
        for (auto r : act)
            mine.push_back(rm.share[r]);
        const std::size_t row = act[shared_argmin(ctx, mine)];
        const std::size_t col = rm.J[row];
        if (col == plainhc::npos || !st.sigma.active(col))
            throw error("opt_cluster: stale row minimum");
        const std::size_t i = std::min(row, col), j = std::max(row, col);

        auto ks = others(st.sigma, i, j);
        auto fresh = update_linkages(ctx, st, i, j, ks);
        for (std::size_t t = 0; t < ks.size(); ++t)
            store(ctx, st, i, ks[t], fresh[t]);

        // each other row: keep its minimum or take the fresh entry at column
        // i; operands in column order so ties keep the smaller column
        if (!ks.empty()) {
            std::vector<std::vector<word_t>> pairs(ks.size());
            std::vector<char> fresh_first(ks.size());
            for (std::size_t t = 0; t < ks.size(); ++t) {
                const auto k = ks[t];
                fresh_first[t] = rm.J[k] >= i;
                pairs[t] = fresh_first[t] ? std::vector<word_t>{fresh[t], rm.share[k]}
                                          : std::vector<word_t>{rm.share[k], fresh[t]};
            }
            auto idx = shared_argmins(ctx, pairs);
            for (std::size_t t = 0; t < ks.size(); ++t) {
                const bool take = (idx[t] == 0) == bool(fresh_first[t]);
                if (take) {
                    rm.J[ks[t]] = i;
                    rm.share[ks[t]] = fresh[t];
                }
            }
        }
        st.sigma.merge(i, j);
        rm.J[j] = plainhc::npos;
        for (auto k : ks)
            if (rm.J[k] == j) {
                rm.J[k] = i;
                rm.share[k] = share_of(ctx, st, k, i);
            }
        recompute_rows(ctx, st, rm, {i});
        ctx.cluster_comparators += ctx.gc().counters().comparators - c0;
        ++ctx.cluster_rounds;
    }
}

} // namespace privhc::protocol
