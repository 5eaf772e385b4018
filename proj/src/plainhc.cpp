#include "privhc/plainhc.hpp"

#include "privhc/prg.hpp"

#include <algorithm>
#include <map>

namespace privhc::plainhc {

word_t sq_dist(const point_t& a, const point_t& b)
{
    if (a.size() != b.size())
        throw error("sq_dist: dimension mismatch");
    word_t s = 0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        word_t diff = a[c] > b[c] ? a[c] - b[c] : b[c] - a[c];
        s += diff * diff;
    }
    return s;
}

word_t linkage(const std::vector<point_t>& x, const std::vector<point_t>& y, linkage_kind kind)
{
    if (x.empty() || y.empty())
        throw error("linkage: empty cluster");
    bool first = true;
    word_t best = 0;
    for (const auto& a : x)
        for (const auto& b : y) {
            word_t v = sq_dist(a, b);
            if (first || (kind == linkage_kind::single ? v < best : v > best))
                best = v;
            first = false;
        }
    return best;
}

sym_matrix distance_matrix(const std::vector<point_t>& pts)
{
    sym_matrix m(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            m.set(i, j, sq_dist(pts[i], pts[j]));
    return m;
}

namespace {

struct row_min_cache {
    const sym_matrix& m;
    const std::vector<char>& active;
    std::vector<word_t> value;
    std::vector<std::size_t> arg;

    row_min_cache(const sym_matrix& mm, const std::vector<char>& act)
        : m(mm), active(act), value(mm.size(), 0), arg(mm.size(), npos)
    {
        for (std::size_t i = 0; i < m.size(); ++i)
            rescan(i);
    }

    void rescan(std::size_t i)
    {
        arg[i] = npos;
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            if (!active[j])
                continue;
            word_t v = m.at(i, j);
            if (arg[i] == npos || v < value[i]) {
                value[i] = v;
                arg[i] = j;
            }
        }
    }
};

} // namespace

hc_trace hc_matrix(sym_matrix m, linkage_kind kind, std::size_t target, const end_predicate& end)
{
    const std::size_t n = m.size();
    if (target < 1 || target > n)
        throw error("hc_run: target cluster count out of range");

    std::vector<char> active(n, 1);
    std::vector<std::size_t> slot_id(n);
    std::vector<std::vector<std::size_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) {
        slot_id[i] = i;
        members[i] = {i};
    }

    hc_trace out;
    out.tree.leaf_count = n;
    row_min_cache rows(m, active);

    std::size_t active_count = n;
    for (std::size_t round = 0; active_count > target; ++round) {
        std::size_t i = npos;
        for (std::size_t r = 0; r < n; ++r) {
            if (!active[r] || rows.arg[r] == npos)
                continue;
            if (i == npos || rows.value[r] < rows.value[i])
                i = r;
        }
        const std::size_t j = rows.arg[i];
        const word_t h = rows.value[i];
        if (end && end(active_count, h))
            break;

        out.tree.merges.push_back({round, slot_id[i], slot_id[j], n + round});
        out.slot_pairs.emplace_back(i, j);
        out.heights.push_back(h);
        slot_id[i] = n + round;
        members[i].insert(members[i].end(), members[j].begin(), members[j].end());
        members[j].clear();

        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == i || k == j)
                continue;
            word_t a = m.at(i, k), b = m.at(j, k);
            m.set(i, k, kind == linkage_kind::single ? std::min(a, b) : std::max(a, b));
        }
        active[j] = 0;
        --active_count;

        rows.rescan(i);
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == i)
                continue;
            if (rows.arg[k] == i || rows.arg[k] == j) {
                rows.rescan(k);
            } else if (k < i) {
                word_t v = m.at(k, i);
                if (rows.arg[k] == npos || v < rows.value[k] || (v == rows.value[k] && i < rows.arg[k])) {
                    rows.value[k] = v;
                    rows.arg[k] = i;
                }
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!active[i])
            continue;
        auto mem = members[i];
        std::sort(mem.begin(), mem.end());
        out.tree.target_clusters.push_back(std::move(mem));
    }
    return out;
}

cluster_metadata metadata_of(const std::vector<point_t>& data, const std::vector<std::size_t>& members)
{
    cluster_metadata md;
    md.rep_sum.assign(data.empty() ? 0 : data[0].size(), 0);
    for (auto k : members) {
        for (std::size_t c = 0; c < md.rep_sum.size(); ++c)
            md.rep_sum[c] += data[k][c];
    }
    md.size = members.size();
    return md;
}

hc_result hc_run(const std::vector<point_t>& data, linkage_kind kind, std::size_t target, const end_predicate& end)
{
    for (const auto& p : data)
        if (p.size() != data.front().size())
            throw error("hc_run: inconsistent dimension");
    hc_result r;
    r.tree = hc_matrix(distance_matrix(data), kind, target, end).tree;
    for (const auto& c : r.tree.target_clusters)
        r.meta.push_back(metadata_of(data, c));
    return r;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed)
{
    prg rng = prg::from_seed(seed, "ideal-permutation");
    return random_permutation(n, rng);
}

std::vector<std::size_t> compose(const std::vector<std::size_t>& first, const std::vector<std::size_t>& second)
{
    if (first.size() != second.size())
        throw error("compose: size mismatch");
    std::vector<std::size_t> out(first.size());
    for (std::size_t k = 0; k < second.size(); ++k)
        out[k] = first.at(second[k]);
    return out;
}

ideal_output ideal_fhc(const std::vector<point_t>& p, const std::vector<point_t>& q, linkage_kind kind,
                       std::size_t target, selection select, const std::vector<std::size_t>& order)
{
    std::vector<point_t> joint = p;
    joint.insert(joint.end(), q.begin(), q.end());
    if (order.size() != joint.size())
        throw error("ideal_fhc: permutation size mismatch");
    auto permuted = apply_permutation(joint, order);

    ideal_output out;
    out.permutation = order;
    auto res = hc_run(permuted, kind, target);
    out.tree = res.tree;

    const std::size_t n = permuted.size();
    std::vector<cluster_metadata> by_id(n + out.tree.merges.size());
    for (std::size_t i = 0; i < n; ++i)
        by_id[i] = metadata_of(permuted, {i});
    for (const auto& m : out.tree.merges) {
        auto& md = by_id[m.parent];
        md = by_id[m.left];
        for (std::size_t c = 0; c < md.rep_sum.size(); ++c)
            md.rep_sum[c] += by_id[m.right].rep_sum[c];
        md.size += by_id[m.right].size;
        if (select.k == selection::kind::s_merging && by_id[m.left].size > select.s && by_id[m.right].size > select.s)
            out.metadata.push_back({m.parent, md});
    }
    if (select.k == selection::kind::target) {
        // roots: ids never consumed as a merge child
        std::vector<char> consumed(by_id.size(), 0);
        for (const auto& m : out.tree.merges)
            consumed[m.left] = consumed[m.right] = 1;
        for (std::size_t id = 0; id < by_id.size(); ++id)
            if (!consumed[id])
                out.metadata.push_back({id, by_id[id]});
    }
    return out;
}

ideal_output ideal_fhc(const std::vector<point_t>& p, const std::vector<point_t>& q, linkage_kind kind,
                       std::size_t target, selection select, std::uint64_t perm_seed)
{
    return ideal_fhc(p, q, kind, target, select, seeded_permutation(p.size() + q.size(), perm_seed));
}

double accuracy(const std::vector<std::vector<std::size_t>>& clusters, const std::vector<std::int64_t>& labels,
                const std::vector<bool>* exclude)
{
    if (clusters.empty())
        throw error("accuracy: empty clustering");
    auto skip = [&](std::size_t k) { return exclude && (*exclude)[k]; };
    std::size_t total = 0;
    for (std::size_t k = 0; k < labels.size(); ++k)
        total += !skip(k);
    if (total == 0)
        throw error("accuracy: no labeled points");

    std::size_t correct = 0;
    for (const auto& c : clusters) {
        std::map<std::int64_t, std::size_t> tally;
        for (auto k : c) {
            if (k >= labels.size())
                throw error("accuracy: clustered point without label");
            if (!skip(k))
                ++tally[labels[k]];
        }
        std::size_t best = 0;
        for (const auto& [label, count] : tally)
            best = std::max(best, count); // map order: ties go to the smallest label
        correct += best;
    }
    return double(correct) / double(total);
}

double accuracy_of_assignment(const std::vector<std::size_t>& assignment, const std::vector<std::int64_t>& labels,
                              const std::vector<bool>* exclude)
{
    std::size_t k = 0;
    for (auto a : assignment)
        if (a != npos)
            k = std::max(k, a + 1);
    std::vector<std::vector<std::size_t>> clusters(k);
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != npos)
            clusters[assignment[i]].push_back(i);
    std::erase_if(clusters, [](const auto& c) { return c.empty(); });
    return accuracy(clusters, labels, exclude);
}

} // namespace privhc::plainhc
