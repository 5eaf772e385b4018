#include "privhc/ahe.hpp"
#include "privhc/cure.hpp"
#include "privhc/prg.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <numeric>
#include <sstream>

namespace privhc::cure {

const char* to_string(variant v)
{
    switch (v) {
    case variant::plain: return "cure";
    case variant::pcure0: return "pcure0";
    case variant::pcure1: return "pcure1";
    case variant::pcure2: return "pcure2";
    }
    return "?";
}

variant parse_variant(const std::string& s)
{
    if (s == "cure" || s == "plain")
        return variant::plain;
    if (s == "pcure0")
        return variant::pcure0;
    if (s == "pcure1")
        return variant::pcure1;
    if (s == "pcure2")
        return variant::pcure2;
    throw usage_error("unknown CURE variant '" + s + "'");
}

const char* to_string(provenance p)
{
    switch (p) {
    case provenance::local_p: return "local-p";
    case provenance::local_q: return "local-q";
    case provenance::joint: return "joint";
    }
    return "?";
}

void params::validate(std::size_t n, std::size_t target, variant v) const
{
    if (s < 1 || s > n)
        throw usage_error("cure: sample size must lie in [1, n]");
    if (p < 1 || q < 1)
        throw usage_error("cure: p and q must be at least 1");
    if (s / (p * q) < 1)
        throw usage_error("cure: s / (p q) must be at least 1");
    if (s / (p * q) < target)
        throw usage_error("cure: s / (p q) is below the target cluster count");
    if (t1 > t2)
        throw usage_error("cure: t1 must not exceed t2");
    if (R < 1)
        throw usage_error("cure: R must be at least 1");
    if ((v == variant::pcure1 || v == variant::pcure2) && R != 1)
        throw usage_error("cure: the joint variants fix R = 1");
    if (v == variant::pcure2 && p != 1)
        throw usage_error("cure: pcure2 fixes p = 1");
}

std::size_t params::a_target(std::size_t sample) const { return std::max<std::size_t>(1, sample / (p * q)); }

std::string params::describe() const
{
    std::ostringstream os;
    os << "s=" << s << ",p=" << p << ",q=" << q << ",t1=" << t1 << ",t2=" << t2 << ",R=" << R;
    return os.str();
}

std::string cluster_model::to_text() const
{
    std::ostringstream os;
    for (const auto& c : clusters) {
        os << to_string(c.source) << ' ' << c.size;
        for (const auto& r : c.reps) {
            os << ' ' << r.weight << ':';
            for (std::size_t t = 0; t < r.sum.size(); ++t)
                os << (t ? "," : "") << word_to_string(r.sum[t]);
        }
        os << '\n';
    }
    return os.str();
}

namespace {

// weight^2 * |x - sum/weight|^2
mpz_class scaled_dist(const representative& r, const point_t& x)
{
    mpz_class acc = 0, t;
    const mpz_class w = ahe::to_mpz(r.weight);
    for (std::size_t c = 0; c < x.size(); ++c) {
        t = w * ahe::to_mpz(x[c]) - ahe::to_mpz(r.sum[c]);
        acc += t * t;
    }
    return acc;
}

// d1 * w1^2 < d2 * w2^2
bool less_scaled(unsigned __int128 d1, std::uint64_t w1, unsigned __int128 d2, std::uint64_t w2)
{
    if ((d1 >> 64) == 0 && (d2 >> 64) == 0 && (w1 >> 32) == 0 && (w2 >> 32) == 0)
        return d1 * (unsigned __int128)(w1 * w1) < d2 * (unsigned __int128)(w2 * w2);
    return ahe::to_mpz(d1) * ahe::to_mpz(w1) * ahe::to_mpz(w1) < ahe::to_mpz(d2) * ahe::to_mpz(w2) * ahe::to_mpz(w2);
}

bool fits_fast(const cluster_model& m, const point_t& x)
{
    // w * x and the sums stay below 2^50, d below 2^20: the squared sum fits in 120 bits
    if (x.size() >= (std::size_t(1) << 20))
        return false;
    for (auto c : x)
        if (c >> 24)
            return false;
    for (const auto& cl : m.clusters)
        for (const auto& r : cl.reps) {
            if (r.weight >> 26)
                return false;
            for (auto s : r.sum)
                if (s >> 50)
                    return false;
        }
    return true;
}

} // namespace

std::size_t classify_one(const cluster_model& m, const point_t& x)
{
    if (m.clusters.empty())
        throw error("classify: empty model");
    std::size_t best = 0;
    bool have = false;
    if (fits_fast(m, x)) {
        // compare d1 / w1^2 against d2 / w2^2 without division
        unsigned __int128 bd = 0;
        std::uint64_t bw = 1;
        for (std::size_t k = 0; k < m.clusters.size(); ++k)
            for (const auto& r : m.clusters[k].reps) {
                unsigned __int128 d = 0;
                for (std::size_t c = 0; c < x.size(); ++c) {
                    const __int128 t = __int128(r.weight) * __int128(x[c]) - __int128(r.sum[c]);
                    d += (unsigned __int128)(t * t);
                }
                bool better = !have;
                if (have) {
                    if (r.weight == bw) {
                        better = d < bd;
                    } else {
                        better = less_scaled(d, bw, bd, r.weight);
                    }
                }
                if (better) {
                    best = k;
                    bd = d;
                    bw = r.weight;
                    have = true;
                }
            }
        return best;
    }
    mpz_class bd;
    std::uint64_t bw = 1;
    for (std::size_t k = 0; k < m.clusters.size(); ++k)
        for (const auto& r : m.clusters[k].reps) {
            mpz_class d = scaled_dist(r, x);
            if (!have || d * ahe::to_mpz(bw) * ahe::to_mpz(bw) < bd * ahe::to_mpz(r.weight) * ahe::to_mpz(r.weight)) {
                best = k;
                bd = d;
                bw = r.weight;
                have = true;
            }
        }
    return best;
}

std::vector<std::size_t> classify(const cluster_model& m, const std::vector<point_t>& pts)
{
    std::vector<std::size_t> out;
    out.reserve(pts.size());
    for (const auto& p : pts)
        out.push_back(classify_one(m, p));
    return out;
}

std::vector<std::size_t> small_clusters(const std::vector<std::uint64_t>& sizes, std::size_t t,
                                        std::size_t keep_at_least)
{
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (sizes[i] < t)
            cand.push_back(i);
    std::stable_sort(cand.begin(), cand.end(), [&](auto a, auto b) { return sizes[a] < sizes[b]; });
    const std::size_t room = sizes.size() > keep_at_least ? sizes.size() - keep_at_least : 0;
    if (cand.size() > room)
        cand.resize(room);
    std::sort(cand.begin(), cand.end());
    return cand;
}

std::vector<std::size_t> sample_rows(std::size_t n, std::size_t s, prg& rng)
{
    if (s > n)
        throw usage_error("cure: sample larger than the data");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < s; ++i)
        std::swap(idx[i], idx[i + rng.below(n - i)]);
    idx.resize(s);
    return idx;
}

std::vector<std::vector<std::size_t>> a_stage(const std::vector<point_t>& sample, const params& prm,
                                              linkage_kind kind, std::size_t keep_at_least)
{
    const std::size_t n = sample.size();
    const std::size_t parts = std::min(prm.p, n);
    const std::size_t per = prm.a_target(n);
    std::vector<std::vector<std::size_t>> out;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < parts; ++k) {
        const std::size_t end = begin + n / parts + (k < n % parts ? 1 : 0);
        std::vector<point_t> part(sample.begin() + std::ptrdiff_t(begin), sample.begin() + std::ptrdiff_t(end));
        auto hc = plainhc::hc_run(part, kind, std::min(per, part.size()));
        for (auto& c : hc.tree.target_clusters) {
            for (auto& i : c)
                i += begin;
            out.push_back(std::move(c));
        }
        begin = end;
    }
    std::vector<std::uint64_t> sizes;
    for (const auto& c : out)
        sizes.push_back(c.size());
    auto drop = small_clusters(sizes, prm.t1, keep_at_least);
    for (auto it = drop.rbegin(); it != drop.rend(); ++it)
        out.erase(out.begin() + std::ptrdiff_t(*it));
    return out;
}

plainhc::sym_matrix set_linkages(const std::vector<point_t>& pts, const std::vector<std::vector<std::size_t>>& sets,
                                 linkage_kind kind)
{
    plainhc::sym_matrix m(sets.size());
    for (std::size_t a = 0; a < sets.size(); ++a)
        for (std::size_t b = a + 1; b < sets.size(); ++b) {
            word_t best = 0;
            bool first = true;
            for (auto x : sets[a])
                for (auto y : sets[b]) {
                    const word_t v = plainhc::sq_dist(pts[x], pts[y]);
                    if (first || (kind == linkage_kind::single ? v < best : v > best))
                        best = v;
                    first = false;
                }
            m.set(a, b, best);
        }
    return m;
}

namespace {

representative centroid_of(const std::vector<point_t>& pts, const std::vector<std::size_t>& members)
{
    representative r;
    r.sum.assign(pts.at(members.front()).size(), 0);
    for (auto i : members)
        for (std::size_t c = 0; c < r.sum.size(); ++c)
            r.sum[c] += pts[i][c];
    r.weight = members.size();
    return r;
}

} // namespace

result cure_plain(const std::vector<point_t>& data, const params& prm, std::uint64_t seed, linkage_kind kind,
                  std::size_t target, provenance tag)
{
    prm.validate(data.size(), target);
    prg rng = prg::from_seed(seed, "cure-sample");
    result res;
    auto rows = sample_rows(data.size(), prm.s, rng);
    std::vector<point_t> sample;
    sample.reserve(rows.size());
    for (auto r : rows)
        sample.push_back(data[r]);
    res.sample = sample.size();

    auto A = a_stage(sample, prm, kind, target);
    res.a_clusters = A.size();

    auto hc = plainhc::hc_matrix(set_linkages(sample, A, kind), kind, std::min(target, A.size()));
    std::vector<std::vector<std::size_t>> B;
    std::vector<std::uint64_t> sizes;
    for (const auto& c : hc.tree.target_clusters) {
        std::vector<std::size_t> pts;
        for (auto a : c)
            pts.insert(pts.end(), A[a].begin(), A[a].end());
        std::sort(pts.begin(), pts.end());
        sizes.push_back(pts.size());
        B.push_back(std::move(pts));
    }
    auto drop = small_clusters(sizes, prm.t2, 1);
    for (std::size_t k = 0, next = 0; k < B.size(); ++k) {
        if (next < drop.size() && drop[next] == k) {
            ++next;
            continue;
        }
        b_cluster bc;
        bc.size = B[k].size();
        bc.source = tag;
        if (prm.R == 1) {
            bc.reps.push_back(centroid_of(sample, B[k]));
        } else {
            auto pick = sample_rows(B[k].size(), std::min(prm.R, B[k].size()), rng);
            for (auto i : pick)
                bc.reps.push_back(centroid_of(sample, {B[k][i]}));
        }
        res.model.clusters.push_back(std::move(bc));
    }
    res.labels = classify(res.model, data);
    return res;
}

} // namespace privhc::cure
