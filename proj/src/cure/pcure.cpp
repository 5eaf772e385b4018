#include "../protocol/powers.hpp"
#include "privhc/codec.hpp"
#include "privhc/cure.hpp"
#include "privhc/prg.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

namespace privhc::cure {

using protocol::role;
namespace detail = protocol::detail;

protocol::config make_config(variant v, linkage_kind kind, std::size_t target, unsigned l, unsigned d,
                             const params& prm, unsigned key_bits, bool opt)
{
    protocol::config c;
    c.variant = to_string(v);
    c.kind = kind;
    c.target = target;
    c.l = l;
    c.d = d;
    c.key_bits = key_bits;
    c.opt = opt;
    c.extra = prm.describe();
    return c;
}

std::size_t local_share(std::size_t total, role r) { return r == role::p1 ? (total + 1) / 2 : total / 2; }

namespace {

std::vector<point_t> draw_sample(const std::vector<point_t>& own, std::size_t s, std::uint64_t seed, role r)
{
    prg rng = prg::from_seed(seed, std::string("cure-sample-") + protocol::to_string(r));
    auto rows = sample_rows(own.size(), std::min(s, own.size()), rng);
    std::vector<point_t> out;
    out.reserve(rows.size());
    for (auto i : rows)
        out.push_back(own[i]);
    return out;
}

void check_own(const protocol::party_context& ctx, const std::vector<point_t>& own)
{
    if (own.empty())
        throw usage_error(std::string("cure: party ") + protocol::to_string(ctx.who()) + " has no data");
    for (const auto& p : own)
        if (p.size() != ctx.cfg().d)
            throw usage_error("cure: point dimension differs from configured d");
}

void put_model(writer& w, const cluster_model& m, std::size_t d)
{
    w.u32(std::uint32_t(m.clusters.size()));
    w.u32(std::uint32_t(d));
    for (const auto& c : m.clusters) {
        w.u64(c.size);
        w.u32(std::uint32_t(c.reps.size()));
        for (const auto& r : c.reps) {
            w.u64(r.weight);
            for (auto s : r.sum)
                w.word(s, 16);
        }
    }
}

cluster_model get_model(const std::vector<std::uint8_t>& msg, std::size_t d, provenance tag)
{
    reader r(msg);
    cluster_model m;
    const std::size_t count = r.u32();
    if (r.u32() != d)
        throw error("cure: peer model dimension disagrees");
    for (std::size_t k = 0; k < count; ++k) {
        b_cluster c;
        c.size = r.u64();
        c.source = tag;
        const std::size_t reps = r.u32();
        if (reps == 0)
            throw error("cure: peer cluster without representatives");
        for (std::size_t j = 0; j < reps; ++j) {
            representative rep;
            rep.weight = r.u64();
            for (std::size_t t = 0; t < d; ++t)
                rep.sum.push_back(r.word(16));
            c.reps.push_back(std::move(rep));
        }
        m.clusters.push_back(std::move(c));
    }
    r.expect_end();
    return m;
}

// Runs the MinDist/MaxDist circuit on many instances in bounded slices.
std::vector<word_t> update_batch(protocol::party_context& ctx, std::vector<std::vector<word_t>>& in)
{
    constexpr std::size_t slice = std::size_t(1) << 14;
    std::vector<word_t> out(in.size());
    for (std::size_t b = 0; b < in.size(); b += slice) {
        const std::size_t e = std::min(in.size(), b + slice);
        std::vector<std::vector<word_t>> part(std::make_move_iterator(in.begin() + std::ptrdiff_t(b)),
                                              std::make_move_iterator(in.begin() + std::ptrdiff_t(e)));
        auto res = ctx.gc().run(ctx.update_circuit(), part, gc::reveal::evaluator_only);
        for (std::size_t k = b; k < e; ++k)
            out[k] = ctx.who() == role::p1 ? part[k - b][2] : res[k - b].at(0);
    }
    return out;
}

std::vector<std::uint32_t> set_sizes(const std::vector<std::vector<std::size_t>>& sets)
{
    std::vector<std::uint32_t> s;
    for (const auto& x : sets)
        s.push_back(std::uint32_t(x.size()));
    return s;
}

void put_sizes(writer& w, const std::vector<std::uint32_t>& s)
{
    w.u32(std::uint32_t(s.size()));
    for (auto v : s)
        w.u32(v);
}

std::vector<std::uint32_t> get_sizes(reader& r)
{
    std::vector<std::uint32_t> s(r.u32());
    for (auto& v : s) {
        v = r.u32();
        if (v == 0)
            throw error("cure: empty peer set");
    }
    return s;
}

std::size_t total(const std::vector<std::uint32_t>& s)
{
    std::size_t t = 0;
    for (auto v : s)
        t += v;
    return t;
}

} // namespace

protocol::cross_shares cross_linkages(protocol::party_context& ctx, const std::vector<point_t>& own,
                                      const std::vector<std::vector<std::size_t>>& sets)
{
    ctx.start();
    ctx.enter("cross");
    auto& s = ctx.wire();
    auto& rng = ctx.rng();
    const auto& pkd = ctx.data_key();
    const auto w = ctx.w();
    const std::size_t d = ctx.cfg().d;
    const auto mine = set_sizes(sets);
    std::vector<std::size_t> order; // own points, set-major
    for (const auto& x : sets)
        order.insert(order.end(), x.begin(), x.end());

    std::vector<std::uint32_t> rows, cols;
    // blinded pointwise distances, p1-point-major: r at p1, dist + r at p2
    std::vector<word_t> pw;
    const std::size_t ct = pkd.ciphertext_bytes();

    if (ctx.who() == role::p2) {
        cols = mine;
        writer hw;
        put_sizes(hw, mine);
        hw.u32(std::uint32_t(d));
        s.send(net::tag::setup_cross, std::move(hw.buf));
        {
            net::chunk_writer out(s, net::tag::setup_cross);
            for (auto i : order)
                for (std::size_t c = 0; c < d; ++c) {
                    const mpz_class q = mpz_class(own[i][c]);
                    ahe::put_ciphertext(out.room(ct), pkd, ahe::encrypt(pkd, (pkd.n() - 2 * q) % pkd.n(), rng));
                    ahe::put_ciphertext(out.room(ct), pkd, ahe::encrypt(pkd, q * q, rng));
                }
            out.flush();
        }
        auto head = s.recv(net::tag::setup_cross);
        reader hr(head);
        rows = get_sizes(hr);
        hr.expect_end();
        const std::size_t n1 = total(rows), n2 = order.size();
        pw.resize(n1 * n2);
        net::chunk_reader in(s, net::tag::setup_cross);
        for (auto& v : pw) {
            const std::uint8_t* p = in.take(ct);
            v = ahe::to_word(ctx.own().sk.decrypt_small(ahe::get_ciphertext(p, p + ct, pkd), w.kappa + 1));
            if (v >> (w.kappa + 1))
                throw error("cure: blinded cross distance too wide");
        }
        if (!in.drained())
            throw error("cure: surplus cross data");
    } else {
        rows = mine;
        auto head = s.recv(net::tag::setup_cross);
        reader hr(head);
        cols = get_sizes(hr);
        if (hr.u32() != d)
            throw error("cure: peer dimension disagrees");
        hr.expect_end();
        const std::size_t n1 = order.size(), n2 = total(cols);
        std::vector<detail::power_table> tables;
        std::vector<mpz_class> h3prod(n2);
        {
            net::chunk_reader in(s, net::tag::setup_cross);
            for (std::size_t b = 0; b < n2; ++b) {
                std::vector<ahe::ciphertext> h2;
                h3prod[b] = 1;
                for (std::size_t c = 0; c < d; ++c) {
                    const std::uint8_t* p = in.take(ct);
                    h2.push_back(ahe::get_ciphertext(p, p + ct, pkd));
                    p = in.take(ct);
                    h3prod[b] = (h3prod[b] * ahe::get_ciphertext(p, p + ct, pkd).value) % pkd.n2();
                }
                tables.push_back(detail::build_powers(h2, ctx.cfg().l, pkd.n2()));
            }
            if (!in.drained())
                throw error("cure: surplus cross helper data");
        }
        writer hw;
        put_sizes(hw, mine);
        s.send(net::tag::setup_cross, std::move(hw.buf));
        pw.resize(n1 * n2);
        net::chunk_writer out(s, net::tag::setup_cross);
        for (std::size_t a = 0; a < n1; ++a) {
            const point_t& x = own[order[a]];
            const mpz_class norm = ahe::to_mpz(detail::sq_norm(x));
            for (std::size_t b = 0; b < n2; ++b) {
                const word_t r = rng.bits(w.kappa);
                pw[a * n2 + b] = r;
                auto e = ahe::encrypt(pkd, norm + ahe::to_mpz(r), rng);
                e.value = detail::multi_pow(tables[b], x, e.value * h3prod[b] % pkd.n2(), pkd.n2());
                ahe::put_ciphertext(out.room(ct), pkd, e);
            }
        }
        out.flush();
    }

    // reduce each (row set, col set) block to one shared linkage
    const std::size_t n2 = total(cols);
    std::vector<std::size_t> row_off{0}, col_off{0};
    for (auto v : rows)
        row_off.push_back(row_off.back() + v);
    for (auto v : cols)
        col_off.push_back(col_off.back() + v);
    std::vector<std::vector<word_t>> groups(rows.size() * cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            auto& g = groups[i * cols.size() + j];
            g.reserve(std::size_t(rows[i]) * cols[j]);
            for (std::size_t a = row_off[i]; a < row_off[i + 1]; ++a)
                for (std::size_t b = col_off[j]; b < col_off[j + 1]; ++b)
                    g.push_back(pw[a * n2 + b]);
        }
    pw.clear();
    pw.shrink_to_fit();

    for (;;) {
        std::vector<std::vector<word_t>> in;
        for (auto& g : groups)
            for (std::size_t k = 0; k + 1 < g.size(); k += 2) {
                if (ctx.who() == role::p1)
                    in.push_back({g[k], g[k + 1], rng.bits(w.kappa)});
                else
                    in.push_back({g[k], g[k + 1]});
            }
        if (in.empty())
            break;
        auto res = update_batch(ctx, in);
        std::size_t t = 0;
        for (auto& g : groups) {
            std::vector<word_t> next;
            for (std::size_t k = 0; k + 1 < g.size(); k += 2)
                next.push_back(res[t++]);
            if (g.size() % 2)
                next.push_back(g.back());
            g = std::move(next);
        }
    }

    protocol::cross_shares cs;
    cs.rows = rows.size();
    cs.cols = cols.size();
    for (auto& g : groups)
        cs.share.push_back(g.at(0));
    return cs;
}

result pcure0(protocol::party_context& ctx, const std::vector<point_t>& own, const params& prm, std::uint64_t seed)
{
    check_own(ctx, own);
    auto& s = ctx.wire();
    ctx.enter("handshake");
    s.handshake(ctx.cfg().hash());

    ctx.enter("local");
    const std::size_t target = ctx.who() == role::p1 ? (ctx.cfg().target + 1) / 2
                                                     : std::max<std::size_t>(1, ctx.cfg().target / 2);
    params local = prm;
    local.s = std::min(own.size(), local_share(prm.s, ctx.who()));
    const auto tag = ctx.who() == role::p1 ? provenance::local_p : provenance::local_q;
    const std::uint64_t sub = seed * 2 + (ctx.who() == role::p2 ? 1 : 0);
    auto mine = cure_plain(own, local, sub, ctx.cfg().kind, std::min(target, local.a_target(local.s)), tag);

    ctx.enter("exchange");
    writer w;
    put_model(w, mine.model, ctx.cfg().d);
    cluster_model theirs;
    const auto peer_tag = ctx.who() == role::p1 ? provenance::local_q : provenance::local_p;
    if (ctx.who() == role::p1) {
        s.send(net::tag::cure_reps, std::move(w.buf));
        theirs = get_model(s.recv(net::tag::cure_reps), ctx.cfg().d, peer_tag);
    } else {
        theirs = get_model(s.recv(net::tag::cure_reps), ctx.cfg().d, peer_tag);
        s.send(net::tag::cure_reps, std::move(w.buf));
    }

    ctx.enter("classify");
    result res;
    res.sample = mine.sample;
    res.a_clusters = mine.a_clusters;
    const auto& first = ctx.who() == role::p1 ? mine.model : theirs;
    const auto& second = ctx.who() == role::p1 ? theirs : mine.model;
    res.model.clusters = first.clusters;
    res.model.clusters.insert(res.model.clusters.end(), second.clusters.begin(), second.clusters.end());
    res.labels = classify(res.model, own);
    return res;
}

namespace {

void joint_cluster(protocol::party_context& ctx, protocol::split_state& st,
                   std::optional<protocol::rowmin_state>& rm, std::size_t stop_at)
{
    if (ctx.cfg().opt) {
        if (!rm)
            rm = protocol::opt_init(ctx, st);
        protocol::opt_cluster(ctx, st, *rm, stop_at);
    } else {
        protocol::cluster(ctx, st, stop_at);
    }
}

cluster_model model_of(const std::vector<protocol::target_output>& out, std::size_t d, bool weighted,
                       std::size_t t2)
{
    std::vector<std::uint64_t> weights;
    for (const auto& t : out)
        weights.push_back(weighted ? std::uint64_t(t.sums.at(d)) : t.size);
    auto drop = small_clusters(weights, t2, 1);
    cluster_model m;
    for (std::size_t k = 0, next = 0; k < out.size(); ++k) {
        if (next < drop.size() && drop[next] == k) {
            ++next;
            continue;
        }
        b_cluster c;
        c.size = weights[k];
        c.source = provenance::joint;
        representative r;
        r.sum.assign(out[k].sums.begin(), out[k].sums.begin() + std::ptrdiff_t(d));
        r.weight = weights[k];
        c.reps.push_back(std::move(r));
        m.clusters.push_back(std::move(c));
    }
    return m;
}

} // namespace

result pcure1(protocol::party_context& ctx, const std::vector<point_t>& own, const params& prm, std::uint64_t seed)
{
    check_own(ctx, own);
    if (prm.R != 1)
        throw usage_error("pcure1 fixes R = 1");
    const std::size_t d = ctx.cfg().d;
    const auto kind = ctx.cfg().kind;
    ctx.start();

    ctx.enter("local");
    auto sample = draw_sample(own, local_share(prm.s, ctx.who()), seed, ctx.who());
    auto A = a_stage(sample, prm, kind, 1);

    auto cross = cross_linkages(ctx, sample, A);

    protocol::setup_input in;
    for (const auto& set : A) {
        std::vector<std::uint64_t> v(d + 1, 0);
        for (auto i : set)
            for (std::size_t c = 0; c < d; ++c)
                v[c] += sample[i][c];
        v[d] = set.size();
        in.values.push_back(std::move(v));
    }
    in.intra = set_linkages(sample, A, kind);
    auto st = protocol::setup(ctx, in, &cross);
    if (st.n < ctx.cfg().target)
        throw usage_error("pcure1: fewer A-clusters than target clusters");

    std::optional<protocol::rowmin_state> rm;
    joint_cluster(ctx, st, rm, 0);
    auto out = protocol::output(ctx, st);

    ctx.enter("classify");
    result res;
    res.sample = sample.size();
    res.a_clusters = st.n;
    res.model = model_of(out, d, true, prm.t2);
    res.labels = classify(res.model, own);
    res.comparators = ctx.gc().counters().comparators;
    return res;
}

result pcure2(protocol::party_context& ctx, const std::vector<point_t>& own, const params& prm, std::uint64_t seed)
{
    check_own(ctx, own);
    if (prm.R != 1 || prm.p != 1)
        throw usage_error("pcure2 fixes p = 1 and R = 1");
    const std::size_t d = ctx.cfg().d;
    ctx.start();

    ctx.enter("local");
    auto sample = draw_sample(own, local_share(prm.s, ctx.who()), seed, ctx.who());
    auto st = protocol::setup(ctx, protocol::setup_input::from_points(sample));
    if (st.n < ctx.cfg().target)
        throw usage_error("pcure2: joint sample smaller than target clusters");

    // stage A down to s/q clusters, then drop small ones on public sizes
    const std::size_t a_count = std::max(ctx.cfg().target, std::max<std::size_t>(1, st.n / prm.q));
    std::optional<protocol::rowmin_state> rm;
    joint_cluster(ctx, st, rm, a_count);
    {
        auto act = st.sigma.active_slots();
        std::vector<std::uint64_t> sizes;
        for (auto k : act)
            sizes.push_back(st.sigma.members(k).size());
        for (auto i : small_clusters(sizes, prm.t1, ctx.cfg().target))
            st.sigma.eliminate(act[i]);
        if (rm)
            protocol::opt_repair(ctx, st, *rm);
    }
    // stage B continues on the surviving state
    joint_cluster(ctx, st, rm, 0);
    {
        auto act = st.sigma.active_slots();
        std::vector<std::uint64_t> sizes;
        for (auto k : act)
            sizes.push_back(st.sigma.members(k).size());
        for (auto i : small_clusters(sizes, prm.t2, 1))
            st.sigma.eliminate(act[i]);
    }
    auto out = protocol::output(ctx, st);

    ctx.enter("classify");
    result res;
    res.sample = sample.size();
    res.a_clusters = a_count;
    res.model = model_of(out, d, false, 0);
    res.labels = classify(res.model, own);
    res.comparators = ctx.gc().counters().comparators;
    return res;
}

result run_variant(variant v, protocol::party_context& ctx, const std::vector<point_t>& own, const params& prm,
                   std::uint64_t seed)
{
    switch (v) {
    case variant::pcure0: return pcure0(ctx, own, prm, seed);
    case variant::pcure1: return pcure1(ctx, own, prm, seed);
    case variant::pcure2: return pcure2(ctx, own, prm, seed);
    case variant::plain: break;
    }
    throw usage_error("run_variant: plain CURE is not a two-party variant");
}

} // namespace privhc::cure
