#pragma once
// Runs both protocol parties in one process and keeps both halves of the
// state for white-box checks.

#include "privhc/protocol/run.hpp"

#include <algorithm>

namespace harness {

using namespace privhc;
using protocol::role;

enum class stop { setup, cluster, output };

struct result {
    protocol::split_state st1, st2;
    std::vector<protocol::target_output> out1, out2;
    std::vector<std::size_t> composite;
    std::uint64_t comparators = 0, rounds = 0;
    ahe::secret_key sk2;
    ahe::public_key pkd;
    std::map<net::tag, net::counters> tags1, tags2;
    net::counters total1, total2;
};

inline protocol::config make_config(linkage_kind kind, std::size_t target, unsigned l, unsigned d, bool opt = false,
                                    unsigned key_bits = 512)
{
    protocol::config c;
    c.kind = kind;
    c.target = target;
    c.l = l;
    c.d = d;
    c.opt = opt;
    c.key_bits = key_bits;
    c.variant = opt ? "opt" : "pca";
    return c;
}

inline result run(const std::vector<point_t>& P, const std::vector<point_t>& Q, const protocol::config& cfg,
                  std::uint64_t seed, stop upto = stop::output)
{
    result r;
    auto [s1, s2] = net::inprocess_pair();
    auto body = [&](net::session& s, role who) {
        protocol::party_context ctx(who, s, cfg, seed * 2 + (who == role::p2), true);
        auto st = protocol::setup(ctx, protocol::setup_input::from_points(who == role::p1 ? P : Q));
        if (upto != stop::setup) {
            if (cfg.opt) {
                auto rm = protocol::opt_init(ctx, st);
                protocol::opt_cluster(ctx, st, rm);
            } else {
                protocol::cluster(ctx, st);
            }
        }
        std::vector<protocol::target_output> out;
        if (upto == stop::output)
            out = protocol::output(ctx, st);
        if (who == role::p1) {
            r.comparators = ctx.cluster_comparators;
            r.rounds = ctx.cluster_rounds;
            r.st1 = std::move(st);
            r.out1 = std::move(out);
            r.tags1 = s.stats().by_tag();
            r.total1 = s.stats().total();
        } else {
            r.sk2 = ctx.own().sk;
            r.pkd = ctx.own().pk;
            r.st2 = std::move(st);
            r.out2 = std::move(out);
            r.tags2 = s.stats().by_tag();
            r.total2 = s.stats().total();
        }
    };
    protocol::run_loopback(
        s1, s2, [&](net::session& s) { body(s, role::p1); }, [&](net::session& s) { body(s, role::p2); });
    r.composite = plainhc::compose(r.st1.perm, r.st2.perm);
    return r;
}

struct meta_row {
    std::size_t id;
    std::vector<std::uint64_t> sum;
    std::uint64_t size;
    auto operator<=>(const meta_row&) const = default;
};

inline std::vector<meta_row> rows_of(const std::vector<protocol::target_output>& out)
{
    std::vector<meta_row> v;
    for (const auto& t : out) {
        meta_row m{t.cluster_id, {}, t.size};
        for (auto s : t.sums)
            m.sum.push_back(std::uint64_t(s));
        v.push_back(m);
    }
    std::sort(v.begin(), v.end());
    return v;
}

inline std::vector<meta_row> rows_of(const plainhc::ideal_output& ideal)
{
    std::vector<meta_row> v;
    for (const auto& s : ideal.metadata)
        v.push_back({s.cluster_id, s.meta.rep_sum, s.meta.size});
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace harness
