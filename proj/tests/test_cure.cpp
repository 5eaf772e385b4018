#include "harness.hpp"
#include "oracles.hpp"
#include "privhc/cure.hpp"
#include "privhc/data.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace privhc;
using protocol::role;

namespace {

// Partition induced by a labeling, as sorted member lists.
std::set<std::vector<std::size_t>> partition_of(const std::vector<std::size_t>& labels)
{
    std::map<std::size_t, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by[labels[i]].push_back(i);
    std::set<std::vector<std::size_t>> out;
    for (auto& [k, v] : by)
        out.insert(v);
    return out;
}

std::set<std::vector<std::size_t>> partition_of(const std::vector<std::vector<std::size_t>>& clusters)
{
    return {clusters.begin(), clusters.end()};
}

struct pair_result {
    cure::result r1, r2;
    std::map<net::tag, net::counters> tags1, tags2;
};

pair_result run_pair(cure::variant v, const std::vector<point_t>& P, const std::vector<point_t>& Q,
                     const protocol::config& cfg, const cure::params& prm, std::uint64_t seed)
{
    pair_result out;
    auto [s1, s2] = net::inprocess_pair();
    protocol::run_loopback(
        s1, s2,
        [&](net::session& s) {
            protocol::party_context ctx(role::p1, s, cfg, seed * 2, true);
            out.r1 = cure::run_variant(v, ctx, P, prm, seed);
            out.tags1 = s.stats().by_tag();
        },
        [&](net::session& s) {
            protocol::party_context ctx(role::p2, s, cfg, seed * 2 + 1, true);
            out.r2 = cure::run_variant(v, ctx, Q, prm, seed);
            out.tags2 = s.stats().by_tag();
        });
    return out;
}

void expect_symmetric(const pair_result& r)
{
    for (auto& [t, c] : r.tags1) {
        EXPECT_EQ(c.sent, r.tags2.at(t).received) << net::tag_name(t);
        EXPECT_EQ(c.received, r.tags2.at(t).sent) << net::tag_name(t);
    }
}

data::labeled_dataset blobs(std::size_t n, std::size_t d, std::size_t k, std::uint64_t seed, double frac = 0)
{
    data::gen_spec g;
    g.n = n;
    g.d = d;
    g.min_clusters = g.max_clusters = k;
    g.min_separation = 40;
    g.max_stddev = 2;
    g.outlier_frac = frac;
    g.seed = seed;
    g.l = 10;
    return data::gen_synthetic(g);
}

} // namespace

TEST(Params, Validation)
{
    cure::params p;
    EXPECT_NO_THROW(p.validate(5000, 5));
    p.s = 6000;
    EXPECT_THROW(p.validate(5000, 5), usage_error);
    p.s = 12;
    EXPECT_THROW(p.validate(5000, 5), usage_error); // 12 / 3 < 5
    p.s = 1000;
    p.t1 = 6;
    EXPECT_THROW(p.validate(5000, 5), usage_error);
    p.t1 = 3;
    p.R = 3;
    EXPECT_NO_THROW(p.validate(5000, 5, cure::variant::pcure0));
    EXPECT_THROW(p.validate(5000, 5, cure::variant::pcure1), usage_error);
    p.R = 1;
    p.p = 3;
    EXPECT_NO_THROW(p.validate(5000, 5, cure::variant::pcure1));
    EXPECT_THROW(p.validate(5000, 5, cure::variant::pcure2), usage_error);
    EXPECT_EQ(p.a_target(1000), 111u);
    EXPECT_EQ(p.describe(), "s=1000,p=3,q=3,t1=3,t2=5,R=1");
}

TEST(Classify, ExactRationalDistances)
{
    cure::cluster_model m;
    // centroid 10/3 vs point 3: x = 3 sits 1/3 from the first and 0 from the second
    m.clusters.push_back({{{{10}, 3}}, 3, cure::provenance::joint});
    m.clusters.push_back({{{{3}, 1}}, 1, cure::provenance::joint});
    EXPECT_EQ(cure::classify_one(m, {3}), 1u);
    EXPECT_EQ(cure::classify_one(m, {4}), 0u); // 2/3 vs 1
    // 7/2 is equidistant from 3 and 4: tie goes to the lower cluster
    cure::cluster_model t;
    t.clusters.push_back({{{{4}, 1}}, 1, cure::provenance::joint});
    t.clusters.push_back({{{{3}, 1}}, 1, cure::provenance::joint});
    t.clusters.push_back({{{{7}, 2}}, 2, cure::provenance::joint});
    EXPECT_EQ(cure::classify_one(t, {3}), 1u);
    cure::cluster_model e;
    e.clusters.push_back({{{{8}, 2}}, 2, cure::provenance::joint});
    e.clusters.push_back({{{{12}, 3}}, 3, cure::provenance::joint});
    EXPECT_EQ(cure::classify_one(e, {4}), 0u); // identical centroids
}

TEST(Classify, WideValuesTakeSlowPath)
{
    cure::cluster_model m;
    const word_t big = word_t(1) << 60;
    m.clusters.push_back({{{{big}, 1}}, 1, cure::provenance::joint});
    m.clusters.push_back({{{{big * 3}, 2}}, 2, cure::provenance::joint});
    EXPECT_EQ(cure::classify_one(m, {std::uint64_t(big * 3 / 2)}), 1u);
    EXPECT_EQ(cure::classify_one(m, {std::uint64_t(big)}), 0u);
}

TEST(Classify, MatchesBruteForceOnRandomModels)
{
    prg rng = prg::from_seed(3, "test");
    for (int trial = 0; trial < 200; ++trial) {
        cure::cluster_model m;
        const std::size_t k = 1 + rng.below(6);
        for (std::size_t c = 0; c < k; ++c) {
            cure::representative r;
            r.weight = 1 + rng.below(9);
            r.sum = {word_t(rng.below(100 * r.weight)), word_t(rng.below(100 * r.weight))};
            m.clusters.push_back({{r}, r.weight, cure::provenance::joint});
        }
        point_t x{rng.below(100), rng.below(100)};
        // brute force with long double is exact at these magnitudes
        std::size_t best = 0;
        long double bd = -1;
        for (std::size_t c = 0; c < k; ++c) {
            const auto& r = m.clusters[c].reps[0];
            long double d = 0;
            for (int t = 0; t < 2; ++t) {
                const long double diff = (long double)x[t] * r.weight - (long double)r.sum[t];
                d += diff * diff;
            }
            d /= (long double)r.weight * r.weight;
            if (bd < 0 || d < bd - 1e-12L) {
                bd = d;
                best = c;
            }
        }
        ASSERT_EQ(cure::classify_one(m, x), best);
    }
}

TEST(Helpers, SmallClustersKeepsMinimum)
{
    EXPECT_EQ(cure::small_clusters({5, 1, 2, 7}, 3, 1), (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(cure::small_clusters({5, 1, 2, 7}, 3, 3), (std::vector<std::size_t>{1}));
    EXPECT_EQ(cure::small_clusters({1, 1}, 3, 1), (std::vector<std::size_t>{0}));
    EXPECT_TRUE(cure::small_clusters({4, 4}, 0, 1).empty());
}

TEST(Helpers, SampleRowsDistinct)
{
    prg rng = prg::from_seed(1);
    auto s = cure::sample_rows(100, 40, rng);
    EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 40u);
    EXPECT_THROW(cure::sample_rows(3, 4, rng), usage_error);
}

TEST(Plain, DegenerateEqualsHc)
{
    for (auto kind : {linkage_kind::single, linkage_kind::complete})
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto pts = oracle::random_points(40, 2, 12, seed);
            cure::params prm{40, 1, 1, 0, 0, 40};
            auto res = cure::cure_plain(pts, prm, seed, kind, 4);
            auto hc = plainhc::hc_run(pts, kind, 4);
            EXPECT_EQ(partition_of(res.labels), partition_of(hc.tree.target_clusters));
            EXPECT_EQ(res.labels.size(), pts.size());
        }
}

TEST(Plain, ThreeBlobsTenPercentSample)
{
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto ds = blobs(3000, 3, 3, seed);
        cure::params prm{300, 1, 3, 3, 5, 1};
        auto res = cure::cure_plain(ds.points, prm, seed, linkage_kind::single, 3);
        const double acc = plainhc::accuracy_of_assignment(res.labels, ds.labels);
        EXPECT_GE(acc, 0.95) << "seed " << seed;
        total += acc;
    }
    EXPECT_GE(total / 10, 0.95);
}

TEST(Plain, PartitionsAndRepresentatives)
{
    auto ds = blobs(2000, 2, 4, 7);
    cure::params prm{600, 3, 3, 3, 5, 5};
    auto res = cure::cure_plain(ds.points, prm, 7, linkage_kind::complete, 4);
    EXPECT_EQ(res.sample, 600u);
    EXPECT_LE(res.a_clusters, 3 * (600 / 9));
    ASSERT_EQ(res.model.clusters.size(), 4u);
    for (const auto& c : res.model.clusters) {
        EXPECT_EQ(c.reps.size(), std::min<std::size_t>(5, c.size));
        for (const auto& r : c.reps)
            EXPECT_EQ(r.weight, 1u); // sampled points, not centroids
    }
    EXPECT_GE(plainhc::accuracy_of_assignment(res.labels, ds.labels), 0.95);
    auto again = cure::cure_plain(ds.points, prm, 7, linkage_kind::complete, 4);
    EXPECT_EQ(again.model, res.model);
    EXPECT_EQ(again.labels, res.labels);
}

TEST(Plain, OutliersDroppedFromModel)
{
    std::vector<point_t> pts;
    for (std::uint64_t i = 0; i < 30; ++i)
        pts.push_back({100 + i % 5, 100 + i / 5});
    for (std::uint64_t i = 0; i < 30; ++i)
        pts.push_back({500 + i % 5, 500 + i / 5});
    pts.push_back({1000, 0}); // far singleton
    cure::params prm{61, 1, 5, 2, 5, 1};
    auto res = cure::cure_plain(pts, prm, 1, linkage_kind::single, 2);
    ASSERT_EQ(res.model.clusters.size(), 2u);
    for (const auto& c : res.model.clusters) {
        // the centroid stays inside one blob's bounding box
        const auto& r = c.reps[0];
        const word_t x = r.sum[0] / r.weight, y = r.sum[1] / r.weight;
        const bool low = x >= 100 && x < 105 && y >= 100 && y < 106;
        const bool high = x >= 500 && x < 505 && y >= 500 && y < 506;
        EXPECT_TRUE(low || high);
        EXPECT_LE(c.size, 30u);
    }
}

TEST(Pcure0, IdenticalDataDoublesModel)
{
    auto ds = blobs(400, 2, 3, 2);
    cure::params prm{200, 1, 3, 3, 5, 1};
    auto cfg = cure::make_config(cure::variant::pcure0, linkage_kind::single, 6, 10, 2, prm, 512, false);
    auto r = run_pair(cure::variant::pcure0, ds.points, ds.points, cfg, prm, 1);
    EXPECT_EQ(r.r1.model, r.r2.model);
    EXPECT_EQ(r.r1.model.clusters.size(), 6u);
    EXPECT_GE(plainhc::accuracy_of_assignment(r.r1.labels, ds.labels), 0.99);
    expect_symmetric(r);
    // only the handshake and the two representative lists cross the wire
    EXPECT_EQ(r.tags1.size(), 2u);
    std::size_t bytes = 5 + 4 + 4;
    std::size_t own = 0;
    for (const auto& c : r.r1.model.clusters)
        if (c.source == cure::provenance::local_p)
            own += 8 + 4 + c.reps.size() * (8 + 2 * 16);
    EXPECT_EQ(r.tags1.at(net::tag::cure_reps).sent, bytes + own);
}

TEST(Cross, SharesEqualSetLinkages)
{
    for (auto kind : {linkage_kind::single, linkage_kind::complete}) {
        auto P = oracle::random_points(7, 3, 8, 1 + int(kind));
        auto Q = oracle::random_points(6, 3, 8, 9 + int(kind));
        std::vector<std::vector<std::size_t>> sp{{0, 3, 5}, {1}, {2, 4, 6}}, sq{{0, 1}, {2, 3, 4}, {5}};
        auto cfg = harness::make_config(kind, 1, 8, 3);
        protocol::cross_shares x, y;
        auto [s1, s2] = net::inprocess_pair();
        protocol::run_loopback(
            s1, s2,
            [&](net::session& s) {
                protocol::party_context ctx(role::p1, s, cfg, 1, true);
                x = cure::cross_linkages(ctx, P, sp);
            },
            [&](net::session& s) {
                protocol::party_context ctx(role::p2, s, cfg, 2, true);
                y = cure::cross_linkages(ctx, Q, sq);
            });
        ASSERT_EQ(x.rows, 3u);
        ASSERT_EQ(x.cols, 3u);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                std::vector<point_t> a, b;
                for (auto k : sp[i])
                    a.push_back(P[k]);
                for (auto k : sq[j])
                    b.push_back(Q[k]);
                EXPECT_EQ(y.share[i * 3 + j] - x.share[i * 3 + j], plainhc::linkage(a, b, kind));
                EXPECT_EQ(x.share[i * 3 + j] >> cfg.w().kappa, 0u);
            }
    }
}

TEST(Pcure1, InitialStateIsSetLinkage)
{
    auto P = oracle::random_points(6, 2, 8, 31);
    auto Q = oracle::random_points(5, 2, 8, 32);
    std::vector<std::vector<std::size_t>> sp{{0, 1}, {2}, {3, 4, 5}}, sq{{0, 4}, {1, 2, 3}};
    auto cfg = harness::make_config(linkage_kind::complete, 1, 8, 2);
    protocol::split_state st1, st2;
    auto [s1, s2] = net::inprocess_pair();
    auto body = [&](net::session& s, role who, const std::vector<point_t>& pts,
                    const std::vector<std::vector<std::size_t>>& sets, protocol::split_state& st) {
        protocol::party_context ctx(who, s, cfg, who == role::p1 ? 5 : 6, true);
        auto cross = cure::cross_linkages(ctx, pts, sets);
        protocol::setup_input in;
        for (const auto& set : sets)
            in.values.push_back({set.size()});
        in.intra = cure::set_linkages(pts, sets, cfg.kind);
        st = protocol::setup(ctx, in, &cross);
    };
    protocol::run_loopback(
        s1, s2, [&](net::session& s) { body(s, role::p1, P, sp, st1); },
        [&](net::session& s) { body(s, role::p2, Q, sq, st2); });
    // joint items: p1's sets then p2's, in composite order
    std::vector<std::vector<point_t>> items;
    for (const auto& set : sp) {
        items.emplace_back();
        for (auto k : set)
            items.back().push_back(P[k]);
    }
    for (const auto& set : sq) {
        items.emplace_back();
        for (auto k : set)
            items.back().push_back(Q[k]);
    }
    auto order = plainhc::compose(st1.perm, st2.perm);
    auto perm = plainhc::apply_permutation(items, order);
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = a + 1; b < 5; ++b)
            EXPECT_EQ(st2.B.at(a, b) - st1.R.at(a, b), plainhc::linkage(perm[a], perm[b], cfg.kind));
}

TEST(Pcure1, SingleAClusterPerPartyGivesGlobalCentroid)
{
    std::vector<point_t> P{{10, 10}, {11, 10}, {10, 12}}, Q{{40, 40}, {42, 41}};
    cure::params prm{5, 1, 3, 0, 0, 1};
    auto cfg = cure::make_config(cure::variant::pcure1, linkage_kind::single, 1, 8, 2, prm, 512, true);
    auto r = run_pair(cure::variant::pcure1, P, Q, cfg, prm, 3);
    ASSERT_EQ(r.r1.a_clusters, 2u);
    ASSERT_EQ(r.r1.model.clusters.size(), 1u);
    const auto& rep = r.r1.model.clusters[0].reps[0];
    EXPECT_EQ(rep.weight, 5u);
    EXPECT_EQ(rep.sum, (std::vector<word_t>{113, 113}));
    EXPECT_EQ(r.r1.model, r.r2.model);
    expect_symmetric(r);
}

TEST(Pcure1, BlobsNearPlainCure)
{
    auto ds = blobs(1200, 3, 4, 11, 0.01);
    auto [P, Q] = data::split_half(ds, 11);
    cure::params prm{120, 1, 3, 3, 5, 1};
    for (bool opt : {false, true}) {
        auto cfg = cure::make_config(cure::variant::pcure1, linkage_kind::single, 4, 10, 3, prm, 512, opt);
        auto r = run_pair(cure::variant::pcure1, P.points, Q.points, cfg, prm, 4);
        EXPECT_EQ(r.r1.model, r.r2.model);
        std::vector<std::size_t> labels = r.r1.labels;
        labels.insert(labels.end(), r.r2.labels.begin(), r.r2.labels.end());
        std::vector<std::int64_t> truth = P.labels;
        truth.insert(truth.end(), Q.labels.begin(), Q.labels.end());
        EXPECT_GE(plainhc::accuracy_of_assignment(labels, truth), 0.95) << "opt " << opt;
        expect_symmetric(r);
        EXPECT_GT(r.tags1.at(net::tag::setup_cross).sent, 0u);
    }
}

TEST(Pcure2, NoEliminationMatchesPlainHcOnSample)
{
    for (auto kind : {linkage_kind::single, linkage_kind::complete}) {
        auto P = oracle::random_points(9, 2, 10, 40 + int(kind));
        auto Q = oracle::random_points(8, 2, 10, 50 + int(kind));
        cure::params prm{17, 1, 3, 0, 0, 1};
        auto cfg = cure::make_config(cure::variant::pcure2, kind, 3, 10, 2, prm, 512, kind == linkage_kind::single);
        auto r = run_pair(cure::variant::pcure2, P, Q, cfg, prm, 2);
        auto joint = P;
        joint.insert(joint.end(), Q.begin(), Q.end());
        auto hc = plainhc::hc_run(joint, kind, 3);
        std::multiset<std::pair<std::vector<word_t>, std::uint64_t>> got, want;
        for (const auto& c : r.r1.model.clusters)
            got.insert({c.reps[0].sum, c.reps[0].weight});
        for (const auto& m : hc.meta)
            want.insert({std::vector<word_t>(m.rep_sum.begin(), m.rep_sum.end()), m.size});
        EXPECT_EQ(got, want) << to_string(kind);
        EXPECT_EQ(r.r1.model, r.r2.model);
    }
}

TEST(Pcure2, StageContinuationIsSound)
{
    for (bool opt : {false, true}) {
        auto P = oracle::random_points(8, 2, 6, 71), Q = oracle::random_points(8, 2, 6, 72);
        auto cfg = harness::make_config(linkage_kind::single, 2, 6, 2, opt);
        protocol::merge_history whole, staged;
        for (int mode = 0; mode < 2; ++mode) {
            auto [s1, s2] = net::inprocess_pair();
            auto body = [&](net::session& s, role who) {
                protocol::party_context ctx(who, s, cfg, who == role::p1 ? 8 : 9, true);
                auto st = protocol::setup(ctx, protocol::setup_input::from_points(who == role::p1 ? P : Q));
                std::optional<protocol::rowmin_state> rm;
                if (opt)
                    rm = protocol::opt_init(ctx, st);
                auto go = [&](std::size_t stop) {
                    if (opt)
                        protocol::opt_cluster(ctx, st, *rm, stop);
                    else
                        protocol::cluster(ctx, st, stop);
                };
                if (mode == 1) {
                    go(5);
                    if (opt)
                        protocol::opt_repair(ctx, st, *rm);
                }
                go(0);
                if (who == role::p1)
                    (mode == 0 ? whole : staged) = st.sigma;
            };
            protocol::run_loopback(
                s1, s2, [&](net::session& s) { body(s, role::p1); }, [&](net::session& s) { body(s, role::p2); });
        }
        EXPECT_EQ(whole, staged) << "opt " << opt;
    }
}

TEST(Pcure2, OutlierEliminatedAtFirstStage)
{
    std::vector<point_t> P, Q;
    for (std::uint64_t i = 0; i < 6; ++i) {
        P.push_back({10 + i, 10});
        Q.push_back({10 + i, 12});
        P.push_back({200 + i, 200});
        Q.push_back({200 + i, 202});
    }
    P.push_back({1000, 1000}); // outlier on p1's side
    cure::params prm{25, 1, 5, 2, 3, 1};
    for (bool opt : {false, true}) {
        auto cfg = cure::make_config(cure::variant::pcure2, linkage_kind::single, 2, 10, 2, prm, 512, opt);
        auto r = run_pair(cure::variant::pcure2, P, Q, cfg, prm, 6);
        ASSERT_EQ(r.r1.model.clusters.size(), 2u);
        for (const auto& c : r.r1.model.clusters)
            EXPECT_EQ(c.size, 12u);
        EXPECT_EQ(r.r1.labels.size(), P.size());
        EXPECT_EQ(r.r2.labels.size(), Q.size());
        expect_symmetric(r);
    }
}

TEST(Pcure, HandshakeRejectsDifferentParams)
{
    std::vector<point_t> P{{1}, {2}}, Q{{5}, {6}};
    cure::params a{4, 1, 1, 0, 0, 1}, b{4, 1, 2, 0, 0, 1};
    auto c1 = cure::make_config(cure::variant::pcure0, linkage_kind::single, 1, 8, 1, a, 512, false);
    auto c2 = cure::make_config(cure::variant::pcure0, linkage_kind::single, 1, 8, 1, b, 512, false);
    auto [s1, s2] = net::inprocess_pair();
    EXPECT_THROW(protocol::run_loopback(
                     s1, s2,
                     [&](net::session& s) {
                         protocol::party_context ctx(role::p1, s, c1, 1, true);
                         cure::pcure0(ctx, P, a, 1);
                     },
                     [&](net::session& s) {
                         protocol::party_context ctx(role::p2, s, c2, 2, true);
                         cure::pcure0(ctx, Q, b, 1);
                     }),
                 error);
}
