#include "oracles.hpp"

#include "privhc/plainhc.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace privhc;
using namespace privhc::plainhc;

TEST(SqDist, Examples)
{
    EXPECT_EQ(sq_dist({1, 2}, {4, 6}), word_t(25));
    EXPECT_EQ(sq_dist({7, 9, 11}, {7, 9, 11}), word_t(0));
    const std::uint64_t top = (1ULL << 16) - 1;
    EXPECT_EQ(sq_dist({0}, {top}), word_t(top) * top);
    const std::uint64_t top32 = (1ULL << 32) - 1;
    EXPECT_EQ(sq_dist({0, 0}, {top32, top32}), word_t(top32) * top32 * 2);
    EXPECT_THROW(sq_dist({1}, {1, 2}), error);
}

TEST(Linkage, Examples)
{
    EXPECT_EQ(linkage({{1}}, {{4}, {6}}, linkage_kind::single), word_t(9));
    EXPECT_EQ(linkage({{1}}, {{4}, {6}}, linkage_kind::complete), word_t(25));
    EXPECT_EQ(linkage({{2, 3}}, {{5, 7}}, linkage_kind::single), sq_dist({2, 3}, {5, 7}));
    EXPECT_EQ(linkage({{2, 3}}, {{5, 7}}, linkage_kind::complete), sq_dist({2, 3}, {5, 7}));
    EXPECT_THROW(linkage({}, {{1}}, linkage_kind::single), error);
}

TEST(HcRun, UniqueMinimum)
{
    auto r = hc_run({{1}, {2}, {10}}, linkage_kind::single, 2);
    ASSERT_EQ(r.tree.merges.size(), 1u);
    EXPECT_EQ(r.tree.merges[0].left, 0u);
    EXPECT_EQ(r.tree.merges[0].right, 1u);
    EXPECT_EQ(r.tree.target_clusters, (std::vector<std::vector<std::size_t>>{{0, 1}, {2}}));
    EXPECT_EQ(r.meta[0].rep_sum, std::vector<std::uint64_t>{3});
    EXPECT_EQ(r.meta[0].size, 2u);
}

TEST(HcRun, TargetEqualsN)
{
    auto pts = oracle::random_points(7, 2, 8, 1);
    auto r = hc_run(pts, linkage_kind::complete, 7);
    EXPECT_TRUE(r.tree.merges.empty());
    EXPECT_EQ(r.tree.target_clusters.size(), 7u);
}

TEST(HcRun, TargetOutOfRange)
{
    auto pts = oracle::random_points(4, 1, 8, 1);
    EXPECT_THROW(hc_run(pts, linkage_kind::single, 0), error);
    EXPECT_THROW(hc_run(pts, linkage_kind::single, 5), error);
}

TEST(HcRun, MatchesBruteForce)
{
    for (auto kind : {linkage_kind::single, linkage_kind::complete})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto pts = oracle::random_points(50, 1 + seed % 4, seed % 2 ? 4 : 10, seed);
            auto r = hc_run(pts, kind, 5);
            EXPECT_EQ(r.tree, oracle::brute_hc(pts, kind, 5)) << "seed " << seed;
        }
}

TEST(HcRun, TieHeavyMatchesBruteForce)
{
    // tiny domain forces many equal linkages
    for (auto kind : {linkage_kind::single, linkage_kind::complete})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto pts = oracle::random_points(40, 1, 3, seed + 100);
            EXPECT_EQ(hc_run(pts, kind, 3).tree, oracle::brute_hc(pts, kind, 3));
        }
}

TEST(HcRun, EveryMergeIsMinimal)
{
    for (auto kind : {linkage_kind::single, linkage_kind::complete}) {
        auto pts = oracle::random_points(60, 3, 12, 77);
        auto t = hc_matrix(distance_matrix(pts), kind, 1);
        std::vector<std::vector<std::size_t>> slot(pts.size());
        std::vector<bool> alive(pts.size(), true);
        for (std::size_t i = 0; i < pts.size(); ++i)
            slot[i] = {i};
        auto members = [&](std::size_t s) {
            std::vector<point_t> v;
            for (auto k : slot[s])
                v.push_back(pts[k]);
            return v;
        };
        for (std::size_t r = 0; r < t.slot_pairs.size(); ++r) {
            auto [i, j] = t.slot_pairs[r];
            word_t chosen = linkage(members(i), members(j), kind);
            EXPECT_EQ(chosen, t.heights[r]);
            for (std::size_t a = 0; a < pts.size(); ++a)
                for (std::size_t b = a + 1; b < pts.size(); ++b)
                    if (alive[a] && alive[b]) {
                        ASSERT_LE(chosen, linkage(members(a), members(b), kind));
                    }
            slot[i].insert(slot[i].end(), slot[j].begin(), slot[j].end());
            alive[j] = false;
        }
    }
}

TEST(HcRun, SizesAndSumsConsistent)
{
    auto pts = oracle::random_points(45, 3, 10, 5);
    auto r = hc_run(pts, linkage_kind::single, 6);
    std::size_t total = 0;
    std::set<std::size_t> seen;
    for (std::size_t c = 0; c < r.tree.target_clusters.size(); ++c) {
        total += r.meta[c].size;
        for (auto k : r.tree.target_clusters[c])
            EXPECT_TRUE(seen.insert(k).second);
    }
    EXPECT_EQ(total, pts.size());
    EXPECT_EQ(seen.size(), pts.size());
    EXPECT_EQ(r.tree.merges.size(), pts.size() - 6);
}

TEST(HcRun, EndPredicateHook)
{
    auto pts = oracle::random_points(20, 1, 10, 3);
    std::size_t calls = 0;
    auto r = hc_run(pts, linkage_kind::single, 1, [&](std::size_t active, word_t) {
        ++calls;
        return active <= 15;
    });
    EXPECT_EQ(r.tree.merges.size(), 5u);
    EXPECT_EQ(calls, 6u);
}

TEST(IdealFhc, TargetSelection)
{
    auto p = oracle::random_points(6, 2, 8, 1), q = oracle::random_points(5, 2, 8, 2);
    auto out = ideal_fhc(p, q, linkage_kind::complete, 3, selection::target_only(), 99);
    EXPECT_EQ(out.metadata.size(), 3u);
    std::uint64_t total = 0;
    for (auto& m : out.metadata)
        total += m.meta.size;
    EXPECT_EQ(total, 11u);
}

TEST(IdealFhc, SMergingExcludesSingletonParents)
{
    auto p = oracle::random_points(6, 1, 10, 3), q = oracle::random_points(6, 1, 10, 4);
    auto out = ideal_fhc(p, q, linkage_kind::single, 1, selection::s_merging(1), 5);
    // round 0 always merges two singletons
    for (const auto& m : out.metadata)
        EXPECT_NE(m.cluster_id, out.tree.leaf_count);
    for (const auto& m : out.tree.merges) {
        bool listed = std::any_of(out.metadata.begin(), out.metadata.end(),
                                  [&](const selected_cluster& s) { return s.cluster_id == m.parent; });
        auto size_of = [&](std::size_t id) -> std::size_t {
            if (id < out.tree.leaf_count)
                return 1;
            std::size_t s = 0;
            std::vector<std::size_t> stack{id};
            while (!stack.empty()) {
                auto x = stack.back();
                stack.pop_back();
                if (x < out.tree.leaf_count) {
                    ++s;
                    continue;
                }
                auto& mm = out.tree.merges[x - out.tree.leaf_count];
                stack.push_back(mm.left);
                stack.push_back(mm.right);
            }
            return s;
        };
        EXPECT_EQ(listed, size_of(m.left) > 1 && size_of(m.right) > 1);
    }
}

TEST(IdealFhc, Deterministic)
{
    auto p = oracle::random_points(8, 3, 8, 1), q = oracle::random_points(8, 3, 8, 2);
    auto a = ideal_fhc(p, q, linkage_kind::single, 4, selection::target_only(), 1234);
    auto b = ideal_fhc(p, q, linkage_kind::single, 4, selection::target_only(), 1234);
    EXPECT_EQ(a.tree, b.tree);
    EXPECT_EQ(a.metadata, b.metadata);
    EXPECT_EQ(a.permutation, b.permutation);
}

TEST(IdealFhc, PermutationInvarianceOfContent)
{
    // wide domain: generic position, no linkage ties
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto p = oracle::random_points(15, 3, 20, seed), q = oracle::random_points(15, 3, 20, seed + 50);
        auto out = ideal_fhc(p, q, linkage_kind::complete, 4, selection::target_only(), seed);
        std::vector<point_t> joint = p;
        joint.insert(joint.end(), q.begin(), q.end());
        auto plain = hc_run(joint, linkage_kind::complete, 4);

        std::set<std::set<std::size_t>> a, b;
        for (auto& c : out.tree.target_clusters) {
            std::set<std::size_t> s;
            for (auto k : c)
                s.insert(out.permutation[k]);
            a.insert(s);
        }
        for (auto& c : plain.tree.target_clusters)
            b.insert({c.begin(), c.end()});
        EXPECT_EQ(a, b);
    }
}

TEST(Compose, Semantics)
{
    std::vector<int> v{10, 11, 12, 13};
    std::vector<std::size_t> f{2, 0, 3, 1}, s{1, 3, 0, 2};
    auto two_step = apply_permutation(apply_permutation(v, f), s);
    EXPECT_EQ(two_step, apply_permutation(v, compose(f, s)));
}

TEST(Accuracy, Examples)
{
    EXPECT_DOUBLE_EQ(accuracy({{0, 1}, {2}}, {5, 5, 7}), 1.0);
    EXPECT_DOUBLE_EQ(accuracy({{0, 1, 2}}, {1, 1, 2}), 2.0 / 3.0);
    EXPECT_THROW(accuracy({}, {1}), error);
    std::vector<bool> ex{false, false, true};
    EXPECT_DOUBLE_EQ(accuracy({{0, 1, 2}}, {1, 1, 2}, &ex), 1.0);
}

TEST(Accuracy, MatchesIndependentRecount)
{
    auto rng = prg::from_seed(9, "acc");
    std::vector<std::int64_t> labels(200);
    std::vector<std::size_t> assign(200);
    for (std::size_t i = 0; i < 200; ++i) {
        labels[i] = std::int64_t(rng.below(6));
        assign[i] = rng.below(7);
    }
    // recount: for each cluster, try each candidate label and keep the best count
    std::size_t correct = 0;
    for (std::size_t c = 0; c < 7; ++c) {
        std::size_t best = 0;
        for (std::int64_t lab = 0; lab < 6; ++lab) {
            std::size_t cnt = 0;
            for (std::size_t i = 0; i < 200; ++i)
                cnt += assign[i] == c && labels[i] == lab;
            best = std::max(best, cnt);
        }
        correct += best;
    }
    EXPECT_DOUBLE_EQ(accuracy_of_assignment(assign, labels), double(correct) / 200.0);
}
