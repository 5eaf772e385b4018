#include "privhc/protocol/merge_history.hpp"

#include <algorithm>
#include <functional>

namespace privhc::protocol {

merge_history::merge_history(std::size_t n) : diag_(n), alive_(n, 1), dropped_(n, 0), live_(n)
{
    for (std::size_t i = 0; i < n; ++i) {
        auto leaf = std::make_shared<node>();
        leaf->k = node::kind::leaf;
        leaf->index = i;
        diag_[i] = std::move(leaf);
    }
}

std::vector<std::size_t> merge_history::active_slots() const
{
    std::vector<std::size_t> out;
    out.reserve(live_);
    for (std::size_t i = 0; i < size(); ++i)
        if (alive_[i])
            out.push_back(i);
    return out;
}

void merge_history::merge(std::size_t i, std::size_t j)
{
    if (!(i < j) || j >= size() || !alive_[i] || !alive_[j])
        throw error("merge_history: invalid merge pair");
    const std::size_t round = rounds();
    auto ptr = std::make_shared<node>();
    ptr->k = node::kind::pointer;
    ptr->a = diag_[j];
    ptr->round = round;
    ptr->index = i;
    auto m = std::make_shared<node>();
    m->k = node::kind::merge;
    m->a = diag_[i];
    m->b = ptr;
    m->round = round;
    diag_[j] = ptr;
    diag_[i] = m;
    alive_[j] = 0;
    --live_;
    merges_.emplace_back(i, j);
}

void merge_history::eliminate(std::size_t i)
{
    if (!alive_[i])
        throw error("merge_history: slot already retired");
    alive_[i] = 0;
    dropped_[i] = 1;
    --live_;
}

std::vector<std::size_t> merge_history::members(std::size_t i) const
{
    std::vector<std::size_t> out;
    std::function<void(const node&)> walk = [&](const node& x) {
        switch (x.k) {
        case node::kind::leaf: out.push_back(x.index); break;
        case node::kind::pointer: walk(*x.a); break;
        case node::kind::merge:
            walk(*x.a);
            walk(*x.b);
            break;
        }
    };
    walk(*diag_.at(i));
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void render(const merge_history::node& x, std::string& s)
{
    using k = merge_history::node::kind;
    switch (x.k) {
    case k::leaf:
        s += "(" + std::to_string(x.index) + ",_)";
        break;
    case k::pointer:
        s += "((";
        render(*x.a, s);
        s += "," + std::to_string(x.round) + ")," + std::to_string(x.index) + ")";
        break;
    case k::merge:
        s += "((";
        render(*x.a, s);
        s += ",";
        render(*x.b, s);
        s += "," + std::to_string(x.round) + "),_)";
        break;
    }
}

} // namespace

std::string merge_history::encode(std::size_t i) const
{
    std::string s;
    render(*diag_.at(i), s);
    return s;
}

std::string merge_history::encode_all() const
{
    std::string s;
    for (std::size_t i = 0; i < size(); ++i) {
        if (i)
            s += ";";
        s += encode(i);
        if (dropped_[i])
            s += "!";
    }
    return s;
}

plainhc::dendrogram merge_history::decode() const
{
    const std::size_t n = size();
    plainhc::dendrogram t;
    t.leaf_count = n;
    std::vector<plainhc::merge_step> steps;
    // cluster id carried by a subtree
    std::function<std::size_t(const node&)> id_of = [&](const node& x) -> std::size_t {
        switch (x.k) {
        case node::kind::leaf: return x.index;
        case node::kind::pointer: return id_of(*x.a);
        case node::kind::merge: return n + x.round;
        }
        return 0;
    };
    std::function<void(const node&)> collect = [&](const node& x) {
        if (x.k == node::kind::pointer) {
            collect(*x.a);
        } else if (x.k == node::kind::merge) {
            collect(*x.a);
            collect(*x.b);
            steps.push_back({x.round, id_of(*x.a), id_of(*x.b), n + x.round});
        }
    };
    for (std::size_t i = 0; i < n; ++i)
        if (diag_[i]->k != node::kind::pointer)
            collect(*diag_[i]);
    std::sort(steps.begin(), steps.end(), [](auto& a, auto& b) { return a.round < b.round; });
    t.merges = std::move(steps);
    for (std::size_t i = 0; i < n; ++i)
        if (alive_[i])
            t.target_clusters.push_back(members(i));
    return t;
}

} // namespace privhc::protocol
