#pragma once

#include "privhc/plainhc.hpp"

#include <memory>
#include <string>
#include <vector>

namespace privhc::protocol {

// The diagonal Sigma_{i,i} of the merge-history matrix. An entry is a leaf
// (i, bot), a pointer ((X, round), i) left at an absorbed slot, or a merge
// ((X, Y, round), bot) at a surviving slot. The off-diagonal Sigma_{i,k} is
// bot exactly when slot i or slot k is retired.
class merge_history {
public:
    struct node {
        enum class kind { leaf, pointer, merge } k{};
        std::size_t index = 0; // leaf index or pointer target
        std::size_t round = 0;
        std::shared_ptr<const node> a, b;
    };
    using node_ptr = std::shared_ptr<const node>;

    merge_history() = default;
    explicit merge_history(std::size_t n);

    std::size_t size() const { return diag_.size(); }
    std::size_t rounds() const { return merges_.size(); }
    bool active(std::size_t i) const { return alive_[i] != 0; }
    bool linked(std::size_t i, std::size_t k) const { return i != k && active(i) && active(k); }
    std::size_t active_count() const { return live_; }
    std::vector<std::size_t> active_slots() const;

    // Merges slot j into slot i (i < j) as the next round.
    void merge(std::size_t i, std::size_t j);
    // Retires a surviving cluster without merging it (outlier elimination).
    void eliminate(std::size_t i);
    bool eliminated(std::size_t i) const { return dropped_[i] != 0; }

    const node_ptr& entry(std::size_t i) const { return diag_[i]; }
    const std::vector<std::pair<std::size_t, std::size_t>>& merges() const { return merges_; }

    // Sorted leaf indices under slot i.
    std::vector<std::size_t> members(std::size_t i) const;

    // Text form of Sigma_{i,i}; after merging slots 0 and 1 in round 0 slot 0
    // reads "(((0,_),(((1,_),0),0),0),_)".
    std::string encode(std::size_t i) const;
    std::string encode_all() const;

    // Rebuilds the dendrogram by walking the nested entries only.
    plainhc::dendrogram decode() const;

    bool operator==(const merge_history& o) const { return encode_all() == o.encode_all(); }

private:
    std::vector<node_ptr> diag_;
    std::vector<char> alive_, dropped_;
    std::vector<std::pair<std::size_t, std::size_t>> merges_;
    std::size_t live_ = 0;
};

} // namespace privhc::protocol
