#pragma once

#include "privhc/protocol/pca.hpp"

#include <exception>
#include <thread>

namespace privhc::protocol {

struct pca_result {
    merge_history sigma;
    std::vector<target_output> targets;
    std::vector<std::size_t> perm;
    std::uint64_t comparators = 0;
    std::uint64_t rounds = 0;
};

// Setup, clustering (row-minimum variant when cfg.opt) and output for one party.
pca_result run_pca(party_context& ctx, const std::vector<point_t>& own_points);

// Runs both parties over an in-process pair on two threads. If one side
// throws, its session is closed so the peer unblocks; the first error is
// rethrown after both sides finish.
template <class F1, class F2>
void run_loopback(net::session& s1, net::session& s2, F1&& p1, F2&& p2)
{
    std::exception_ptr e1, e2;
    std::thread t([&] {
        try {
            p2(s2);
        } catch (...) {
            e2 = std::current_exception();
            s2.close();
        }
    });
    try {
        p1(s1);
    } catch (...) {
        e1 = std::current_exception();
        s1.close();
    }
    t.join();
    if (e1)
        std::rethrow_exception(e1);
    if (e2)
        std::rethrow_exception(e2);
}

} // namespace privhc::protocol
