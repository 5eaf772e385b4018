#include "privhc/protocol/run.hpp"

namespace privhc::protocol {

pca_result run_pca(party_context& ctx, const std::vector<point_t>& own_points)
{
    auto st = setup(ctx, setup_input::from_points(own_points));
    if (ctx.cfg().opt) {
        auto rm = opt_init(ctx, st);
        opt_cluster(ctx, st, rm);
    } else {
        cluster(ctx, st);
    }
    pca_result r;
    r.targets = output(ctx, st);
    r.sigma = std::move(st.sigma);
    r.perm = std::move(st.perm);
    r.comparators = ctx.cluster_comparators;
    r.rounds = ctx.cluster_rounds;
    return r;
}

} // namespace privhc::protocol
