#include "privhc/gc/circuits.hpp"

namespace privhc::gc {

circuit_spec build_argmin(std::size_t n, unsigned lambda, unsigned kappa)
{
    if (n < 2)
        throw error("build_argmin: need at least two slots");
    if (kappa <= lambda)
        throw error("build_argmin: kappa must exceed lambda");
    builder b("argmin" + std::to_string(n));
    const unsigned w = kappa + 1;
    const unsigned ib = index_bits(n);
    std::vector<std::uint32_t> r(n), v(n);
    for (auto& x : r)
        x = b.input(party::garbler, kappa);
    for (auto& x : v)
        x = b.input(party::evaluator, w);

    std::uint32_t best = b.sub(v[0], r[0], w);
    std::uint32_t idx = b.con(0, ib);
    for (std::size_t i = 1; i < n; ++i) {
        std::uint32_t d = b.sub(v[i], r[i], w);
        std::uint32_t s = b.min_sel(best, d, lambda);
        if (i + 1 < n)
            best = b.mux(s, best, d, lambda);
        idx = b.mux(s, idx, b.con(i, ib), ib);
    }
    b.output(idx);
    return b.finish();
}

namespace {

circuit_spec build_dist(unsigned lambda, unsigned kappa, bool take_min)
{
    if (kappa <= lambda)
        throw error("build_mindist: kappa must exceed lambda");
    builder b(take_min ? "mindist" : "maxdist");
    const unsigned w = kappa + 1;
    auto r1 = b.input(party::garbler, kappa);
    auto r2 = b.input(party::garbler, kappa);
    auto rp = b.input(party::garbler, kappa);
    auto u = b.input(party::evaluator, w);
    auto v = b.input(party::evaluator, w);
    auto x = b.sub(u, r1, w);
    auto y = b.sub(v, r2, w);
    auto s = take_min ? b.min_sel(x, y, lambda) : b.max_sel(x, y, lambda);
    auto m = b.mux(s, x, y, lambda);
    b.output(b.add(m, rp, w));
    return b.finish();
}

} // namespace

circuit_spec build_mindist(unsigned lambda, unsigned kappa) { return build_dist(lambda, kappa, true); }
circuit_spec build_maxdist(unsigned lambda, unsigned kappa) { return build_dist(lambda, kappa, false); }

} // namespace privhc::gc
