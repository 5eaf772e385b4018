#include "privhc/codec.hpp"
#include "privhc/protocol/pca.hpp"

namespace privhc::protocol {

namespace {

std::size_t cluster_id(const split_state& st, std::size_t slot)
{
    const auto& e = *st.sigma.entry(slot);
    return e.k == merge_history::node::kind::merge ? st.n + e.round : e.index;
}

} // namespace

std::vector<target_output> output(party_context& ctx, const split_state& st)
{
    ctx.enter("output");
    auto& s = ctx.wire();
    const auto& pkd = ctx.data_key();
    const std::size_t m = st.components;

    std::vector<target_output> out;
    for (auto slot : st.sigma.active_slots()) {
        target_output t;
        t.slot = slot;
        t.cluster_id = cluster_id(st, slot);
        t.members = st.sigma.members(slot);
        t.size = t.members.size();
        out.push_back(std::move(t));
    }

    if (ctx.who() == role::p1) {
        writer w;
        w.u32(std::uint32_t(out.size()));
        w.u32(std::uint32_t(m));
        for (const auto& t : out) {
            w.u32(std::uint32_t(t.slot));
            w.u64(t.size);
            for (std::size_t c = 0; c < m; ++c) {
                auto e = ahe::identity(pkd);
                for (auto k : t.members)
                    ahe::add_ct_inplace(pkd, e, st.L[k][c]);
                ahe::put_ciphertext(w.buf, pkd, e);
            }
        }
        s.send(net::tag::out_sums, std::move(w.buf));
        auto msg = s.recv(net::tag::out_plains);
        reader r(msg);
        for (auto& t : out)
            for (std::size_t c = 0; c < m; ++c)
                t.sums.push_back(r.word(16));
        r.expect_end();
    } else {
        auto msg = s.recv(net::tag::out_sums);
        reader r(msg);
        if (r.u32() != out.size() || r.u32() != m)
            throw error("output: target list disagrees with local merge history");
        writer w;
        for (auto& t : out) {
            if (r.u32() != t.slot || r.u64() != t.size)
                throw error("output: target list disagrees with local merge history");
            for (std::size_t c = 0; c < m; ++c) {
                auto e = ahe::get_ciphertext(r.cursor(), r.end(), pkd);
                const word_t v = ahe::to_word(ctx.own().sk.decrypt(e));
                t.sums.push_back(v);
                w.word(v, 16);
            }
        }
        r.expect_end();
        s.send(net::tag::out_plains, std::move(w.buf));
    }
    return out;
}

} // namespace privhc::protocol
