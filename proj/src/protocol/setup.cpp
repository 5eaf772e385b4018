#include "privhc/codec.hpp"
#include "privhc/protocol/pca.hpp"
#include "powers.hpp"

#include <spdlog/spdlog.h>

namespace privhc::protocol {

namespace {

using ahe::ciphertext;

using detail::build_powers;
using detail::multi_pow;

inline std::size_t tri(std::size_t n, std::size_t a, std::size_t b)
{
    return a * n - a * (a + 1) / 2 + (b - a - 1);
}

void put_ct(net::chunk_writer& w, const ahe::public_key& pk, const ciphertext& c)
{
    ahe::put_ciphertext(w.room(pk.ciphertext_bytes()), pk, c);
}

ciphertext get_ct(net::chunk_reader& r, const ahe::public_key& pk)
{
    const std::size_t k = pk.ciphertext_bytes();
    const std::uint8_t* p = r.take(k);
    return ahe::get_ciphertext(p, p + k, pk);
}

void check_input(const party_context& ctx, const setup_input& in, const cross_shares* cross)
{
    if (in.values.empty())
        throw usage_error(std::string("setup: party ") + to_string(ctx.who()) + " has no input items");
    const std::size_t m = in.values.front().size();
    if (m == 0)
        throw usage_error("setup: items need at least one component");
    for (const auto& v : in.values)
        if (v.size() != m)
            throw usage_error("setup: ragged item components");
    if (in.intra.size() != in.values.size())
        throw usage_error("setup: linkage matrix does not match item count");
    const word_t lim = word_t(1) << ctx.w().lambda;
    for (std::size_t a = 0; a < in.values.size(); ++a)
        for (std::size_t b = a + 1; b < in.values.size(); ++b)
            if (in.intra.at(a, b) >= lim)
                throw usage_error("setup: linkage exceeds lambda bits");
    if (!cross) {
        if (in.points.size() != in.values.size())
            throw usage_error("setup: coordinate cross terms need the raw points");
        for (const auto& p : in.points) {
            if (p.size() != ctx.cfg().d)
                throw usage_error("setup: point dimension differs from configured d");
            for (auto c : p)
                if (ctx.cfg().l < 64 && c >> ctx.cfg().l)
                    throw usage_error("setup: coordinate outside [0, 2^l)");
        }
    }
}

split_state setup_p1(party_context& ctx, const setup_input& in, const cross_shares* cross)
{
    auto& s = ctx.wire();
    auto& rng = ctx.rng();
    const auto& pkd = ctx.data_key();  // pk'
    const auto& pkb = ctx.blind_key(); // pk
    const auto& sk = ctx.own().sk;
    const auto w = ctx.w();
    const std::size_t n1 = in.values.size();
    const std::size_t m = in.values.front().size();
    const bool helper = cross == nullptr;

    // round 1 from p2
    auto head = s.recv(net::tag::setup_h);
    reader hr(head);
    const std::size_t n2 = hr.u32();
    const std::size_t m2 = hr.u32();
    const bool helper2 = hr.u8() != 0;
    const std::size_t d = hr.u32();
    hr.expect_end();
    if (m2 != m || helper2 != helper || (helper && d != ctx.cfg().d))
        throw error("setup: peer input shape disagrees");
    if (n2 == 0)
        throw error("setup: peer has no input items");
    if (cross && (cross->rows != n1 || cross->cols != n2 || cross->share.size() != n1 * n2))
        throw error("setup: cross share shape mismatch");

    std::vector<std::vector<ciphertext>> lq(n2), h2(n2), h3(n2);
    {
        net::chunk_reader r(s, net::tag::setup_h);
        for (std::size_t b = 0; b < n2; ++b) {
            for (std::size_t c = 0; c < m; ++c)
                lq[b].push_back(get_ct(r, pkd));
            if (helper)
                for (std::size_t c = 0; c < d; ++c) {
                    h2[b].push_back(get_ct(r, pkd));
                    h3[b].push_back(get_ct(r, pkd));
                }
        }
        if (!r.drained())
            throw error("setup: surplus helper data");
    }
    std::vector<ciphertext> dq(n2 * (n2 - 1) / 2), ey;
    {
        net::chunk_reader r(s, net::tag::setup_d);
        for (auto& c : dq)
            c = get_ct(r, pkd);
        if (cross) {
            ey.resize(n1 * n2);
            for (auto& c : ey)
                c = get_ct(r, pkd);
        }
        if (!r.drained())
            throw error("setup: surplus distance data");
    }

    const std::size_t n = n1 + n2;
    // cross products prod_c H2^{p_c} * prod_c H3, p-major
    std::vector<mpz_class> mcross;
    std::vector<mpz_class> pnorm(n1);
    if (helper) {
        mcross.resize(n1 * n2);
        for (std::size_t b = 0; b < n2; ++b) {
            mpz_class h3prod = 1;
            for (auto& c : h3[b])
                h3prod = (h3prod * c.value) % pkd.n2();
            auto pt = build_powers(h2[b], ctx.cfg().l, pkd.n2());
            for (std::size_t a = 0; a < n1; ++a)
                mcross[a * n2 + b] = multi_pow(pt, in.points[a], h3prod, pkd.n2());
        }
        for (std::size_t a = 0; a < n1; ++a) {
            pnorm[a] = ahe::to_mpz(detail::sq_norm(in.points[a]));
        }
    }

    auto pi1 = random_permutation(n, rng);
    {
        writer hw;
        hw.u32(std::uint32_t(n));
        hw.u32(std::uint32_t(m));
        s.send(net::tag::setup_blinded, std::move(hw.buf));
    }
    {
        net::chunk_writer out(s, net::tag::setup_blinded);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t o = pi1[k];
            for (std::size_t c = 0; c < m; ++c) {
                const mpz_class sv = ahe::to_mpz(rng.bits(w.kappa));
                put_ct(out, pkb, ahe::encrypt(pkb, sv, rng));
                if (o < n1)
                    put_ct(out, pkd, ahe::encrypt(pkd, mpz_class(in.values[o][c]) + sv, rng));
                else
                    put_ct(out, pkd, ahe::add_ct(pkd, lq[o - n1][c], ahe::encrypt(pkd, sv, rng)));
            }
        }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                std::size_t x = pi1[a], y = pi1[b];
                if (x > y)
                    std::swap(x, y);
                const word_t r = rng.bits(w.kappa - 1);
                put_ct(out, pkb, ahe::encrypt(pkb, ahe::to_mpz(r), rng));
                ciphertext e;
                if (y < n1) {
                    e = ahe::encrypt(pkd, ahe::to_mpz(in.intra.at(x, y) + r), rng);
                } else if (x >= n1) {
                    e = ahe::add_ct(pkd, dq[tri(n2, x - n1, y - n1)], ahe::encrypt(pkd, ahe::to_mpz(r), rng));
                } else if (helper) {
                    e = ahe::encrypt(pkd, pnorm[x] + ahe::to_mpz(r), rng);
                    mpz_mul(e.value.get_mpz_t(), e.value.get_mpz_t(), mcross[x * n2 + (y - n1)].get_mpz_t());
                    mpz_mod(e.value.get_mpz_t(), e.value.get_mpz_t(), pkd.n2().get_mpz_t());
                } else {
                    mpz_class shift = ahe::to_mpz(r) - ahe::to_mpz(cross->share[x * n2 + (y - n1)]);
                    mpz_mod(shift.get_mpz_t(), shift.get_mpz_t(), pkd.n().get_mpz_t());
                    e = ahe::add_ct(pkd, ey[x * n2 + (y - n1)], ahe::encrypt(pkd, shift, rng));
                }
                put_ct(out, pkd, e);
            }
        out.flush();
    }
    mcross.clear();
    dq.clear();
    ey.clear();

    // round 3 reply
    split_state st;
    st.n = n;
    st.components = m;
    st.perm = pi1;
    st.sigma = merge_history(n);
    st.L.assign(n, std::vector<ciphertext>(m));
    st.R = plainhc::sym_matrix(n);
    {
        net::chunk_reader r(s, net::tag::setup_return);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t c = 0; c < m; ++c) {
                const mpz_class sv = sk.decrypt_small(get_ct(r, pkb), w.kappa + 2);
                st.L[k][c] = ahe::add_plain(pkd, get_ct(r, pkd), pkd.n() - sv);
            }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                const word_t v = ahe::to_word(sk.decrypt_small(get_ct(r, pkb), w.kappa + 1));
                if (v >> w.kappa)
                    throw error("setup: accumulated blind exceeds kappa bits");
                st.R.set(a, b, v);
            }
        if (!r.drained())
            throw error("setup: surplus return data");
    }
    return st;
}

split_state setup_p2(party_context& ctx, const setup_input& in, const cross_shares* cross)
{
    auto& s = ctx.wire();
    auto& rng = ctx.rng();
    const auto& pkd = ctx.data_key();
    const auto& pkb = ctx.blind_key();
    const auto& sk = ctx.own().sk;
    const auto w = ctx.w();
    const std::size_t n2 = in.values.size();
    const std::size_t m = in.values.front().size();
    const bool helper = cross == nullptr;
    const std::size_t d = helper ? ctx.cfg().d : 0;

    {
        writer hw;
        hw.u32(std::uint32_t(n2));
        hw.u32(std::uint32_t(m));
        hw.u8(helper ? 1 : 0);
        hw.u32(std::uint32_t(d));
        s.send(net::tag::setup_h, std::move(hw.buf));
    }
    {
        net::chunk_writer out(s, net::tag::setup_h);
        for (std::size_t b = 0; b < n2; ++b) {
            for (std::size_t c = 0; c < m; ++c)
                put_ct(out, pkd, ahe::encrypt(pkd, mpz_class(in.values[b][c]), rng));
            for (std::size_t c = 0; c < d; ++c) {
                const mpz_class q = mpz_class(in.points[b][c]);
                put_ct(out, pkd, ahe::encrypt(pkd, (pkd.n() - 2 * q) % pkd.n(), rng));
                put_ct(out, pkd, ahe::encrypt(pkd, q * q, rng));
            }
        }
        out.flush();
    }
    {
        net::chunk_writer out(s, net::tag::setup_d);
        for (std::size_t a = 0; a < n2; ++a)
            for (std::size_t b = a + 1; b < n2; ++b)
                put_ct(out, pkd, ahe::encrypt(pkd, ahe::to_mpz(in.intra.at(a, b)), rng));
        if (cross) {
            if (cross->cols != n2 || cross->share.size() != cross->rows * n2)
                throw error("setup: cross share shape mismatch");
            for (auto y : cross->share)
                put_ct(out, pkd, ahe::encrypt(pkd, ahe::to_mpz(y), rng));
        }
        out.flush();
    }

    auto head = s.recv(net::tag::setup_blinded);
    reader hr(head);
    const std::size_t n = hr.u32();
    if (hr.u32() != m || n <= n2)
        throw error("setup: blinded state shape disagrees");
    hr.expect_end();

    std::vector<std::vector<ciphertext>> S(n, std::vector<ciphertext>(m)), L(n, std::vector<ciphertext>(m));
    std::vector<ciphertext> R(n * (n - 1) / 2);
    plainhc::sym_matrix Bp(n);
    {
        net::chunk_reader r(s, net::tag::setup_blinded);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t c = 0; c < m; ++c) {
                const mpz_class sv = ahe::to_mpz(rng.bits(w.kappa));
                S[k][c] = ahe::add_ct(pkb, get_ct(r, pkb), ahe::encrypt(pkb, sv, rng));
                L[k][c] = ahe::add_ct(pkd, get_ct(r, pkd), ahe::encrypt(pkd, sv, rng));
            }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                const word_t rv = rng.bits(w.kappa - 1);
                R[tri(n, a, b)] = ahe::add_ct(pkb, get_ct(r, pkb), ahe::encrypt(pkb, ahe::to_mpz(rv), rng));
                const word_t bv = ahe::to_word(sk.decrypt_small(get_ct(r, pkd), w.kappa + 1));
                if (bv >> w.kappa)
                    throw error("setup: blinded distance exceeds kappa + 1 bits");
                Bp.set(a, b, bv + rv);
            }
        if (!r.drained())
            throw error("setup: surplus blinded data");
    }

    auto pi2 = random_permutation(n, rng);
    split_state st;
    st.n = n;
    st.components = m;
    st.perm = pi2;
    st.sigma = merge_history(n);
    st.B = plainhc::sym_matrix(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            st.B.set(a, b, Bp.at(pi2[a], pi2[b]));
    {
        net::chunk_writer out(s, net::tag::setup_return);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t c = 0; c < m; ++c) {
                put_ct(out, pkb, S[pi2[k]][c]);
                put_ct(out, pkd, L[pi2[k]][c]);
            }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                std::size_t x = pi2[a], y = pi2[b];
                if (x > y)
                    std::swap(x, y);
                put_ct(out, pkb, R[tri(n, x, y)]);
            }
        out.flush();
    }
    return st;
}

} // namespace

split_state setup(party_context& ctx, const setup_input& in, const cross_shares* cross)
{
    ctx.start();
    check_input(ctx, in, cross);
    ctx.enter("setup");
    auto st = ctx.who() == role::p1 ? setup_p1(ctx, in, cross) : setup_p2(ctx, in, cross);
    spdlog::debug("{}: setup done, n = {}", to_string(ctx.who()), st.n);
    return st;
}

} // namespace privhc::protocol
