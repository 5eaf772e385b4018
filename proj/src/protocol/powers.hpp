#pragma once
// Fixed-window power tables for products of ciphertext powers.

#include "privhc/ahe.hpp"
#include "privhc/types.hpp"

#include <vector>

namespace privhc::protocol::detail {

constexpr unsigned exp_window = 4;

// t[c][i][v] = base_c^(v * 16^i) mod n2
struct power_table {
    std::vector<mpz_class> t;
    unsigned windows = 0;
};

inline power_table build_powers(const std::vector<ahe::ciphertext>& bases, unsigned l, const mpz_class& n2)
{
    power_table pt;
    pt.windows = (l + exp_window - 1) / exp_window;
    const std::size_t width = std::size_t(1) << exp_window;
    pt.t.resize(bases.size() * pt.windows * width);
    for (std::size_t c = 0; c < bases.size(); ++c) {
        mpz_class base = bases[c].value;
        for (unsigned i = 0; i < pt.windows; ++i) {
            mpz_class* row = &pt.t[(c * pt.windows + i) * width];
            row[0] = 1;
            for (std::size_t v = 1; v < width; ++v)
                row[v] = (row[v - 1] * base) % n2;
            base = (row[width - 1] * base) % n2;
        }
    }
    return pt;
}

// start * prod_c base_c^{p_c} mod n2
inline mpz_class multi_pow(const power_table& pt, const point_t& p, const mpz_class& start, const mpz_class& n2)
{
    const std::size_t width = std::size_t(1) << exp_window;
    mpz_class acc = start;
    for (std::size_t c = 0; c < p.size(); ++c)
        for (unsigned i = 0; i < pt.windows; ++i) {
            const unsigned digit = unsigned(p[c] >> (exp_window * i)) & unsigned(width - 1);
            if (digit == 0)
                continue;
            mpz_mul(acc.get_mpz_t(), acc.get_mpz_t(), pt.t[(c * pt.windows + i) * width + digit].get_mpz_t());
            mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(), n2.get_mpz_t());
        }
    return acc;
}

inline word_t sq_norm(const point_t& p)
{
    word_t s = 0;
    for (auto c : p)
        s += word_t(c) * c;
    return s;
}

} // namespace privhc::protocol::detail
