#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace privhc {

// Wide unsigned integer used for blinded values and GC word inputs.
using word_t = unsigned __int128;

using point_t = std::vector<std::uint64_t>;

enum class linkage_kind { single, complete };

const char* to_string(linkage_kind k);
linkage_kind parse_linkage(const std::string& s);

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class usage_error : public error {
public:
    using error::error;
};

inline word_t word_mask(unsigned bits)
{
    return bits >= 128 ? ~word_t(0) : ((word_t(1) << bits) - 1);
}

inline unsigned ceil_log2(std::uint64_t n)
{
    unsigned b = 0;
    while ((std::uint64_t(1) << b) < n)
        ++b;
    return b;
}

std::string word_to_string(word_t w);

// Security and width parameters derived from the domain bits l and dimension d.
struct widths {
    unsigned lambda = 0;
    unsigned kappa = 0;

    static widths derive(unsigned l, unsigned d, unsigned sigma = 40)
    {
        widths w;
        w.lambda = 2 * l + ceil_log2(d);
        w.kappa = w.lambda + sigma;
        return w;
    }
    unsigned blinded() const { return kappa + 1; }
};

} // namespace privhc
