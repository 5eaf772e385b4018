#include "privhc/types.hpp"

#include <algorithm>

namespace privhc {

const char* to_string(linkage_kind k)
{
    return k == linkage_kind::single ? "single" : "complete";
}

linkage_kind parse_linkage(const std::string& s)
{
    if (s == "single")
        return linkage_kind::single;
    if (s == "complete")
        return linkage_kind::complete;
    throw usage_error("unknown linkage: " + s);
}

std::string word_to_string(word_t w)
{
    if (w == 0)
        return "0";
    std::string s;
    while (w) {
        s.push_back(char('0' + unsigned(w % 10)));
        w /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

} // namespace privhc
