#pragma once

#include "privhc/types.hpp"

#include <cstdint>
#include <cstring>
#include <vector>

namespace privhc {

// Big-endian byte writer/reader used by every wire payload.
class writer {
public:
    std::vector<std::uint8_t> buf;

    void u8(std::uint8_t v) { buf.push_back(v); }
    void u32(std::uint32_t v) { be(v, 4); }
    void u64(std::uint64_t v) { be(v, 8); }
    void word(word_t v, std::size_t bytes)
    {
        for (std::size_t k = bytes; k-- > 0;)
            buf.push_back(std::uint8_t(v >> (8 * k)));
    }
    void bytes(const std::uint8_t* p, std::size_t n) { buf.insert(buf.end(), p, p + n); }

private:
    void be(std::uint64_t v, int n)
    {
        for (int k = n - 1; k >= 0; --k)
            buf.push_back(std::uint8_t(v >> (8 * k)));
    }
};

class reader {
public:
    reader(const std::uint8_t* p, std::size_t n) : p_(p), end_(p + n) {}
    explicit reader(const std::vector<std::uint8_t>& v) : reader(v.data(), v.size()) {}

    std::uint8_t u8() { return std::uint8_t(be(1)); }
    std::uint32_t u32() { return std::uint32_t(be(4)); }
    std::uint64_t u64() { return be(8); }
    word_t word(std::size_t bytes)
    {
        need(bytes);
        word_t v = 0;
        for (std::size_t k = 0; k < bytes; ++k)
            v = (v << 8) | *p_++;
        return v;
    }
    const std::uint8_t* take(std::size_t n)
    {
        need(n);
        auto r = p_;
        p_ += n;
        return r;
    }
    const std::uint8_t*& cursor() { return p_; }
    const std::uint8_t* end() const { return end_; }
    std::size_t remaining() const { return std::size_t(end_ - p_); }
    void expect_end() const
    {
        if (p_ != end_)
            throw error("malformed message: trailing bytes");
    }

private:
    void need(std::size_t n) const
    {
        if (std::size_t(end_ - p_) < n)
            throw error("malformed message: truncated");
    }
    std::uint64_t be(int n)
    {
        need(std::size_t(n));
        std::uint64_t v = 0;
        for (int k = 0; k < n; ++k)
            v = (v << 8) | *p_++;
        return v;
    }

    const std::uint8_t* p_;
    const std::uint8_t* end_;
};

inline std::size_t word_bytes(unsigned bits) { return (bits + 7) / 8; }

} // namespace privhc
