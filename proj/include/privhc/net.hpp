#pragma once

#include "privhc/types.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace privhc::net {

constexpr std::uint8_t protocol_version = 1;
constexpr std::size_t default_frame_cap = std::size_t(64) << 20;

enum class tag : std::uint8_t {
    hello = 1,
    pubkey,
    setup_h,
    setup_d,
    setup_blinded,
    setup_return,
    setup_cross,
    gc_tables,
    gc_labels,
    ot_msg1,
    ot_msg2,
    ot_msg3,
    gc_output,
    out_sums,
    out_plains,
    cure_reps,
};

const char* tag_name(tag t);
bool is_registered(std::uint8_t t);

struct counters {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_received = 0;
    bool operator==(const counters&) const = default;
};

// Thread-safe per-(phase, tag) byte counters. Bytes include the 5-byte header.
class meter {
public:
    void add_sent(const std::string& phase, tag t, std::uint64_t bytes);
    void add_received(const std::string& phase, tag t, std::uint64_t bytes);

    std::map<std::pair<std::string, tag>, counters> snapshot() const;
    std::map<tag, counters> by_tag() const;
    std::map<std::string, counters> by_phase() const;
    counters total() const;

private:
    mutable std::mutex mu_;
    std::map<std::pair<std::string, tag>, counters> c_;
};

struct phase_table {
    std::map<std::string, counters> phases;
    std::map<std::string, counters> tags;
    std::map<std::string, std::map<std::string, counters>> phase_tags;
    counters total;
};

phase_table phase_report(const meter& m);
std::string format_table(const phase_table& t);

// Reliable ordered byte stream.
class stream {
public:
    virtual ~stream() = default;
    virtual void write(std::vector<std::uint8_t>&& bytes) = 0;
    virtual void read(std::uint8_t* dst, std::size_t n) = 0;
    virtual void close() = 0;
};

struct frame {
    tag t{};
    std::vector<std::uint8_t> payload;
};

class session {
public:
    explicit session(std::unique_ptr<stream> s, std::size_t frame_cap = default_frame_cap);
    session(session&&) noexcept;
    session& operator=(session&&) noexcept;
    ~session();

    void send(tag t, std::vector<std::uint8_t> payload);
    frame recv();
    // Receives one frame and checks its tag.
    std::vector<std::uint8_t> recv(tag expected);

    // Exchanges version byte and HELLO(version, config hash); aborts on mismatch.
    void handshake(std::uint64_t config_hash);

    void set_phase(std::string phase);
    const std::string& phase() const { return phase_; }
    const meter& stats() const { return *meter_; }
    std::shared_ptr<const meter> stats_handle() const { return meter_; }

    void close();

private:
    std::unique_ptr<stream> s_;
    std::size_t cap_;
    std::string phase_ = "default";
    std::shared_ptr<meter> meter_;
};

// Streams fixed-size items under one tag in frames of at most cap bytes; an
// item never straddles two frames. flush() must be called once at the end.
class chunk_writer {
public:
    chunk_writer(session& s, tag t, std::size_t cap = std::size_t(8) << 20) : s_(s), t_(t), cap_(cap) {}

    // Buffer with room for n more bytes; append to it directly.
    std::vector<std::uint8_t>& room(std::size_t n)
    {
        if (!buf_.empty() && buf_.size() + n > cap_)
            flush();
        return buf_;
    }
    std::uint8_t* reserve(std::size_t n)
    {
        auto& b = room(n);
        b.resize(b.size() + n);
        return b.data() + b.size() - n;
    }
    void flush()
    {
        if (buf_.empty())
            return;
        s_.send(t_, std::move(buf_));
        buf_ = {};
    }

private:
    session& s_;
    tag t_;
    std::size_t cap_;
    std::vector<std::uint8_t> buf_;
};

class chunk_reader {
public:
    chunk_reader(session& s, tag t) : s_(s), t_(t) {}

    const std::uint8_t* take(std::size_t n)
    {
        if (pos_ == buf_.size()) {
            buf_ = s_.recv(t_);
            pos_ = 0;
        }
        if (buf_.size() - pos_ < n)
            throw error("net: item straddles frame boundary");
        pos_ += n;
        return buf_.data() + pos_ - n;
    }
    bool drained() const { return pos_ == buf_.size(); }

private:
    session& s_;
    tag t_;
    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

// Connected in-process session pair for tests and loopback mode.
std::pair<session, session> inprocess_pair(std::size_t frame_cap = default_frame_cap);

enum class role { listener, dialer };

struct endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    static endpoint parse(const std::string& s);
};

// TCP session. Listener binds and accepts one peer; dialer retries until timeout.
session connect(role r, const endpoint& ep, double timeout_seconds = 30.0);

// For tests: bind an ephemeral listening socket and report its port.
class listener_socket {
public:
    explicit listener_socket(const std::string& host = "127.0.0.1", std::uint16_t port = 0);
    ~listener_socket();
    std::uint16_t port() const { return port_; }
    session accept(double timeout_seconds = 30.0);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

} // namespace privhc::net
