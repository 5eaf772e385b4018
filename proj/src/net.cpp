#include "privhc/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <cstdio>
#include <thread>

namespace privhc::net {

const char* tag_name(tag t)
{
    switch (t) {
    case tag::hello: return "HELLO";
    case tag::pubkey: return "PUBKEY";
    case tag::setup_h: return "SETUP_H";
    case tag::setup_d: return "SETUP_D";
    case tag::setup_blinded: return "SETUP_BLINDED";
    case tag::setup_return: return "SETUP_RETURN";
    case tag::setup_cross: return "SETUP_CROSS";
    case tag::gc_tables: return "GC_TABLES";
    case tag::gc_labels: return "GC_LABELS";
    case tag::ot_msg1: return "OT_MSG1";
    case tag::ot_msg2: return "OT_MSG2";
    case tag::ot_msg3: return "OT_MSG3";
    case tag::gc_output: return "GC_OUTPUT";
    case tag::out_sums: return "OUT_SUMS";
    case tag::out_plains: return "OUT_PLAINS";
    case tag::cure_reps: return "CURE_REPS";
    }
    return "UNKNOWN";
}

bool is_registered(std::uint8_t t)
{
    return t >= std::uint8_t(tag::hello) && t <= std::uint8_t(tag::cure_reps);
}

void meter::add_sent(const std::string& phase, tag t, std::uint64_t bytes)
{
    std::lock_guard lk(mu_);
    auto& c = c_[{phase, t}];
    c.sent += bytes;
    ++c.frames_sent;
}

void meter::add_received(const std::string& phase, tag t, std::uint64_t bytes)
{
    std::lock_guard lk(mu_);
    auto& c = c_[{phase, t}];
    c.received += bytes;
    ++c.frames_received;
}

std::map<std::pair<std::string, tag>, counters> meter::snapshot() const
{
    std::lock_guard lk(mu_);
    return c_;
}

static void accumulate(counters& into, const counters& c)
{
    into.sent += c.sent;
    into.received += c.received;
    into.frames_sent += c.frames_sent;
    into.frames_received += c.frames_received;
}

std::map<tag, counters> meter::by_tag() const
{
    std::map<tag, counters> out;
    for (const auto& [k, c] : snapshot())
        accumulate(out[k.second], c);
    return out;
}

std::map<std::string, counters> meter::by_phase() const
{
    std::map<std::string, counters> out;
    for (const auto& [k, c] : snapshot())
        accumulate(out[k.first], c);
    return out;
}

counters meter::total() const
{
    counters t;
    for (const auto& [k, c] : snapshot())
        accumulate(t, c);
    return t;
}

phase_table phase_report(const meter& m)
{
    phase_table t;
    for (const auto& [k, c] : m.snapshot()) {
        accumulate(t.phases[k.first], c);
        accumulate(t.tags[tag_name(k.second)], c);
        accumulate(t.phase_tags[k.first][tag_name(k.second)], c);
        accumulate(t.total, c);
    }
    return t;
}

std::string format_table(const phase_table& t)
{
    std::string out;
    char line[160];
    auto row = [&](const std::string& name, const counters& c) {
        std::snprintf(line, sizeof line, "%-26s %14llu %14llu\n", name.c_str(), (unsigned long long)c.sent,
                      (unsigned long long)c.received);
        out += line;
    };
    std::snprintf(line, sizeof line, "%-26s %14s %14s\n", "phase / tag", "sent", "received");
    out += line;
    for (const auto& [phase, tags] : t.phase_tags) {
        row(phase, t.phases.at(phase));
        for (const auto& [name, c] : tags)
            row("  " + name, c);
    }
    row("total", t.total);
    return out;
}

// ---------------------------------------------------------------- session

session::session(std::unique_ptr<stream> s, std::size_t frame_cap)
    : s_(std::move(s)), cap_(frame_cap), meter_(std::make_shared<meter>())
{
}

session::session(session&&) noexcept = default;
session& session::operator=(session&&) noexcept = default;

session::~session() { close(); }

void session::close()
{
    if (s_)
        s_->close();
}

void session::set_phase(std::string phase) { phase_ = std::move(phase); }

void session::send(tag t, std::vector<std::uint8_t> payload)
{
    if (!s_)
        throw error("net: session closed");
    if (payload.size() > cap_)
        throw error("net: oversized frame (" + std::to_string(payload.size()) + " bytes, tag " + tag_name(t) + ")");
    const std::uint32_t len = std::uint32_t(payload.size());
    std::vector<std::uint8_t> buf;
    buf.reserve(payload.size() + 5);
    buf.push_back(std::uint8_t(t));
    for (int s = 24; s >= 0; s -= 8)
        buf.push_back(std::uint8_t(len >> s));
    buf.insert(buf.end(), payload.begin(), payload.end());
    payload.clear();
    payload.shrink_to_fit();
    s_->write(std::move(buf));
    meter_->add_sent(phase_, t, std::uint64_t(len) + 5);
}

frame session::recv()
{
    if (!s_)
        throw error("net: session closed");
    std::uint8_t hdr[5];
    s_->read(hdr, 5);
    if (!is_registered(hdr[0]))
        throw error("net: unregistered frame tag " + std::to_string(hdr[0]));
    std::uint32_t len = (std::uint32_t(hdr[1]) << 24) | (std::uint32_t(hdr[2]) << 16) | (std::uint32_t(hdr[3]) << 8) |
                        std::uint32_t(hdr[4]);
    if (len > cap_)
        throw error("net: oversized frame (" + std::to_string(len) + " bytes)");
    frame f;
    f.t = tag(hdr[0]);
    f.payload.resize(len);
    if (len)
        s_->read(f.payload.data(), len);
    meter_->add_received(phase_, f.t, std::uint64_t(len) + 5);
    return f;
}

std::vector<std::uint8_t> session::recv(tag expected)
{
    frame f = recv();
    if (f.t != expected)
        throw error(std::string("net: protocol desync, expected ") + tag_name(expected) + " got " + tag_name(f.t));
    return std::move(f.payload);
}

void session::handshake(std::uint64_t config_hash)
{
    std::string saved = phase_;
    phase_ = "handshake";
    s_->write(std::vector<std::uint8_t>{protocol_version});
    std::vector<std::uint8_t> hello{protocol_version};
    for (int s = 56; s >= 0; s -= 8)
        hello.push_back(std::uint8_t(config_hash >> s));
    send(tag::hello, hello);

    std::uint8_t peer_version = 0;
    s_->read(&peer_version, 1);
    if (peer_version != protocol_version)
        throw error("net: protocol version mismatch");
    auto got = recv(tag::hello);
    if (got.size() != 9 || got[0] != protocol_version)
        throw error("net: malformed HELLO");
    std::uint64_t h = 0;
    for (int k = 1; k < 9; ++k)
        h = (h << 8) | got[k];
    phase_ = saved;
    if (h != config_hash)
        throw error("net: config hash mismatch, peer configured differently");
}

// ---------------------------------------------------------------- in-process

namespace {

struct pipe_dir {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<std::uint8_t>> chunks;
    std::size_t offset = 0;
    bool closed = false;
};

struct pipe_pair {
    pipe_dir dir[2];
};

class pipe_stream final : public stream {
public:
    pipe_stream(std::shared_ptr<pipe_pair> p, int out) : p_(std::move(p)), out_(out) {}
    ~pipe_stream() override { close(); }

    void write(std::vector<std::uint8_t>&& bytes) override
    {
        auto& d = p_->dir[out_];
        std::lock_guard lk(d.mu);
        if (d.closed)
            throw error("net: peer closed");
        d.chunks.push_back(std::move(bytes));
        d.cv.notify_all();
    }

    void read(std::uint8_t* dst, std::size_t n) override
    {
        auto& d = p_->dir[1 - out_];
        std::unique_lock lk(d.mu);
        while (n) {
            d.cv.wait(lk, [&] { return !d.chunks.empty() || d.closed; });
            if (d.chunks.empty())
                throw error("net: peer closed");
            auto& front = d.chunks.front();
            std::size_t take = std::min(n, front.size() - d.offset);
            std::memcpy(dst, front.data() + d.offset, take);
            dst += take;
            n -= take;
            d.offset += take;
            if (d.offset == front.size()) {
                d.chunks.pop_front();
                d.offset = 0;
            }
        }
    }

    void close() override
    {
        for (auto& d : p_->dir) {
            std::lock_guard lk(d.mu);
            d.closed = true;
            d.cv.notify_all();
        }
    }

private:
    std::shared_ptr<pipe_pair> p_;
    int out_;
};

class tcp_stream final : public stream {
public:
    explicit tcp_stream(int fd) : fd_(fd)
    {
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    }
    ~tcp_stream() override
    {
        close();
    }

    void write(std::vector<std::uint8_t>&& bytes) override
    {
        const std::uint8_t* p = bytes.data();
        std::size_t n = bytes.size();
        while (n) {
            ssize_t w = ::send(fd_, p, n, MSG_NOSIGNAL);
            if (w < 0) {
                if (errno == EINTR)
                    continue;
                throw error(std::string("net: send failed: ") + std::strerror(errno));
            }
            p += w;
            n -= std::size_t(w);
        }
    }

    void read(std::uint8_t* dst, std::size_t n) override
    {
        while (n) {
            ssize_t r = ::recv(fd_, dst, n, 0);
            if (r == 0)
                throw error("net: peer closed");
            if (r < 0) {
                if (errno == EINTR)
                    continue;
                throw error(std::string("net: recv failed: ") + std::strerror(errno));
            }
            dst += r;
            n -= std::size_t(r);
        }
    }

    void close() override
    {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    int fd_;
};

sockaddr_in resolve(const std::string& host, std::uint16_t port)
{
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1)
        return addr;
    addrinfo hints{}, *res = nullptr;
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res)
        throw error("net: cannot resolve " + host);
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
    return addr;
}

} // namespace

std::pair<session, session> inprocess_pair(std::size_t frame_cap)
{
    auto p = std::make_shared<pipe_pair>();
    return {session(std::make_unique<pipe_stream>(p, 0), frame_cap),
            session(std::make_unique<pipe_stream>(p, 1), frame_cap)};
}

endpoint endpoint::parse(const std::string& s)
{
    auto colon = s.rfind(':');
    endpoint ep;
    std::string port = s;
    if (colon != std::string::npos) {
        if (colon > 0)
            ep.host = s.substr(0, colon);
        port = s.substr(colon + 1);
    }
    try {
        unsigned long v = std::stoul(port);
        if (v > 65535)
            throw std::out_of_range("port");
        ep.port = std::uint16_t(v);
    } catch (const std::exception&) {
        throw usage_error("bad endpoint: " + s);
    }
    return ep;
}

listener_socket::listener_socket(const std::string& host, std::uint16_t port)
{
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0)
        throw error("net: socket failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = resolve(host, port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(fd_, 1) < 0) {
        ::close(fd_);
        throw error(std::string("net: bind/listen failed: ") + std::strerror(errno));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

listener_socket::~listener_socket()
{
    if (fd_ >= 0)
        ::close(fd_);
}

session listener_socket::accept(double timeout_seconds)
{
    pollfd pfd{fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, int(timeout_seconds * 1000));
    if (rc == 0)
        throw error("net: accept timed out");
    if (rc < 0)
        throw error("net: poll failed");
    int c = ::accept(fd_, nullptr, nullptr);
    if (c < 0)
        throw error("net: accept failed");
    return session(std::make_unique<tcp_stream>(c));
}

session connect(role r, const endpoint& ep, double timeout_seconds)
{
    if (r == role::listener) {
        listener_socket l(ep.host, ep.port);
        return l.accept(timeout_seconds);
    }
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    sockaddr_in addr = resolve(ep.host, ep.port);
    for (;;) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0)
            throw error("net: socket failed");
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0)
            return session(std::make_unique<tcp_stream>(fd));
        int err = errno;
        ::close(fd);
        if (err != ECONNREFUSED && err != ENOENT && err != ETIMEDOUT)
            throw error(std::string("net: connect failed: ") + std::strerror(err));
        if (std::chrono::steady_clock::now() > deadline)
            throw error("net: connect timed out (refused)");
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

} // namespace privhc::net
