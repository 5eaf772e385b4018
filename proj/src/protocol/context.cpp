#include "privhc/protocol/pca.hpp"

#include <sodium.h>

#include <spdlog/spdlog.h>

namespace privhc::protocol {

const char* to_string(role r) { return r == role::p1 ? "p1" : "p2"; }

void config::validate() const
{
    if (target < 1)
        throw usage_error("target cluster count must be at least 1");
    if (l < 1 || l > 32)
        throw usage_error("domain bits l must lie in [1, 32]");
    if (d < 1 || d > 4096)
        throw usage_error("dimension d must lie in [1, 4096]");
    if (key_bits != 512 && key_bits != 1024 && key_bits != 2048)
        throw usage_error("key bits must be 512, 1024 or 2048");
    if (opt && kind != linkage_kind::single)
        throw usage_error("the row-minimum variant requires single linkage");
    if (w().kappa + 1 > 127)
        throw usage_error("blinded values exceed 127 bits; lower l or d");
}

std::uint64_t config::hash() const
{
    std::string s = "privhc/1|" + variant + "|" + privhc::to_string(kind) + "|" + std::to_string(target) + "|" +
                    std::to_string(l) + "|" + std::to_string(d) + "|" + std::to_string(key_bits) + "|" +
                    (opt ? "opt" : "full") + "|" + extra;
    unsigned char h[crypto_hash_sha256_BYTES];
    crypto_hash_sha256(h, reinterpret_cast<const unsigned char*>(s.data()), s.size());
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = (v << 8) | h[i];
    return v;
}

party_context::party_context(role r, net::session& s, config cfg, std::optional<std::uint64_t> seed,
                             bool deterministic_keys)
    : role_(r), s_(s), cfg_(std::move(cfg)), w_(cfg_.w()),
      rng_(seed ? prg::from_seed(*seed, std::string("party-") + to_string(r)) : prg::from_entropy()),
      seed_(seed), det_keys_(deterministic_keys),
      gc_(s, r == role::p1 ? gc::party::garbler : gc::party::evaluator, rng_)
{
    cfg_.validate();
    since_ = std::chrono::steady_clock::now();
}

void party_context::start()
{
    if (started_)
        return;
    if (sodium_init() < 0)
        throw error("libsodium initialization failed");
    enter("handshake");
    s_.handshake(cfg_.hash());

    enter("keys");
    prg krng = det_keys_ && seed_ ? prg::from_seed(*seed_, std::string("paillier-") + to_string(role_))
                                  : prg::from_entropy();
    own_ = ahe::keygen(cfg_.key_bits, krng);
    const unsigned window = cfg_.key_bits <= 512 ? 7 : 8;
    own_.pk.precompute(window, rng_);
    s_.send(net::tag::pubkey, ahe::serialize(own_.pk));
    peer_ = ahe::deserialize_public(s_.recv(net::tag::pubkey));
    if (peer_.bits() + 16 < cfg_.key_bits)
        throw error("peer key shorter than configured");
    peer_.precompute(window, rng_);
    const mpz_class bound = mpz_class(1) << (w_.kappa + 1);
    if (bound >= own_.pk.n() || bound >= peer_.n())
        throw error("blinded values would overflow the plaintext space");
    spdlog::debug("{}: keys ready ({} bits)", to_string(role_), cfg_.key_bits);
    started_ = true;
}

const gc::circuit_spec& party_context::argmin(std::size_t n)
{
    auto it = argmin_.find(n);
    if (it == argmin_.end()) {
        // the row-minimum variant asks for a new width nearly every round
        if (argmin_.size() >= 8)
            argmin_.clear();
        it = argmin_.emplace(n, gc::build_argmin(n, w_.lambda, w_.kappa)).first;
    }
    return it->second;
}

const gc::circuit_spec& party_context::update_circuit()
{
    if (!update_)
        update_ = cfg_.kind == linkage_kind::single ? gc::build_mindist(w_.lambda, w_.kappa)
                                                    : gc::build_maxdist(w_.lambda, w_.kappa);
    return *update_;
}

void party_context::enter(const std::string& phase)
{
    auto now = std::chrono::steady_clock::now();
    if (!phase_.empty())
        ms_[phase_] += std::chrono::duration<double, std::milli>(now - since_).count();
    since_ = now;
    phase_ = phase;
    s_.set_phase(phase);
}

std::map<std::string, double> party_context::phase_ms() const
{
    auto out = ms_;
    if (!phase_.empty())
        out[phase_] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since_).count();
    return out;
}

setup_input setup_input::from_points(const std::vector<point_t>& pts)
{
    setup_input in;
    in.points = pts;
    in.values.assign(pts.begin(), pts.end());
    in.intra = plainhc::distance_matrix(pts);
    return in;
}

} // namespace privhc::protocol
