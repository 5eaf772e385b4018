#pragma once

#include "privhc/cure.hpp"
#include "privhc/data.hpp"
#include "privhc/protocol/run.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace privhc::report {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_id = "privhc-run-report/1";

// Everything both parties must agree on, plus the local seeds.
struct run_spec {
    std::string variant = "pca"; // pca | opt | pcure0 | pcure1 | pcure2
    linkage_kind kind = linkage_kind::single;
    std::size_t targets = 1;
    unsigned key_bits = 1024;
    cure::params prm;
    std::uint64_t seed = 1; // sampling seed of the CURE variants
    std::optional<std::uint64_t> protocol_seed;
    bool deterministic_keys = false;
    bool timings = true;

    bool is_cure() const;
    protocol::config config(unsigned l, unsigned d) const;
    void validate(unsigned l, unsigned d) const;
    json echo(unsigned l, unsigned d) const;
};

struct party_outcome {
    protocol::role who = protocol::role::p1;
    std::optional<protocol::pca_result> pca;
    std::optional<cure::result> cure;
    json doc;
};

party_outcome run_party(protocol::role r, net::session& s, const data::labeled_dataset& own, const run_spec& spec);

// Single-party document as written by a networked party.
json party_document(const run_spec& spec, const data::labeled_dataset& own, const party_outcome& out);

// Both parties over the in-process channel; adds joint accuracy when labeled.
json run_loopback(const data::labeled_dataset& p, const data::labeled_dataset& q, const run_spec& spec);

struct plain_spec {
    std::string mode = "hc"; // hc | cure | pcure0
    linkage_kind kind = linkage_kind::single;
    std::size_t targets = 1;
    cure::params prm;
    std::uint64_t seed = 1;
    bool timings = true;
};

json run_plain(const data::labeled_dataset& ds, const plain_spec& spec);

// Stable text: two-space indent, trailing newline.
std::string dump(const json& doc);
// Short human summary of a document.
std::string summary(const json& doc);

} // namespace privhc::report
