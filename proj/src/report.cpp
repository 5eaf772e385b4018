#include "privhc/report.hpp"

#include <chrono>
#include <set>
#include <sstream>

namespace privhc::report {

using protocol::role;

bool run_spec::is_cure() const { return variant.rfind("pcure", 0) == 0; }

protocol::config run_spec::config(unsigned l, unsigned d) const
{
    if (is_cure())
        return cure::make_config(cure::parse_variant(variant), kind, targets, l, d, prm, key_bits, true);
    protocol::config c;
    c.variant = "pca";
    c.kind = kind;
    c.target = targets;
    c.l = l;
    c.d = d;
    c.key_bits = key_bits;
    c.opt = variant == "opt";
    return c;
}

void run_spec::validate(unsigned l, unsigned d) const
{
    if (variant != "pca" && variant != "opt" && !is_cure())
        throw usage_error("unknown variant '" + variant + "'");
    if (is_cure()) {
        const auto v = cure::parse_variant(variant);
        if (v == cure::variant::plain)
            throw usage_error("plain CURE is not a two-party variant");
        prm.validate(prm.s, targets, v);
    }
    if (deterministic_keys && !protocol_seed)
        throw usage_error("deterministic keys need a fixed protocol seed");
    config(l, d).validate();
}

json run_spec::echo(unsigned l, unsigned d) const
{
    json j;
    j["variant"] = variant;
    j["linkage"] = to_string(kind);
    j["targets"] = targets;
    j["l"] = l;
    j["d"] = d;
    j["key_bits"] = key_bits;
    j["seed"] = seed;
    if (protocol_seed)
        j["protocol_seed"] = *protocol_seed;
    j["deterministic_keys"] = deterministic_keys;
    if (is_cure())
        j["cure"] = {{"s", prm.s}, {"p", prm.p}, {"q", prm.q}, {"t1", prm.t1}, {"t2", prm.t2}, {"R", prm.R}};
    return j;
}

namespace {

json words(const std::vector<word_t>& v)
{
    json a = json::array();
    for (auto x : v)
        a.push_back(word_to_string(x));
    return a;
}

json counters_json(const net::counters& c)
{
    return {{"sent", c.sent}, {"received", c.received}, {"frames_sent", c.frames_sent},
            {"frames_received", c.frames_received}};
}

json traffic(const net::meter& m, const std::map<std::string, double>& ms, double total_ms, bool timings)
{
    const auto t = net::phase_report(m);
    std::set<std::string> names;
    for (auto& [k, v] : t.phases)
        names.insert(k);
    for (auto& [k, v] : ms)
        names.insert(k);

    json phases = json::array();
    for (auto& name : names) {
        json p;
        p["name"] = name;
        if (timings) {
            auto it = ms.find(name);
            p["ms"] = it == ms.end() ? 0.0 : it->second;
        }
        auto c = t.phases.count(name) ? t.phases.at(name) : net::counters{};
        p.update(counters_json(c));
        json tags = json::object();
        if (t.phase_tags.count(name))
            for (auto& [tag, tc] : t.phase_tags.at(name))
                tags[tag] = {{"sent", tc.sent}, {"received", tc.received}};
        p["tags"] = tags;
        phases.push_back(p);
    }
    json total = counters_json(t.total);
    if (timings)
        total["ms"] = total_ms;
    json tags = json::object();
    for (auto& [tag, tc] : t.tags)
        tags[tag] = {{"sent", tc.sent}, {"received", tc.received}};
    return {{"phases", phases}, {"total", total}, {"tags", tags}};
}

json pca_json(const protocol::pca_result& r)
{
    json j;
    j["rounds"] = r.rounds;
    j["comparators"] = r.comparators;
    json mh = json::array();
    for (auto [a, b] : r.sigma.merges())
        mh.push_back({a, b});
    j["merge_history"] = mh;
    const auto tree = r.sigma.decode();
    json merges = json::array();
    for (auto& m : tree.merges)
        merges.push_back({m.left, m.right, m.parent});
    j["dendrogram"] = {{"leaves", tree.leaf_count}, {"merges", merges}};
    json cl = json::array();
    for (auto& t : r.targets)
        cl.push_back({{"id", t.cluster_id},
                      {"slot", t.slot},
                      {"size", t.size},
                      {"members", t.members},
                      {"centroid", {{"num", words(t.sums)}, {"den", t.size}}}});
    j["clusters"] = cl;
    return j;
}

json model_json(const cure::cluster_model& m)
{
    json cl = json::array();
    for (std::size_t i = 0; i < m.clusters.size(); ++i) {
        auto& c = m.clusters[i];
        json reps = json::array();
        for (auto& r : c.reps)
            reps.push_back({{"num", words(r.sum)}, {"den", r.weight}});
        cl.push_back({{"id", i}, {"source", to_string(c.source)}, {"size", c.size}, {"reps", reps}});
    }
    return cl;
}

json cure_json(const cure::result& r)
{
    json j;
    j["sample"] = r.sample;
    j["a_clusters"] = r.a_clusters;
    j["comparators"] = r.comparators;
    j["clusters"] = model_json(r.model);
    // own points per cluster
    std::vector<std::uint64_t> local(r.model.clusters.size(), 0);
    for (auto c : r.labels)
        ++local.at(c);
    j["assigned"] = local;
    return j;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

json header(const char* command)
{
    json j;
    j["schema"] = schema_id;
    j["command"] = command;
    return j;
}

// Composite-permuted target members mapped back to rows of p || q.
std::vector<std::size_t> pca_assignment(const protocol::pca_result& a, const protocol::pca_result& b,
                                        std::size_t n)
{
    const auto order = plainhc::compose(a.perm, b.perm);
    std::vector<std::size_t> out(n, plainhc::npos);
    for (std::size_t c = 0; c < a.targets.size(); ++c)
        for (auto k : a.targets[c].members)
            out.at(order.at(k)) = c;
    return out;
}

} // namespace

party_outcome run_party(role r, net::session& s, const data::labeled_dataset& own, const run_spec& spec)
{
    spec.validate(own.l, unsigned(own.d));
    const auto t0 = std::chrono::steady_clock::now();
    protocol::party_context ctx(r, s, spec.config(own.l, unsigned(own.d)), spec.protocol_seed,
                                spec.deterministic_keys);
    party_outcome out;
    out.who = r;
    json body;
    if (spec.is_cure()) {
        out.cure = cure::run_variant(cure::parse_variant(spec.variant), ctx, own.points, spec.prm, spec.seed);
        body = cure_json(*out.cure);
        if (own.labeled())
            body["accuracy"] = plainhc::accuracy_of_assignment(out.cure->labels, own.labels);
    } else {
        out.pca = protocol::run_pca(ctx, own.points);
        body = pca_json(*out.pca);
    }
    const double total = elapsed_ms(t0);
    out.doc["role"] = protocol::to_string(r);
    out.doc["points"] = own.size();
    out.doc.update(body);
    out.doc.update(traffic(s.stats(), ctx.phase_ms(), total, spec.timings));
    return out;
}

json party_document(const run_spec& spec, const data::labeled_dataset& own, const party_outcome& out)
{
    json j = header("party");
    j["params"] = spec.echo(own.l, unsigned(own.d));
    j["loopback"] = false;
    j["parties"] = json::array({out.doc});
    return j;
}

json run_loopback(const data::labeled_dataset& p, const data::labeled_dataset& q, const run_spec& spec)
{
    if (p.l != q.l || p.d != q.d)
        throw usage_error("loopback: both halves need the same l and d");
    spec.validate(p.l, unsigned(p.d));
    auto [s1, s2] = net::inprocess_pair();
    party_outcome o1, o2;
    protocol::run_loopback(
        s1, s2, [&](net::session& s) { o1 = run_party(role::p1, s, p, spec); },
        [&](net::session& s) { o2 = run_party(role::p2, s, q, spec); });

    json j = header("party");
    j["params"] = spec.echo(p.l, unsigned(p.d));
    j["loopback"] = true;
    j["parties"] = json::array({o1.doc, o2.doc});
    j["agree"] = o1.doc["clusters"] == o2.doc["clusters"] &&
                 o1.doc.value("merge_history", json()) == o2.doc.value("merge_history", json());
    if (p.labeled() && q.labeled()) {
        std::vector<std::int64_t> truth = p.labels;
        truth.insert(truth.end(), q.labels.begin(), q.labels.end());
        std::vector<std::size_t> assign;
        if (spec.is_cure()) {
            assign = o1.cure->labels;
            assign.insert(assign.end(), o2.cure->labels.begin(), o2.cure->labels.end());
        } else {
            assign = pca_assignment(*o1.pca, *o2.pca, truth.size());
        }
        j["accuracy"] = plainhc::accuracy_of_assignment(assign, truth);
    }
    return j;
}

json run_plain(const data::labeled_dataset& ds, const plain_spec& spec)
{
    if (spec.mode == "pcure0") {
        run_spec rs;
        rs.variant = "pcure0";
        rs.kind = spec.kind;
        rs.targets = spec.targets;
        rs.prm = spec.prm;
        rs.seed = spec.seed;
        rs.protocol_seed = spec.seed;
        rs.timings = spec.timings;
        auto [p, q] = data::split_half(ds, spec.seed);
        json j = run_loopback(p, q, rs);
        j["command"] = "plain";
        j["params"]["mode"] = "pcure0";
        return j;
    }
    if (spec.mode != "hc" && spec.mode != "cure")
        throw usage_error("unknown plain mode '" + spec.mode + "'");

    const auto t0 = std::chrono::steady_clock::now();
    json j = header("plain");
    json prm = {{"mode", spec.mode}, {"linkage", to_string(spec.kind)}, {"targets", spec.targets},
                {"l", ds.l}, {"d", ds.d}, {"seed", spec.seed}};
    std::vector<std::size_t> assign;
    if (spec.mode == "hc") {
        if (spec.targets < 1 || spec.targets > ds.size())
            throw usage_error("targets must lie in [1, n]");
        auto r = plainhc::hc_run(ds.points, spec.kind, spec.targets);
        json merges = json::array();
        for (auto& m : r.tree.merges)
            merges.push_back({m.left, m.right, m.parent});
        j["params"] = prm;
        j["dendrogram"] = {{"leaves", r.tree.leaf_count}, {"merges", merges}};
        json cl = json::array();
        assign.assign(ds.size(), plainhc::npos);
        for (std::size_t c = 0; c < r.meta.size(); ++c) {
            json num = json::array();
            for (auto x : r.meta[c].rep_sum)
                num.push_back(std::to_string(x));
            cl.push_back({{"id", c}, {"size", r.meta[c].size}, {"centroid", {{"num", num}, {"den", r.meta[c].size}}}});
            for (auto i : r.tree.target_clusters[c])
                assign[i] = c;
        }
        j["clusters"] = cl;
    } else {
        auto r = cure::cure_plain(ds.points, spec.prm, spec.seed, spec.kind, spec.targets);
        prm["cure"] = {{"s", spec.prm.s}, {"p", spec.prm.p}, {"q", spec.prm.q},
                       {"t1", spec.prm.t1}, {"t2", spec.prm.t2}, {"R", spec.prm.R}};
        j["params"] = prm;
        j["sample"] = r.sample;
        j["a_clusters"] = r.a_clusters;
        j["clusters"] = model_json(r.model);
        assign = r.labels;
    }
    if (ds.labeled())
        j["accuracy"] = plainhc::accuracy_of_assignment(assign, ds.labels);
    if (spec.timings)
        j["ms"] = elapsed_ms(t0);
    return j;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::string summary(const json& doc)
{
    std::ostringstream os;
    const auto& prm = doc.at("params");
    os << doc.value("command", "") << " " << prm.value("variant", prm.value("mode", "")) << " "
       << prm.value("linkage", "") << " targets=" << prm.value("targets", 0) << "\n";
    auto clusters = [&](const json& c) {
        for (auto& e : c) {
            os << "  cluster " << e.at("id").get<std::size_t>() << " size " << e.at("size").get<std::uint64_t>();
            if (e.contains("source"))
                os << " (" << e.at("source").get<std::string>() << ")";
            os << "\n";
        }
    };
    if (doc.contains("parties")) {
        for (auto& p : doc.at("parties")) {
            const auto& t = p.at("total");
            os << p.at("role").get<std::string>() << ": " << p.at("points").get<std::size_t>() << " points, sent "
               << t.at("sent").get<std::uint64_t>() << " B, received " << t.at("received").get<std::uint64_t>()
               << " B";
            if (t.contains("ms"))
                os << ", " << t.at("ms").get<double>() << " ms";
            os << "\n";
        }
        clusters(doc.at("parties").at(0).at("clusters"));
    } else {
        clusters(doc.at("clusters"));
    }
    if (doc.contains("accuracy"))
        os << "accuracy " << doc.at("accuracy").get<double>() << "\n";
    return os.str();
}

} // namespace privhc::report
