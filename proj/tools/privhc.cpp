#include "privhc/report.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

using namespace privhc;
using report::json;

namespace {

void setup_logging()
{
    auto log = spdlog::stderr_color_mt("privhc");
    spdlog::set_default_logger(log);
    spdlog::set_level(spdlog::level::warn);
    if (const char* v = std::getenv("PRIVHC_LOG")) {
        auto lvl = spdlog::level::from_str(v);
        if (lvl == spdlog::level::off && std::string(v) != "off")
            throw usage_error(std::string("PRIVHC_LOG: unknown level '") + v + "'");
        spdlog::set_level(lvl);
    }
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text))
        throw error("cannot write " + path);
}

void emit(const json& doc, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << report::dump(doc);
        return;
    }
    write_file(path, report::dump(doc));
    std::cout << report::summary(doc);
}

std::vector<std::int64_t> lower_classes(const data::labeled_dataset& ds)
{
    std::set<std::int64_t> cl(ds.labels.begin(), ds.labels.end());
    std::vector<std::int64_t> v(cl.begin(), cl.end());
    v.resize((v.size() + 1) / 2);
    return v;
}

std::pair<data::labeled_dataset, data::labeled_dataset> split(const data::labeled_dataset& ds,
                                                              const std::string& how, std::uint64_t seed)
{
    if (how == "class") {
        if (!ds.labeled())
            throw usage_error("--split class needs labeled data");
        return data::split_by_class(ds, lower_classes(ds));
    }
    if (how != "random")
        throw usage_error("--split must be random or class");
    return data::split_half(ds, seed);
}

struct cure_flags {
    cure::params prm;
    void add(CLI::App* c)
    {
        c->add_option("--s", prm.s, "sample size")->capture_default_str();
        c->add_option("--p", prm.p, "partitions")->capture_default_str();
        c->add_option("--q", prm.q, "reduction factor per partition")->capture_default_str();
        c->add_option("--t1", prm.t1, "A-cluster elimination size")->capture_default_str();
        c->add_option("--t2", prm.t2, "B-cluster elimination size")->capture_default_str();
        c->add_option("--R", prm.R, "representatives per cluster")->capture_default_str();
    }
};

// ---- bench

struct bench_args {
    std::string suite = "accuracy";
    std::size_t seeds = 3;
    std::string out = "bench-out";
    std::size_t n = 10000;
    std::size_t d = 10;
    std::size_t targets = 5;
    unsigned key_bits = 512;
    std::string split = "random";
    std::vector<std::size_t> sizes;
    std::vector<std::string> variants;
    std::vector<double> outliers;
    cure_flags cf;
};

double mean(const std::vector<double>& v)
{
    double s = 0;
    for (auto x : v)
        s += x;
    return v.empty() ? 0 : s / double(v.size());
}

json bench_accuracy(const bench_args& a, const std::string& dir)
{
    auto sizes = a.sizes.empty() ? std::vector<std::size_t>{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000}
                                 : a.sizes;
    auto variants = a.variants.empty() ? std::vector<std::string>{"cure", "pcure0", "pcure1", "pcure2"} : a.variants;
    auto outliers = a.outliers.empty() ? std::vector<double>{0.001, 0.01, 0.05} : a.outliers;

    std::ofstream csv(dir + "/accuracy.csv");
    csv << "outliers,s,variant,seed,accuracy,bytes,ms\n";
    json cells = json::array();
    for (double o : outliers)
        for (auto s : sizes)
            for (auto& v : variants) {
                std::vector<double> acc;
                json runs = json::array();
                for (std::size_t k = 1; k <= a.seeds; ++k) {
                    try {
                        data::gen_spec g;
                        g.n = a.n;
                        g.d = a.d;
                        g.outlier_frac = o;
                        g.seed = k;
                        auto ds = data::gen_synthetic(g);
                        auto prm = a.cf.prm;
                        prm.s = s;
                        json doc;
                        if (v == "cure" || v == "plain") {
                            report::plain_spec ps;
                            ps.mode = "cure";
                            ps.targets = a.targets;
                            ps.prm = prm;
                            ps.seed = k;
                            doc = report::run_plain(ds, ps);
                        } else {
                            report::run_spec rs;
                            rs.variant = v;
                            rs.targets = a.targets;
                            rs.key_bits = a.key_bits;
                            rs.prm = prm;
                            rs.seed = k;
                            auto [p, q] = split(ds, a.split, k);
                            doc = report::run_loopback(p, q, rs);
                        }
                        const double x = doc.at("accuracy").get<double>();
                        std::uint64_t bytes = 0;
                        double ms = doc.value("ms", 0.0);
                        if (doc.contains("parties")) {
                            const auto& t = doc.at("parties").at(0).at("total");
                            bytes = t.at("sent").get<std::uint64_t>() + t.at("received").get<std::uint64_t>();
                            ms = t.value("ms", 0.0);
                        }
                        acc.push_back(x);
                        runs.push_back({{"seed", k}, {"accuracy", x}, {"bytes", bytes}, {"ms", ms}});
                        csv << o << "," << s << "," << v << "," << k << "," << x << "," << bytes << "," << ms << "\n";
                        spdlog::info("bench: outliers {} s {} {} seed {}: {:.4f}", o, s, v, k, x);
                    } catch (const std::exception& e) {
                        spdlog::error("bench: outliers {} s {} {} seed {} failed: {}", o, s, v, k, e.what());
                        runs.push_back({{"seed", k}, {"error", e.what()}});
                    }
                }
                cells.push_back({{"outliers", o}, {"s", s}, {"variant", v}, {"mean_accuracy", mean(acc)},
                                 {"runs", runs}});
                std::cout << "outliers " << o << " s " << s << " " << v << ": mean accuracy " << mean(acc) << "\n";
            }
    return cells;
}

json bench_perf(const bench_args& a, const std::string& dir)
{
    auto sizes = a.sizes.empty() ? std::vector<std::size_t>{16, 32, 64, 128} : a.sizes;
    auto variants = a.variants.empty() ? std::vector<std::string>{"pca", "opt"} : a.variants;

    std::ofstream csv(dir + "/perf.csv");
    csv << "n,variant,seed,ms,bytes,comparators\n";
    json cells = json::array();
    for (auto n : sizes)
        for (auto& v : variants) {
            std::vector<double> ms, bytes;
            json runs = json::array();
            for (std::size_t k = 1; k <= a.seeds; ++k) {
                try {
                    data::gen_spec g;
                    g.n = n;
                    g.d = a.d;
                    g.seed = k;
                    auto ds = data::gen_synthetic(g);
                    report::run_spec rs;
                    rs.variant = v;
                    rs.targets = a.targets;
                    rs.key_bits = a.key_bits;
                    auto [p, q] = data::split_half(ds, k);
                    auto doc = report::run_loopback(p, q, rs);
                    const auto& p1 = doc.at("parties").at(0);
                    const auto& t = p1.at("total");
                    const double b = double(t.at("sent").get<std::uint64_t>() + t.at("received").get<std::uint64_t>());
                    ms.push_back(t.at("ms").get<double>());
                    bytes.push_back(b);
                    runs.push_back({{"seed", k}, {"ms", ms.back()}, {"bytes", b},
                                    {"comparators", p1.at("comparators")}});
                    csv << n << "," << v << "," << k << "," << ms.back() << "," << std::uint64_t(b) << ","
                        << p1.at("comparators").get<std::uint64_t>() << "\n";
                } catch (const std::exception& e) {
                    spdlog::error("bench: n {} {} seed {} failed: {}", n, v, k, e.what());
                    runs.push_back({{"seed", k}, {"error", e.what()}});
                }
            }
            cells.push_back({{"n", n}, {"variant", v}, {"mean_ms", mean(ms)}, {"mean_bytes", mean(bytes)},
                             {"runs", runs}});
            std::cout << "n " << n << " " << v << ": " << mean(ms) << " ms, " << std::uint64_t(mean(bytes))
                      << " bytes\n";
        }
    return cells;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-party privacy-preserving hierarchical clustering"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic Gaussian mixture as CSV");
    data::gen_spec gs;
    std::string gen_out;
    gen->add_option("--n", gs.n, "points")->required();
    gen->add_option("--d", gs.d, "dimension")->required();
    gen->add_option("--outliers", gs.outlier_frac, "outlier fraction in [0, 1)")->capture_default_str();
    gen->add_option("--seed", gs.seed)->capture_default_str();
    gen->add_option("--l", gs.l, "domain bits")->capture_default_str();
    gen->add_option("--out", gen_out, "CSV path")->required();

    // plain
    auto* plain = app.add_subcommand("plain", "plaintext baselines: HC, CURE, local pcure0");
    report::plain_spec ps;
    std::string plain_data, plain_report, plain_linkage = "single";
    bool plain_cure = false;
    unsigned plain_l = 16;
    cure_flags plain_cf;
    plain->add_option("--data", plain_data)->required();
    plain->add_option("--linkage", plain_linkage)->capture_default_str();
    plain->add_option("--targets", ps.targets)->required();
    plain->add_flag("--cure", plain_cure, "same as --mode cure");
    plain->add_option("--mode", ps.mode, "hc | cure | pcure0")->capture_default_str();
    plain->add_option("--seed", ps.seed)->capture_default_str();
    plain->add_flag("--seed-all", "omit timings from the report");
    plain->add_option("--l", plain_l, "domain bits of the CSV")->capture_default_str();
    plain->add_option("--report", plain_report, "JSON path ('-' for stdout)");
    plain_cf.add(plain);

    // party
    auto* party = app.add_subcommand("party", "run one party, or both with --loopback");
    report::run_spec rs;
    std::string role_s, linkage_s = "single", party_data, peer_data, party_report, listen, connect_to;
    std::string split_s = "random";
    unsigned party_l = 16;
    double timeout = 30;
    bool loopback = false, det_keys = false;
    std::optional<std::uint64_t> seed_all;
    cure_flags party_cf;
    party->add_option("--role", role_s, "p1 | p2");
    party->add_option("--variant", rs.variant, "pca | opt | pcure0 | pcure1 | pcure2")->capture_default_str();
    party->add_option("--linkage", linkage_s)->capture_default_str();
    party->add_option("--targets", rs.targets)->required();
    party->add_option("--key-bits", rs.key_bits)->capture_default_str();
    auto* o_listen = party->add_option("--listen", listen, "HOST:PORT");
    auto* o_connect = party->add_option("--connect", connect_to, "HOST:PORT");
    auto* o_loop = party->add_flag("--loopback", loopback, "run both parties in-process");
    o_listen->excludes(o_connect)->excludes(o_loop);
    o_connect->excludes(o_loop);
    party->add_option("--timeout", timeout, "connect timeout in seconds")->capture_default_str();
    party->add_option("--data", party_data, "own CSV; with --loopback the whole data set")->required();
    party->add_option("--peer-data", peer_data, "with --loopback: p2's CSV instead of splitting --data");
    party->add_option("--split", split_s, "with --loopback: random | class")->capture_default_str();
    party->add_option("--l", party_l, "domain bits of the CSV")->capture_default_str();
    party->add_option("--seed", rs.seed, "sampling and split seed")->capture_default_str();
    party->add_option("--seed-all", seed_all, "fix every randomness source; omits timings");
    party->add_flag("--insecure-deterministic-keys", det_keys, "derive Paillier keys from --seed-all");
    party->add_option("--report", party_report, "JSON path ('-' for stdout)");
    party_cf.add(party);

    // bench
    auto* bench = app.add_subcommand("bench", "accuracy or performance sweeps");
    bench_args ba;
    bench->add_option("--suite", ba.suite, "accuracy | perf")->capture_default_str();
    bench->add_option("--seeds", ba.seeds)->capture_default_str();
    bench->add_option("--out", ba.out, "output directory")->capture_default_str();
    bench->add_option("--n", ba.n, "points (accuracy suite)")->capture_default_str();
    bench->add_option("--d", ba.d)->capture_default_str();
    bench->add_option("--targets", ba.targets)->capture_default_str();
    bench->add_option("--key-bits", ba.key_bits)->capture_default_str();
    bench->add_option("--split", ba.split, "random | class")->capture_default_str();
    bench->add_option("--sizes", ba.sizes, "sample sizes (accuracy) or n (perf)");
    bench->add_option("--variants", ba.variants);
    bench->add_option("--outlier-fracs", ba.outliers);
    ba.cf.add(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        setup_logging();

        if (*gen) {
            auto ds = data::gen_synthetic(gs);
            data::save_csv(gen_out, ds);
            return 0;
        }

        if (*plain) {
            if (plain_cure)
                ps.mode = "cure";
            ps.kind = parse_linkage(plain_linkage);
            ps.prm = plain_cf.prm;
            ps.timings = plain->count("--seed-all") == 0;
            auto ds = data::load_csv(plain_data, plain_l);
            emit(report::run_plain(ds, ps), plain_report);
            return 0;
        }

        if (*party) {
            rs.kind = parse_linkage(linkage_s);
            rs.prm = party_cf.prm;
            if (seed_all) {
                rs.seed = *seed_all;
                rs.protocol_seed = *seed_all;
                rs.timings = false;
            }
            if (det_keys && !seed_all)
                throw usage_error("--insecure-deterministic-keys requires --seed-all");
            rs.deterministic_keys = det_keys;
            auto ds = data::load_csv(party_data, party_l);
            if (loopback) {
                data::labeled_dataset p, q;
                if (!peer_data.empty()) {
                    p = std::move(ds);
                    q = data::load_csv(peer_data, party_l);
                } else {
                    std::tie(p, q) = split(ds, split_s, rs.seed);
                }
                emit(report::run_loopback(p, q, rs), party_report);
                return 0;
            }
            if (role_s != "p1" && role_s != "p2")
                throw usage_error("--role must be p1 or p2");
            if (listen.empty() == connect_to.empty())
                throw usage_error("give exactly one of --listen, --connect or --loopback");
            rs.validate(ds.l, unsigned(ds.d));
            const auto r = role_s == "p1" ? protocol::role::p1 : protocol::role::p2;
            auto s = listen.empty() ? net::connect(net::role::dialer, net::endpoint::parse(connect_to), timeout)
                                    : net::connect(net::role::listener, net::endpoint::parse(listen), timeout);
            auto out = report::run_party(r, s, ds, rs);
            emit(report::party_document(rs, ds, out), party_report);
            return 0;
        }

        if (*bench) {
            if (ba.suite != "accuracy" && ba.suite != "perf")
                throw usage_error("--suite must be accuracy or perf");
            std::filesystem::create_directories(ba.out);
            json doc;
            doc["schema"] = "privhc-bench/1";
            doc["suite"] = ba.suite;
            doc["seeds"] = ba.seeds;
            doc["d"] = ba.d;
            doc["targets"] = ba.targets;
            doc["key_bits"] = ba.key_bits;
            if (ba.suite == "accuracy") {
                doc["n"] = ba.n;
                doc["split"] = ba.split;
                doc["cells"] = bench_accuracy(ba, ba.out);
            } else {
                doc["cells"] = bench_perf(ba, ba.out);
            }
            write_file(ba.out + "/summary.json", report::dump(doc));
            return 0;
        }
    } catch (const usage_error& e) {
        std::cerr << "privhc: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "privhc: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
