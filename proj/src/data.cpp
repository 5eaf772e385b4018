#include "privhc/data.hpp"
#include "privhc/prg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace privhc::data {

namespace {

double normal(prg& rng)
{
    // Box-Muller; the first variate only, so output is a pure function of the stream
    double u1 = rng.uniform01();
    while (u1 <= 0)
        u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

double uniform(prg& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

void check_domain(const labeled_dataset& ds)
{
    if (ds.l >= 64)
        return;
    for (const auto& p : ds.points)
        for (auto c : p)
            if (c >> ds.l)
                throw usage_error("coordinate " + std::to_string(c) + " outside [0, 2^" + std::to_string(ds.l) + ")");
}

} // namespace

void gen_spec::validate() const
{
    if (n == 0 || d == 0)
        throw usage_error("gen: n and d must be positive");
    if (min_clusters < 1 || min_clusters > max_clusters)
        throw usage_error("gen: bad cluster count range");
    if (!(outlier_frac >= 0 && outlier_frac < 1))
        throw usage_error("gen: outlier fraction must lie in [0, 1)");
    if (!(min_stddev > 0 && min_stddev <= max_stddev))
        throw usage_error("gen: bad stddev range");
    if (!(box_lo < box_hi) || !(grid_lo < grid_hi))
        throw usage_error("gen: empty box");
    if (l < 1 || l > 32)
        throw usage_error("gen: l must lie in [1, 32]");
}

std::uint64_t quantize(double x, const gen_spec& spec)
{
    const double top = double((std::uint64_t(1) << spec.l) - 1);
    const double v = std::floor((x - spec.grid_lo) / (spec.grid_hi - spec.grid_lo) * top + 0.5);
    return std::uint64_t(std::clamp(v, 0.0, top));
}

double dequantize(std::uint64_t v, const gen_spec& spec)
{
    const double top = double((std::uint64_t(1) << spec.l) - 1);
    return spec.grid_lo + double(v) / top * (spec.grid_hi - spec.grid_lo);
}

labeled_dataset gen_synthetic(const gen_spec& spec)
{
    spec.validate();
    prg rng = prg::from_seed(spec.seed, "gen-synthetic");

    const std::size_t k = spec.min_clusters + rng.below(spec.max_clusters - spec.min_clusters + 1);
    std::vector<std::vector<double>> centers;
    unsigned tries = 0;
    while (centers.size() < k) {
        if (++tries > spec.center_retries)
            throw error("gen: could not place " + std::to_string(k) + " centers at separation " +
                        std::to_string(spec.min_separation));
        std::vector<double> c(spec.d);
        for (auto& x : c)
            x = uniform(rng, spec.box_lo, spec.box_hi);
        bool ok = true;
        for (const auto& o : centers) {
            double s = 0;
            for (std::size_t t = 0; t < spec.d; ++t)
                s += (c[t] - o[t]) * (c[t] - o[t]);
            if (s < spec.min_separation * spec.min_separation) {
                ok = false;
                break;
            }
        }
        if (ok)
            centers.push_back(std::move(c));
    }
    std::vector<double> sd(k);
    for (auto& s : sd)
        s = uniform(rng, spec.min_stddev, spec.max_stddev);

    const auto outliers = std::size_t(std::floor(double(spec.n) * spec.outlier_frac + 1e-9));
    labeled_dataset ds;
    ds.l = spec.l;
    ds.d = spec.d;
    ds.points.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const bool out = i >= spec.n - outliers;
        const std::size_t c = rng.below(k);
        std::vector<double> x(spec.d);
        for (std::size_t t = 0; t < spec.d; ++t)
            x[t] = out ? uniform(rng, spec.box_lo, spec.box_hi) : centers[c][t] + sd[c] * normal(rng);
        point_t p(spec.d);
        for (std::size_t t = 0; t < spec.d; ++t)
            p[t] = quantize(x[t], spec);
        ds.points.push_back(std::move(p));
        ds.raw.push_back(std::move(x));
        ds.labels.push_back(std::int64_t(c));
        ds.outlier.push_back(out);
    }
    // interleave outliers with the rest
    auto order = random_permutation(spec.n, rng);
    labeled_dataset out = subset(ds, order);
    return out;
}

labeled_dataset subset(const labeled_dataset& ds, const std::vector<std::size_t>& rows)
{
    labeled_dataset o;
    o.l = ds.l;
    o.d = ds.d;
    for (auto r : rows) {
        o.points.push_back(ds.points.at(r));
        if (ds.labeled())
            o.labels.push_back(ds.labels.at(r));
        if (!ds.outlier.empty())
            o.outlier.push_back(ds.outlier.at(r));
        if (!ds.raw.empty())
            o.raw.push_back(ds.raw.at(r));
    }
    return o;
}

std::string format_csv(const labeled_dataset& ds)
{
    std::ostringstream os;
    for (std::size_t t = 0; t < ds.d; ++t)
        os << (t ? "," : "") << 'x' << t;
    if (ds.labeled())
        os << ",label";
    os << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t t = 0; t < ds.d; ++t)
            os << (t ? "," : "") << ds.points[i][t];
        if (ds.labeled())
            os << ',' << ds.labels[i];
        os << '\n';
    }
    return os.str();
}

labeled_dataset parse_csv(const std::string& text, unsigned l)
{
    labeled_dataset ds;
    ds.l = l;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::size_t cols = 0;
    std::vector<std::vector<std::int64_t>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (line.back() == ',')
            cells.emplace_back();
        if (!header_seen && rows.empty() && !cells.empty() && !cells[0].empty() &&
            std::isalpha(static_cast<unsigned char>(cells[0][0]))) {
            header_seen = true;
            cols = cells.size();
            ds.d = cells.back() == "label" ? cols - 1 : cols;
            continue;
        }
        if (cols == 0) {
            cols = cells.size();
            ds.d = cols; // without a header every column is a coordinate
        }
        if (cells.size() != cols)
            throw error("csv line " + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                              " columns, got " + std::to_string(cells.size()));
        std::vector<std::int64_t> row;
        for (const auto& c : cells) {
            std::size_t pos = 0;
            long long v = 0;
            try {
                v = std::stoll(c, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (c.empty() || pos != c.size())
                throw error("csv line " + std::to_string(lineno) + ": not an integer: '" + c + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
        for (std::size_t t = 0; t < ds.d; ++t)
            if (rows.back()[t] < 0 || (l < 64 && (std::uint64_t(rows.back()[t]) >> l)))
                throw error("csv line " + std::to_string(lineno) + ": coordinate " +
                                  std::to_string(rows.back()[t]) + " outside [0, 2^" + std::to_string(l) + ")");
    }
    const bool has_label = cols > ds.d;
    for (auto& r : rows) {
        ds.points.emplace_back(r.begin(), r.begin() + std::ptrdiff_t(ds.d));
        if (has_label)
            ds.labels.push_back(r.back());
    }
    if (ds.points.empty())
        throw error("csv: no data rows");
    check_domain(ds);
    return ds;
}

labeled_dataset load_csv(const std::string& path, unsigned l)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str(), l);
}

void save_csv(const std::string& path, const labeled_dataset& ds)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw error("cannot write " + path);
    f << format_csv(ds);
    if (!f)
        throw error("write failed: " + path);
}

std::pair<labeled_dataset, labeled_dataset> split_half(const labeled_dataset& ds, std::uint64_t seed)
{
    if (ds.size() < 2)
        throw usage_error("split: need at least two rows");
    prg rng = prg::from_seed(seed, "split-half");
    auto order = random_permutation(ds.size(), rng);
    const std::size_t h = (ds.size() + 1) / 2;
    return {subset(ds, {order.begin(), order.begin() + std::ptrdiff_t(h)}),
            subset(ds, {order.begin() + std::ptrdiff_t(h), order.end()})};
}

std::pair<labeled_dataset, labeled_dataset> split_by_class(const labeled_dataset& ds,
                                                           const std::vector<std::int64_t>& first)
{
    if (!ds.labeled())
        throw usage_error("split: class split needs labels");
    const std::set<std::int64_t> in(first.begin(), first.end());
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < ds.size(); ++i)
        (in.count(ds.labels[i]) ? a : b).push_back(i);
    return {subset(ds, a), subset(ds, b)};
}

} // namespace privhc::data
