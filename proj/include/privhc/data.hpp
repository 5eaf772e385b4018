#pragma once

#include "privhc/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace privhc::data {

struct labeled_dataset {
    unsigned l = 16;
    std::size_t d = 0;
    std::vector<point_t> points;
    std::vector<std::int64_t> labels; // empty when unlabeled
    std::vector<bool> outlier;        // empty unless generated
    std::vector<std::vector<double>> raw; // pre-quantization samples, generator only

    std::size_t size() const { return points.size(); }
    bool labeled() const { return !labels.empty(); }
    bool operator==(const labeled_dataset& o) const
    {
        return l == o.l && d == o.d && points == o.points && labels == o.labels;
    }
};

struct gen_spec {
    std::size_t n = 1000;
    std::size_t d = 2;
    std::size_t min_clusters = 8, max_clusters = 15;
    double box_lo = -50, box_hi = 50;
    double min_stddev = 0.5, max_stddev = 4.0;
    double min_separation = 32; // 8 x max stddev
    double outlier_frac = 0;
    std::uint64_t seed = 1;
    unsigned l = 16;
    // real interval mapped onto [0, 2^l); wider than the box to hold the tails
    double grid_lo = -70, grid_hi = 70;
    unsigned center_retries = 100000;

    void validate() const;
};

// Gaussian mixture with uniformly placed outliers, quantized onto the grid.
labeled_dataset gen_synthetic(const gen_spec& spec);

// Affine map of one coordinate onto [0, 2^l), round half-up, clamped.
std::uint64_t quantize(double x, const gen_spec& spec);
double dequantize(std::uint64_t v, const gen_spec& spec);

labeled_dataset load_csv(const std::string& path, unsigned l = 16);
void save_csv(const std::string& path, const labeled_dataset& ds);

labeled_dataset parse_csv(const std::string& text, unsigned l = 16);
std::string format_csv(const labeled_dataset& ds);

// Random halves of sizes ceil(n/2) and floor(n/2).
std::pair<labeled_dataset, labeled_dataset> split_half(const labeled_dataset& ds, std::uint64_t seed);

// Keeps rows in the order given.
labeled_dataset subset(const labeled_dataset& ds, const std::vector<std::size_t>& rows);

// Points of the classes in 'first' go to P, the rest to Q.
std::pair<labeled_dataset, labeled_dataset> split_by_class(const labeled_dataset& ds,
                                                           const std::vector<std::int64_t>& first);

} // namespace privhc::data
