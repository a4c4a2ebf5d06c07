#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "irrspec/series.hpp"

namespace irrspec {

/// Bins are left-closed and right-open except the last, which is closed.
struct Histogram {
    std::vector<double> bin_edges;
    std::vector<double> counts;
    bool normalized = false;
    std::size_t below = 0;  // values under the first edge
    std::size_t above = 0;  // values over the last edge (and NaNs)

    std::size_t out_of_range() const noexcept { return below + above; }
};

/// Inclusive bin index range.
struct BinSpan {
    std::size_t first = 0;
    std::size_t last = 0;

    friend bool operator==(const BinSpan&, const BinSpan&) = default;
};

struct DiffProfile {
    std::vector<double> bin_edges;
    std::vector<double> delta;  // h1 - h2
    BinSpan fwhm_span;          // on h1
    std::size_t nodes_in_fwhm = 0;
    double amplitude_ratio = 0.0;  // max |delta| inside the FWHM over max h1
    double fwhm_width = 0.0;       // right edge minus left edge of the FWHM span
};

/// ln(P[j+1] / P[j]) for j in 0..N-2.
std::vector<double> log_returns(const PriceSeries& series);

/// Throws std::invalid_argument unless there are >= 2 finite, strictly increasing edges.
void validate_edges(std::span<const double> edges);

/// Bin index of `value`, or nullopt outside [front, back].
std::optional<std::size_t> find_bin(std::span<const double> edges, double value);

/// `bins` equal bins over [lo, hi].
std::vector<double> linear_edges(double lo, double hi, std::size_t bins);
/// 101 bins over [-0.005, 0.005].
std::vector<double> minute_return_edges();
/// 101 bins over [-0.05, 0.05].
std::vector<double> daily_return_edges();

/// With `normalize` the in-range counts are scaled to unit mass.
Histogram histogram(std::span<const double> values, std::vector<double> bin_edges, bool normalize);

/// Widest contiguous run of bins at or above half the peak, containing the
/// (first) peak bin.
BinSpan fwhm_span(std::span<const double> counts);

/// Sign changes between consecutive non-zero bins inside `span`, after
/// treating |delta| <= epsilon as zero. A +,0,- run counts once.
std::size_t count_nodes(std::span<const double> delta, BinSpan span, double epsilon = 0.0);

/// delta = h1 - h2, FWHM taken from h1 (the reference).
DiffProfile histogram_difference(const Histogram& h1, const Histogram& h2, double epsilon = 0.0);

void write_histogram_csv(std::ostream& out, const Histogram& h);
Histogram read_histogram_csv(std::istream& in, bool normalized);
void write_diff_csv(std::ostream& out, const Histogram& reference, const DiffProfile& diff);
nlohmann::json diff_sidecar(const DiffProfile& diff, double epsilon);

}  // namespace irrspec
