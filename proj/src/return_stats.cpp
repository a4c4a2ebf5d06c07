#include "irrspec/return_stats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "irrspec/format.hpp"

namespace irrspec {

std::vector<double> log_returns(const PriceSeries& series) {
    const auto p = series.prices();
    std::vector<double> r(p.size() - 1);
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
        r[j] = std::log(p[j + 1] / p[j]);
    }
    return r;
}

void validate_edges(std::span<const double> edges) {
    if (edges.size() < 2) {
        throw std::invalid_argument("need at least 2 bin edges");
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!std::isfinite(edges[k]) || (k > 0 && edges[k] <= edges[k - 1])) {
            throw std::invalid_argument("bin edges must be finite and strictly increasing");
        }
    }
}

std::optional<std::size_t> find_bin(std::span<const double> edges, double value) {
    if (!(value >= edges.front() && value <= edges.back())) {
        return std::nullopt;
    }
    if (value == edges.back()) {
        return edges.size() - 2;
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), value);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
}

std::vector<double> linear_edges(double lo, double hi, std::size_t bins) {
    if (bins < 1 || !(lo < hi)) {
        throw std::invalid_argument("histogram range needs lo < hi and at least one bin");
    }
    std::vector<double> edges(bins + 1);
    for (std::size_t k = 0; k < bins; ++k) {
        edges[k] = lo + (hi - lo) * (static_cast<double>(k) / static_cast<double>(bins));
    }
    edges[bins] = hi;
    return edges;
}

std::vector<double> minute_return_edges() { return linear_edges(-0.005, 0.005, 101); }
std::vector<double> daily_return_edges() { return linear_edges(-0.05, 0.05, 101); }

Histogram histogram(std::span<const double> values, std::vector<double> bin_edges, bool normalize) {
    validate_edges(bin_edges);
    if (normalize && values.empty()) {
        throw std::invalid_argument("cannot normalize a histogram of no values");
    }
    Histogram h{std::move(bin_edges), {}, normalize, 0, 0};
    h.counts.assign(h.bin_edges.size() - 1, 0.0);
    std::size_t in_range = 0;
    for (double v : values) {
        if (auto bin = find_bin(h.bin_edges, v)) {
            h.counts[*bin] += 1.0;
            ++in_range;
        } else if (v < h.bin_edges.front()) {
            ++h.below;
        } else {
            ++h.above;
        }
    }
    if (normalize) {
        if (in_range == 0) {
            throw std::invalid_argument("cannot normalize: every value is out of range");
        }
        for (auto& c : h.counts) {
            c /= static_cast<double>(in_range);
        }
    }
    return h;
}

BinSpan fwhm_span(std::span<const double> counts) {
    if (counts.empty()) {
        throw std::invalid_argument("empty histogram");
    }
    const auto peak = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const double half = counts[peak] / 2.0;
    BinSpan span{peak, peak};
    while (span.first > 0 && counts[span.first - 1] >= half) {
        --span.first;
    }
    while (span.last + 1 < counts.size() && counts[span.last + 1] >= half) {
        ++span.last;
    }
    return span;
}

std::size_t count_nodes(std::span<const double> delta, BinSpan span, double epsilon) {
    if (span.first > span.last || span.last >= delta.size()) {
        throw std::invalid_argument("node span outside the profile");
    }
    if (!(epsilon >= 0.0)) {
        throw std::invalid_argument("epsilon must be >= 0");
    }
    std::size_t nodes = 0;
    int last_sign = 0;
    for (std::size_t k = span.first; k <= span.last; ++k) {
        const double d = delta[k];
        if (std::abs(d) <= epsilon) {
            continue;
        }
        const int sign = d > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) {
            ++nodes;
        }
        last_sign = sign;
    }
    return nodes;
}

DiffProfile histogram_difference(const Histogram& h1, const Histogram& h2, double epsilon) {
    if (h1.bin_edges != h2.bin_edges) {
        throw std::invalid_argument("histograms have different bin edges");
    }
    if (h1.normalized != h2.normalized) {
        throw std::invalid_argument("cannot difference a normalized and a raw histogram");
    }
    DiffProfile d;
    d.bin_edges = h1.bin_edges;
    d.delta.resize(h1.counts.size());
    for (std::size_t k = 0; k < d.delta.size(); ++k) {
        d.delta[k] = h1.counts[k] - h2.counts[k];
    }
    d.fwhm_span = fwhm_span(h1.counts);
    d.nodes_in_fwhm = count_nodes(d.delta, d.fwhm_span, epsilon);

    const double peak = *std::max_element(h1.counts.begin(), h1.counts.end());
    double max_delta = 0.0;
    for (std::size_t k = d.fwhm_span.first; k <= d.fwhm_span.last; ++k) {
        max_delta = std::max(max_delta, std::abs(d.delta[k]));
    }
    d.amplitude_ratio = peak > 0.0 ? max_delta / peak : 0.0;
    d.fwhm_width = d.bin_edges[d.fwhm_span.last + 1] - d.bin_edges[d.fwhm_span.first];
    return d;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
    out << "bin_left,bin_right,count\n";
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
        out << format_double(h.bin_edges[k]) << ',' << format_double(h.bin_edges[k + 1]) << ','
            << format_double(h.counts[k]) << '\n';
    }
}

Histogram read_histogram_csv(std::istream& in, bool normalized) {
    Histogram h;
    h.normalized = normalized;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || (line_no == 1 && line.starts_with("bin_left,"))) {
            continue;
        }
        auto f = split_fields(line);
        if (f.size() < 3) {
            throw DataError("expected bin_left,bin_right,count", line_no);
        }
        auto left = parse_double(f[0]);
        auto right = parse_double(f[1]);
        auto count = parse_double(f[2]);
        if (!left || !right || !count || *count < 0.0) {
            throw DataError("malformed histogram row", line_no);
        }
        if (h.bin_edges.empty()) {
            h.bin_edges.push_back(*left);
        } else if (h.bin_edges.back() != *left) {
            throw DataError("histogram bins are not contiguous", line_no);
        }
        h.bin_edges.push_back(*right);
        h.counts.push_back(*count);
    }
    try {
        validate_edges(h.bin_edges);
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
    return h;
}

void write_diff_csv(std::ostream& out, const Histogram& reference, const DiffProfile& diff) {
    out << "bin_left,bin_right,count,delta\n";
    for (std::size_t k = 0; k < diff.delta.size(); ++k) {
        out << format_double(diff.bin_edges[k]) << ',' << format_double(diff.bin_edges[k + 1]) << ','
            << format_double(reference.counts[k]) << ',' << format_double(diff.delta[k]) << '\n';
    }
}

nlohmann::json diff_sidecar(const DiffProfile& diff, double epsilon) {
    nlohmann::json j;
    j["fwhm_span"] = {diff.fwhm_span.first, diff.fwhm_span.last};
    j["nodes_in_fwhm"] = diff.nodes_in_fwhm;
    j["epsilon"] = epsilon;
    j["amplitude_ratio"] = diff.amplitude_ratio;
    j["fwhm_width"] = diff.fwhm_width;
    return j;
}

}  // namespace irrspec
