#include "irrspec/series.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "irrspec/format.hpp"

namespace irrspec {

namespace {

std::string with_line(const std::string& what, std::optional<std::size_t> line) {
    if (!line) {
        return what;
    }
    return "line " + std::to_string(*line) + ": " + what;
}

}  // namespace

DataError::DataError(const std::string& what, std::optional<std::size_t> line)
    : std::runtime_error(with_line(what, line)), line_(line) {}

PriceSeries::PriceSeries(std::string id, std::vector<Timestamp> timestamps, std::vector<double> prices)
    : id_(std::move(id)), timestamps_(std::move(timestamps)), prices_(std::move(prices)) {
    if (timestamps_.size() != prices_.size()) {
        throw DataError("series '" + id_ + "': timestamp and price counts differ");
    }
    if (prices_.size() < 2) {
        throw DataError("series '" + id_ + "': need at least 2 points, got " +
                        std::to_string(prices_.size()));
    }
    for (std::size_t i = 0; i < prices_.size(); ++i) {
        const double p = prices_[i];
        if (!std::isfinite(p) || p <= 0.0) {
            throw DataError("series '" + id_ + "': price at index " + std::to_string(i) +
                            " is not positive and finite");
        }
        if (i > 0 && timestamps_[i] <= timestamps_[i - 1]) {
            throw DataError("series '" + id_ + "': non-increasing timestamp at index " +
                            std::to_string(i));
        }
    }
    max_price_ = *std::max_element(prices_.begin(), prices_.end());
}

PriceSeries PriceSeries::relabeled(std::string id) const {
    PriceSeries copy = *this;
    copy.id_ = std::move(id);
    return copy;
}

PriceSeries make_series(std::string id, std::vector<double> prices) {
    std::vector<Timestamp> ts(prices.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ts[i] = static_cast<Timestamp>(i);
    }
    return PriceSeries(std::move(id), std::move(ts), std::move(prices));
}

PriceSeries ingest_csv(std::istream& source, std::string id) {
    std::vector<Timestamp> timestamps;
    std::vector<double> prices;
    std::string raw;
    std::size_t line_no = 0;
    bool seen_row = false;

    while (std::getline(source, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty()) {
            continue;
        }
        const bool first_row = !seen_row;
        seen_row = true;

        auto fields = split_fields(line);
        if (fields.size() != 2) {
            throw DataError("expected 2 fields (timestamp,price), got " + std::to_string(fields.size()),
                            line_no);
        }
        auto price = parse_double(fields[1]);
        if (!price) {
            if (first_row) {
                continue;  // header
            }
            throw DataError("malformed price '" + std::string(trim(fields[1])) + "'", line_no);
        }
        auto ts = parse_int64(fields[0]);
        if (!ts) {
            throw DataError("malformed timestamp '" + std::string(trim(fields[0])) + "'", line_no);
        }
        if (!std::isfinite(*price) || *price <= 0.0) {
            throw DataError("price must be positive and finite", line_no);
        }
        if (!timestamps.empty() && *ts <= timestamps.back()) {
            throw DataError("non-increasing timestamp", line_no);
        }
        timestamps.push_back(*ts);
        prices.push_back(*price);
    }
    if (prices.size() < 2) {
        throw DataError("series '" + id + "': fewer than 2 valid rows");
    }
    return PriceSeries(std::move(id), std::move(timestamps), std::move(prices));
}

PriceSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    try {
        return ingest_csv(in, path.stem().string());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_series_csv(std::ostream& out, const PriceSeries& series, bool header) {
    if (header) {
        out << "timestamp,price\n";
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.timestamps()[i] << ',' << format_double(series.prices()[i]) << '\n';
    }
}

AlignedPair align_series(const PriceSeries& a, const PriceSeries& b) {
    std::vector<Timestamp> ts;
    std::vector<double> pa;
    std::vector<double> pb;
    auto ta = a.timestamps();
    auto tb = b.timestamps();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ta.size() && j < tb.size()) {
        if (ta[i] < tb[j]) {
            ++i;
        } else if (tb[j] < ta[i]) {
            ++j;
        } else {
            ts.push_back(ta[i]);
            pa.push_back(a.prices()[i]);
            pb.push_back(b.prices()[j]);
            ++i;
            ++j;
        }
    }
    if (ts.size() < 2) {
        throw DataError("series '" + a.id() + "' and '" + b.id() + "' share fewer than 2 timestamps");
    }
    const std::size_t n = ts.size();
    return AlignedPair{PriceSeries(a.id(), ts, std::move(pa)), PriceSeries(b.id(), std::move(ts), std::move(pb)),
                       a.size() - n, b.size() - n};
}

}  // namespace irrspec
