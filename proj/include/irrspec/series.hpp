#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace irrspec {

/// Opaque ordered tick label. Only ordering is ever interpreted.
using Timestamp = std::int64_t;

/// Bad input data: malformed rows, broken series invariants, unusable inputs.
/// Carries the 1-based source line when one is known.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::optional<std::size_t> line = std::nullopt);

    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    std::optional<std::size_t> line_;
};

/// Validated (timestamp, price) sequence: N >= 2, timestamps strictly increasing,
/// every price finite and > 0. Immutable after construction.
class PriceSeries {
public:
    PriceSeries(std::string id, std::vector<Timestamp> timestamps, std::vector<double> prices);

    const std::string& id() const noexcept { return id_; }
    std::size_t size() const noexcept { return prices_.size(); }

    std::span<const double> prices() const noexcept { return prices_; }
    std::span<const Timestamp> timestamps() const noexcept { return timestamps_; }

    double price(std::size_t i) const { return prices_.at(i); }
    Timestamp timestamp(std::size_t i) const { return timestamps_.at(i); }

    double max_price() const noexcept { return max_price_; }

    /// Same points under a different label.
    PriceSeries relabeled(std::string id) const;

    friend bool operator==(const PriceSeries& a, const PriceSeries& b) {
        return a.timestamps_ == b.timestamps_ && a.prices_ == b.prices_;
    }

private:
    std::string id_;
    std::vector<Timestamp> timestamps_;
    std::vector<double> prices_;
    double max_price_ = 0.0;
};

/// Builds a series with timestamps 0..n-1.
PriceSeries make_series(std::string id, std::vector<double> prices);

struct AlignedPair {
    PriceSeries a;
    PriceSeries b;
    std::size_t dropped_a = 0;
    std::size_t dropped_b = 0;
};

/// Parses `timestamp,price` rows. One leading header row is skipped when its
/// price field is non-numeric. Accepts LF or CRLF and ignores blank lines.
PriceSeries ingest_csv(std::istream& source, std::string id);
PriceSeries read_series_csv(const std::filesystem::path& path);

/// Emits `timestamp,price` rows with shortest round-trip prices and LF endings.
void write_series_csv(std::ostream& out, const PriceSeries& series, bool header = false);

/// Inner join on exact timestamp equality. Throws DataError when fewer than
/// two timestamps are shared.
AlignedPair align_series(const PriceSeries& a, const PriceSeries& b);

}  // namespace irrspec
