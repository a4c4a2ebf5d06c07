#include "irrspec/leadlag.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "irrspec/format.hpp"
#include "irrspec/return_stats.hpp"

namespace irrspec {

std::vector<std::size_t> default_taus() { return {0, 3, 6, 9, 12, 15}; }

std::vector<std::size_t> TauSeriesReport::taus() const {
    std::vector<std::size_t> out;
    out.reserve(slices.size());
    for (const auto& s : slices) {
        out.push_back(s.tau);
    }
    return out;
}

TauSeriesReport tau_series_analysis(const AlignedPair& pair, const RhoGrid& grid, std::span<const std::size_t> taus,
                                    Parallelism par, double node_floor) {
    if (taus.empty()) {
        throw std::invalid_argument("tau list is empty");
    }
    for (std::size_t k = 1; k < taus.size(); ++k) {
        if (taus[k] <= taus[k - 1]) {
            throw std::invalid_argument("tau list must be strictly increasing");
        }
    }
    if (!(node_floor >= 0.0)) {
        throw std::invalid_argument("node floor must be >= 0");
    }

    auto spectra_a = irr_transform(pair.a, grid, taus, par);
    auto spectra_b = irr_transform(pair.b, grid, taus, par);

    TauSeriesReport report{grid, {}};
    report.slices.reserve(taus.size());
    for (std::size_t t = 0; t < taus.size(); ++t) {
        TauSlice s{taus[t], std::move(spectra_a[t]), std::move(spectra_b[t]), std::vector<double>(grid.size()),
                   0, 0.0, 0.0};
        double scale = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            s.delta[k] = s.spectrum_a.i[k] - s.spectrum_b.i[k];
            s.sup_norm = std::max(s.sup_norm, std::abs(s.delta[k]));
            scale = std::max({scale, std::abs(s.spectrum_a.i[k]), std::abs(s.spectrum_b.i[k])});
        }
        s.epsilon = node_floor * scale;
        s.nodes = count_nodes(s.delta, BinSpan{0, grid.size() - 1}, s.epsilon);
        report.slices.push_back(std::move(s));
    }
    return report;
}

PriceSeries synthesize_gbm(const SynthSpec& spec) {
    if (spec.kind != SynthKind::Gbm) {
        throw std::invalid_argument("synthesize_gbm needs kind = GBM");
    }
    if (spec.n < 2 || !(spec.sigma >= 0.0) || !std::isfinite(spec.sigma) || !std::isfinite(spec.mu)) {
        throw std::invalid_argument("GBM spec needs n >= 2, finite mu and finite sigma >= 0");
    }
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> prices(spec.n);
    double shocks = 0.0;
    prices[0] = 100.0;
    for (std::size_t t = 1; t < spec.n; ++t) {
        shocks += normal(rng);
        prices[t] = 100.0 * std::exp(spec.mu * static_cast<double>(t) + spec.sigma * shocks);
    }
    return make_series("gbm-" + std::to_string(spec.seed), std::move(prices));
}

PriceSeries lagged_copy(const PriceSeries& s, std::size_t lag, double noise, std::uint64_t seed) {
    if (lag >= s.size()) {
        throw std::invalid_argument("lag must be smaller than the series length");
    }
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw std::invalid_argument("noise scale must be finite and >= 0");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto src = s.prices();
    std::vector<double> prices(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        const double base = src[t >= lag ? t - lag : 0];
        prices[t] = base * std::exp(noise * normal(rng));
    }
    return PriceSeries(s.id() + "-lag" + std::to_string(lag),
                       std::vector<Timestamp>(s.timestamps().begin(), s.timestamps().end()), std::move(prices));
}

nlohmann::json report_json(const TauSeriesReport& report) {
    nlohmann::json j;
    j["taus"] = report.taus();
    j["grid"] = std::vector<double>(report.grid.values().begin(), report.grid.values().end());
    auto per_tau = nlohmann::json::array();
    for (const auto& s : report.slices) {
        per_tau.push_back({{"tau", s.tau},
                           {"delta", s.delta},
                           {"nodes", s.nodes},
                           {"sup_norm", s.sup_norm},
                           {"epsilon", s.epsilon}});
    }
    j["per_tau"] = std::move(per_tau);
    if (!report.slices.empty()) {
        j["series_a"] = report.slices.front().spectrum_a.series_id;
        j["series_b"] = report.slices.front().spectrum_b.series_id;
    }
    return j;
}

void write_tau_csv(std::ostream& out, const TauSlice& slice) {
    out << "rho,i_a,i_b,delta\n";
    for (std::size_t k = 0; k < slice.delta.size(); ++k) {
        out << format_double(slice.spectrum_a.grid[k]) << ',' << format_double(slice.spectrum_a.i[k]) << ','
            << format_double(slice.spectrum_b.i[k]) << ',' << format_double(slice.delta[k]) << '\n';
    }
}

ReportSummary read_report_json(const nlohmann::json& j) {
    try {
        ReportSummary r;
        r.taus = j.at("taus").get<std::vector<std::size_t>>();
        r.grid = j.at("grid").get<std::vector<double>>();
        for (const auto& entry : j.at("per_tau")) {
            r.deltas.push_back(entry.at("delta").get<std::vector<double>>());
            r.nodes.push_back(entry.at("nodes").get<std::size_t>());
            r.sup_norms.push_back(entry.at("sup_norm").get<double>());
        }
        if (r.deltas.size() != r.taus.size()) {
            throw DataError("report: per_tau does not match taus");
        }
        for (const auto& d : r.deltas) {
            if (d.size() != r.grid.size()) {
                throw DataError("report: delta length does not match grid");
            }
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
    }
}

}  // namespace irrspec
