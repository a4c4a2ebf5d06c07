#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "irrspec/irr_market.hpp"
#include "irrspec/parallel.hpp"
#include "irrspec/series.hpp"

namespace irrspec {

/// Minimal holding periods 0, 3, 6, 9, 12, 15 ticks.
std::vector<std::size_t> default_taus();

/// Difference I_a - I_b at one minimal holding period.
struct TauSlice {
    std::size_t tau = 0;
    IrrSpectrum spectrum_a;
    IrrSpectrum spectrum_b;
    std::vector<double> delta;
    std::size_t nodes = 0;
    double sup_norm = 0.0;
    double epsilon = 0.0;  // node floor actually applied
};

struct TauSeriesReport {
    RhoGrid grid;
    std::vector<TauSlice> slices;  // one per tau, in the requested order

    std::vector<std::size_t> taus() const;
};

/// Relative node floor: |delta| <= floor * max(|I_a|, |I_b|) counts as zero.
inline constexpr double kDefaultNodeFloor = 1e-6;

/// I^(tau) for both members of the pair at each tau, their pointwise
/// differences, sign-change counts over the whole grid and sup norms.
/// `taus` must be non-empty and strictly increasing.
TauSeriesReport tau_series_analysis(const AlignedPair& pair, const RhoGrid& grid, std::span<const std::size_t> taus,
                                    Parallelism par = {}, double node_floor = kDefaultNodeFloor);

enum class SynthKind { Gbm, LaggedCopy };

struct SynthSpec {
    SynthKind kind = SynthKind::Gbm;
    std::size_t n = 1000;
    double mu = 0.0;     // per-tick log drift
    double sigma = 0.0;  // per-tick log volatility
    std::size_t lag = 0;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

/// P_0 = 100 and ln P_t = ln 100 + mu*t + sigma * (z_1 + ... + z_t), timestamps 0..n-1.
PriceSeries synthesize_gbm(const SynthSpec& spec);

/// out[t] = s[max(0, t - lag)] * exp(noise * z_t), on the timestamps of `s`.
PriceSeries lagged_copy(const PriceSeries& s, std::size_t lag, double noise, std::uint64_t seed);

nlohmann::json report_json(const TauSeriesReport& report);
/// Per-tau table `rho,i_a,i_b,delta`.
void write_tau_csv(std::ostream& out, const TauSlice& slice);

/// Grid and per-tau {delta, nodes, sup_norm} as stored by report_json.
struct ReportSummary {
    std::vector<std::size_t> taus;
    std::vector<double> grid;
    std::vector<std::vector<double>> deltas;
    std::vector<std::size_t> nodes;
    std::vector<double> sup_norms;
};
ReportSummary read_report_json(const nlohmann::json& j);

}  // namespace irrspec
