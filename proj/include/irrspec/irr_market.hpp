#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "irrspec/parallel.hpp"
#include "irrspec/series.hpp"

namespace irrspec {

/// Strictly increasing, non-negative per-tick continuous rates (at least two).
class RhoGrid {
public:
    explicit RhoGrid(std::vector<double> values);

    /// `steps` evenly spaced points on [lo, hi], both ends included.
    static RhoGrid linear(double lo, double hi, std::size_t steps);
    /// 200 points on [0, 0.05].
    static RhoGrid default_grid();

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }

    friend bool operator==(const RhoGrid&, const RhoGrid&) = default;

private:
    std::vector<double> values_;
};

struct PassageStats {
    std::size_t successes = 0;
    std::size_t multi_period = 0;          // successes with passage time >= 2
    std::vector<std::size_t> durations;    // one passage time per success, in start order
};

struct SuccessProbability {
    double p = 0.0;
    PassageStats stats;
};

/// p(rho) and I(rho) = rho * p(rho) on a grid, for a minimal holding period tau.
struct IrrSpectrum {
    RhoGrid grid;
    std::vector<double> p;
    std::vector<double> i;
    std::size_t tau = 0;
    std::size_t eligible_starts = 0;
    std::string series_id;
};

struct RhoOptimum {
    double rho = 0.0;
    double density = 0.0;
};

/// ln(1 + r): the continuous rate whose barrier matches (1 + r)^t at every tick.
double rho_from_discrete_rate(double r);

/// Smallest t with max(1, tau) <= t <= N-1-start and P[start+t] >= P[start] * exp(rho*t).
/// nullopt when the barrier is never met before the series ends.
std::optional<std::size_t> first_passage_time(const PriceSeries& series, std::size_t start, double rho,
                                              std::size_t tau);

/// Fraction of the N-1 starts 0..N-2 that reach the barrier, with passage statistics.
SuccessProbability success_probability(const PriceSeries& series, double rho, std::size_t tau);

IrrSpectrum irr_transform(const PriceSeries& series, const RhoGrid& grid, std::size_t tau,
                          Parallelism par = {});

/// One spectrum per tau, sharing the per-rate preprocessing across all of them.
std::vector<IrrSpectrum> irr_transform(const PriceSeries& series, const RhoGrid& grid,
                                       std::span<const std::size_t> taus, Parallelism par = {});

/// Grid point with the largest density; ties go to the smallest rho.
RhoOptimum optimal_rho(const IrrSpectrum& spectrum);

/// multi_period / successes, or nullopt when there were no successes.
std::optional<double> multi_period_fraction(const PassageStats& stats);

// Serialization: CSV `rho,p,i` plus a JSON sidecar.
void write_spectrum_csv(std::ostream& out, const IrrSpectrum& spectrum);
nlohmann::json spectrum_sidecar(const IrrSpectrum& spectrum, std::optional<double> multi_period);
/// Rebuilds a spectrum from its CSV body and sidecar.
IrrSpectrum read_spectrum(std::istream& csv, const nlohmann::json& sidecar);

}  // namespace irrspec
