#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "irrspec/parallel.hpp"
#include "irrspec/series.hpp"

namespace irrspec {

/// Short and long moving-average windows, 1 <= short < long.
struct MaConfig {
    std::size_t short_window = 5;
    std::size_t long_window = 25;

    /// Throws std::invalid_argument unless 1 <= S < L <= n.
    void validate(std::size_t n) const;
};

/// Trailing mean of `window` prices. Defined from index window-1 onward;
/// values[k] belongs to tick first_index + k.
struct MovingAverage {
    std::size_t first_index = 0;
    std::vector<double> values;

    bool defined_at(std::size_t t) const { return t >= first_index && t - first_index < values.size(); }
    double at(std::size_t t) const { return values.at(t - first_index); }
};

MovingAverage moving_average(const PriceSeries& series, std::size_t window);

enum class SignalKind { Buy, Sell };

struct SignalEvent {
    std::size_t index = 0;
    SignalKind kind = SignalKind::Buy;
    double theta = 0.0;   // short MA at index
    double lambda = 0.0;  // long MA at index
};

struct Transaction {
    std::size_t buy_index = 0;
    std::size_t sell_index = 0;
    std::size_t duration = 0;
    double rho = 0.0;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Golden Cross (Buy) and Dead Cross (Sell) events in index order.
///
/// With theta the short MA, lambda the long MA and delta = theta - lambda, a
/// signal at i needs a strict crossing delta_i * delta_{i-1} < 0 and then, for
/// Buy, rising lambda, rising theta and theta_i + lambda_{i-1} > theta_{i-1} + lambda_i;
/// Sell mirrors all three with strictly negative signs. Requires N >= L + 1.
std::vector<SignalEvent> detect_signals(const PriceSeries& series, const MaConfig& cfg);

/// ln(p_sell / p_buy) / duration.
double transaction_irr(double p_buy, double p_sell, std::size_t duration);

Transaction make_transaction(const PriceSeries& series, std::size_t buy_index, std::size_t sell_index);

/// Sequential pairing: first Buy with the next Sell, resume after that Sell.
/// Buys while a position is open and Sells without one are ignored.
std::vector<Transaction> extract_transactions_scan(std::span<const SignalEvent> signals,
                                                   const PriceSeries& series);

/// The transaction an investor starting at `start` would make: first Buy at
/// i_b > start, then first Sell at i_s > i_b. nullopt if the series runs out.
std::optional<Transaction> transaction_from_start(std::span<const SignalEvent> signals, const PriceSeries& series,
                                                  std::size_t start);

/// Random-start protocol. Sample k draws its start uniformly from [0, N-1]
/// with a generator seeded from (seed, k), so output is schedule independent.
/// Samples that run off the series contribute nothing; output is in sample order.
std::vector<Transaction> monte_carlo_transactions(const PriceSeries& series, const MaConfig& cfg,
                                                  std::size_t n_samples, std::uint64_t seed, Parallelism par = {});

enum class OutOfRangePolicy { Error, Clamp };

/// Signed, rho-weighted histogram of transaction rates.
struct StrategySpectrum {
    std::vector<double> bin_edges;
    std::vector<double> weighted;        // per-bin sum of rho / n_transactions
    std::vector<std::size_t> counts;
    std::size_t n_transactions = 0;

    double bin_center(std::size_t k) const { return 0.5 * (bin_edges[k] + bin_edges[k + 1]); }
};

/// Edges lo, lo+width, ... up to hi (hi included as the last edge).
std::vector<double> uniform_edges(double lo, double hi, double width);
/// 5e-4 wide bins over [-0.05, 0.05].
std::vector<double> default_strategy_edges();

StrategySpectrum strategy_spectrum(std::span<const Transaction> transactions, std::vector<double> bin_edges,
                                   OutOfRangePolicy policy = OutOfRangePolicy::Error);

void write_strategy_csv(std::ostream& out, const StrategySpectrum& spectrum);
void write_transactions_csv(std::ostream& out, std::span<const Transaction> transactions);
std::vector<Transaction> read_transactions_csv(std::istream& in);

}  // namespace irrspec
