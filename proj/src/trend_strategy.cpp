#include "irrspec/trend_strategy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "irrspec/format.hpp"
#include "irrspec/return_stats.hpp"

namespace irrspec {

void MaConfig::validate(std::size_t n) const {
    if (short_window < 1 || short_window >= long_window || long_window > n) {
        throw std::invalid_argument("moving-average windows need 1 <= S < L <= N (S=" + std::to_string(short_window) +
                                    ", L=" + std::to_string(long_window) + ", N=" + std::to_string(n) + ")");
    }
}

MovingAverage moving_average(const PriceSeries& series, std::size_t window) {
    if (window < 1 || window > series.size()) {
        throw std::invalid_argument("moving-average window must lie in [1, N]");
    }
    const auto prices = series.prices();
    MovingAverage ma{window - 1, std::vector<double>(series.size() - window + 1)};
    const double divisor = static_cast<double>(window);
    for (std::size_t t = window - 1; t < series.size(); ++t) {
        // Fresh sum per window: no running-sum drift across long series.
        const double sum = std::accumulate(prices.begin() + static_cast<std::ptrdiff_t>(t + 1 - window),
                                           prices.begin() + static_cast<std::ptrdiff_t>(t + 1), 0.0);
        ma.values[t - ma.first_index] = sum / divisor;
    }
    return ma;
}

std::vector<SignalEvent> detect_signals(const PriceSeries& series, const MaConfig& cfg) {
    cfg.validate(series.size());
    if (series.size() < cfg.long_window + 1) {
        throw std::invalid_argument("series shorter than L + 1");
    }
    const auto theta = moving_average(series, cfg.short_window);
    const auto lambda = moving_average(series, cfg.long_window);

    std::vector<SignalEvent> events;
    for (std::size_t i = cfg.long_window; i < series.size(); ++i) {
        const double th = theta.at(i);
        const double th_prev = theta.at(i - 1);
        const double la = lambda.at(i);
        const double la_prev = lambda.at(i - 1);
        const double delta = th - la;
        const double delta_prev = th_prev - la_prev;
        if (!(delta * delta_prev < 0.0)) {
            continue;
        }
        const double accel = (th + la_prev) - (th_prev + la);
        if (la - la_prev > 0.0 && th - th_prev > 0.0 && accel > 0.0) {
            events.push_back({i, SignalKind::Buy, th, la});
        } else if (la - la_prev < 0.0 && th - th_prev < 0.0 && accel < 0.0) {
            events.push_back({i, SignalKind::Sell, th, la});
        }
    }
    return events;
}

double transaction_irr(double p_buy, double p_sell, std::size_t duration) {
    if (duration == 0) {
        throw std::invalid_argument("transaction duration must be >= 1");
    }
    if (!(p_buy > 0.0) || !(p_sell > 0.0)) {
        throw std::invalid_argument("transaction prices must be positive");
    }
    return std::log(p_sell / p_buy) / static_cast<double>(duration);
}

Transaction make_transaction(const PriceSeries& series, std::size_t buy_index, std::size_t sell_index) {
    if (buy_index >= sell_index || sell_index >= series.size()) {
        throw std::invalid_argument("transaction needs buy < sell < N");
    }
    const std::size_t duration = sell_index - buy_index;
    return {buy_index, sell_index, duration,
            transaction_irr(series.prices()[buy_index], series.prices()[sell_index], duration)};
}

std::vector<Transaction> extract_transactions_scan(std::span<const SignalEvent> signals,
                                                   const PriceSeries& series) {
    std::vector<Transaction> out;
    std::optional<std::size_t> open;
    for (const auto& ev : signals) {
        if (!open && ev.kind == SignalKind::Buy) {
            open = ev.index;
        } else if (open && ev.kind == SignalKind::Sell && ev.index > *open) {
            out.push_back(make_transaction(series, *open, ev.index));
            open.reset();
        }
    }
    return out;
}

std::optional<Transaction> transaction_from_start(std::span<const SignalEvent> signals, const PriceSeries& series,
                                                  std::size_t start) {
    auto after = [](std::span<const SignalEvent> evs, std::size_t index, SignalKind kind) {
        auto it = std::upper_bound(evs.begin(), evs.end(), index,
                                   [](std::size_t v, const SignalEvent& e) { return v < e.index; });
        return std::find_if(it, evs.end(), [kind](const SignalEvent& e) { return e.kind == kind; });
    };
    auto buy = after(signals, start, SignalKind::Buy);
    if (buy == signals.end()) {
        return std::nullopt;
    }
    auto sell = after(signals, buy->index, SignalKind::Sell);
    if (sell == signals.end()) {
        return std::nullopt;
    }
    return make_transaction(series, buy->index, sell->index);
}

std::vector<Transaction> monte_carlo_transactions(const PriceSeries& series, const MaConfig& cfg,
                                                  std::size_t n_samples, std::uint64_t seed, Parallelism par) {
    if (n_samples < 1) {
        throw std::invalid_argument("n_samples must be >= 1");
    }
    const auto signals = detect_signals(series, cfg);
    std::vector<std::optional<Transaction>> drawn(n_samples);
    parallel_for(n_samples, par, [&](std::size_t k) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(std::uint64_t{k} >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, series.size() - 1);
        drawn[k] = transaction_from_start(signals, series, pick(rng));
    });

    std::vector<Transaction> out;
    for (auto& t : drawn) {
        if (t) {
            out.push_back(*t);
        }
    }
    return out;
}

std::vector<double> uniform_edges(double lo, double hi, double width) {
    if (!(lo < hi) || !(width > 0.0)) {
        throw std::invalid_argument("bin range needs lo < hi and width > 0");
    }
    const double ratio = (hi - lo) / width;
    const double whole = std::round(ratio);
    const bool exact = std::abs(ratio - whole) < 1e-9;
    const auto bins = static_cast<std::size_t>(exact ? whole : std::ceil(ratio));
    std::vector<double> edges(bins + 1);
    for (std::size_t k = 0; k < bins; ++k) {
        // Interpolating across [lo, hi] keeps symmetric ranges symmetric (0 stays an exact edge).
        edges[k] = exact ? lo + (hi - lo) * (static_cast<double>(k) / static_cast<double>(bins))
                         : lo + width * static_cast<double>(k);
    }
    edges[bins] = hi;
    return edges;
}

std::vector<double> default_strategy_edges() { return uniform_edges(-0.05, 0.05, 5e-4); }

StrategySpectrum strategy_spectrum(std::span<const Transaction> transactions, std::vector<double> bin_edges,
                                   OutOfRangePolicy policy) {
    validate_edges(bin_edges);
    const std::size_t bins = bin_edges.size() - 1;
    StrategySpectrum s{std::move(bin_edges), std::vector<double>(bins, 0.0), std::vector<std::size_t>(bins, 0),
                       transactions.size()};
    for (const auto& t : transactions) {
        auto bin = find_bin(s.bin_edges, t.rho);
        if (!bin) {
            if (policy == OutOfRangePolicy::Error) {
                throw DataError("transaction rate " + format_double(t.rho) + " (buy " +
                                std::to_string(t.buy_index) + ", sell " + std::to_string(t.sell_index) +
                                ") outside the binning range");
            }
            bin = t.rho < s.bin_edges.front() ? 0 : bins - 1;
        }
        s.weighted[*bin] += t.rho;
        s.counts[*bin] += 1;
    }
    if (s.n_transactions > 0) {
        for (auto& w : s.weighted) {
            w /= static_cast<double>(s.n_transactions);
        }
    }
    return s;
}

void write_strategy_csv(std::ostream& out, const StrategySpectrum& spectrum) {
    out << "rho_bin_center,weighted,count\n";
    for (std::size_t k = 0; k < spectrum.counts.size(); ++k) {
        out << format_double(spectrum.bin_center(k)) << ',' << format_double(spectrum.weighted[k]) << ','
            << spectrum.counts[k] << '\n';
    }
}

void write_transactions_csv(std::ostream& out, std::span<const Transaction> transactions) {
    out << "i_b,i_s,duration,rho\n";
    for (const auto& t : transactions) {
        out << t.buy_index << ',' << t.sell_index << ',' << t.duration << ',' << format_double(t.rho) << '\n';
    }
}

std::vector<Transaction> read_transactions_csv(std::istream& in) {
    std::vector<Transaction> out;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || (line_no == 1 && line == "i_b,i_s,duration,rho")) {
            continue;
        }
        auto f = split_fields(line);
        if (f.size() != 4) {
            throw DataError("expected i_b,i_s,duration,rho", line_no);
        }
        auto b = parse_int64(f[0]);
        auto s = parse_int64(f[1]);
        auto d = parse_int64(f[2]);
        auto r = parse_double(f[3]);
        if (!b || !s || !d || !r || *b < 0 || *s <= *b || *d != *s - *b) {
            throw DataError("malformed transaction row", line_no);
        }
        out.push_back({static_cast<std::size_t>(*b), static_cast<std::size_t>(*s), static_cast<std::size_t>(*d), *r});
    }
    return out;
}

}  // namespace irrspec
