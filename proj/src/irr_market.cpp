#include "irrspec/irr_market.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "irrspec/format.hpp"

namespace irrspec {

namespace {

// The barrier test used by every passage search. All routes must share it
// so that they agree bit-for-bit.
inline bool meets_barrier(double price, double base, double rho, std::size_t t) {
    return price >= base * std::exp(rho * static_cast<double>(t));
}

std::optional<std::size_t> scan_passage(std::span<const double> prices, double max_price, std::size_t start,
                                        double rho, std::size_t min_t) {
    const double base = prices[start];
    const std::size_t horizon = prices.size() - 1 - start;
    // Once the barrier clears the series maximum no later tick can reach it.
    // The slack absorbs any non-monotone rounding in exp().
    const double ceiling = max_price * (1.0 + 1e-12);
    for (std::size_t t = min_t; t <= horizon; ++t) {
        const double barrier = base * std::exp(rho * static_cast<double>(t));
        if (prices[start + t] >= barrier) {
            return t;
        }
        if (barrier > ceiling) {
            break;
        }
    }
    return std::nullopt;
}

void check_rate(double rho) {
    if (!std::isfinite(rho) || rho < 0.0) {
        throw std::invalid_argument("rho must be finite and >= 0");
    }
}

// Success counts at one rate for several taus.
//
// With y_j = ln P_j - rho*j the barrier condition reads y_{i+t} >= y_i, so a
// start succeeds iff the suffix maximum of y from i+max(1,tau) reaches y_i.
// Margins within the rounding band of the log-domain route are settled by the
// direct barrier scan, keeping results identical to first_passage_time.
std::vector<std::size_t> count_successes(std::span<const double> prices, std::span<const double> log_prices,
                                         double max_abs_log, double max_price, double rho,
                                         std::span<const std::size_t> taus) {
    const std::size_t n = prices.size();
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) {
        y[j] = log_prices[j] - rho * static_cast<double>(j);
    }
    std::vector<double> suffix_max(n);
    suffix_max[n - 1] = y[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) {
        suffix_max[j] = std::max(y[j], suffix_max[j + 1]);
    }
    const double tol =
        64.0 * std::numeric_limits<double>::epsilon() * (max_abs_log + rho * static_cast<double>(n) + 1.0);

    std::vector<std::size_t> counts(taus.size(), 0);
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const std::size_t min_t = std::max<std::size_t>(1, taus[k]);
        std::size_t count = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (min_t > n - 1 - i) {
                break;
            }
            const double margin = suffix_max[i + min_t] - y[i];
            if (margin > tol) {
                ++count;
            } else if (margin >= -tol && scan_passage(prices, max_price, i, rho, min_t)) {
                ++count;
            }
        }
        counts[k] = count;
    }
    return counts;
}

}  // namespace

RhoGrid::RhoGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw std::invalid_argument("rho grid needs at least 2 points");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]) || values_[k] < 0.0) {
            throw std::invalid_argument("rho grid values must be finite and >= 0");
        }
        if (k > 0 && values_[k] <= values_[k - 1]) {
            throw std::invalid_argument("rho grid must be strictly increasing");
        }
    }
}

RhoGrid RhoGrid::linear(double lo, double hi, std::size_t steps) {
    if (steps < 2) {
        throw std::invalid_argument("rho grid needs at least 2 steps");
    }
    if (!(lo < hi)) {
        throw std::invalid_argument("rho grid needs rho_min < rho_max");
    }
    std::vector<double> values(steps);
    const double width = hi - lo;
    const double last = static_cast<double>(steps - 1);
    for (std::size_t k = 0; k < steps; ++k) {
        values[k] = lo + width * (static_cast<double>(k) / last);
    }
    values.back() = hi;
    return RhoGrid(std::move(values));
}

RhoGrid RhoGrid::default_grid() { return linear(0.0, 0.05, 200); }

double rho_from_discrete_rate(double r) {
    if (!(r > -1.0)) {
        throw std::invalid_argument("discrete rate must be > -1");
    }
    return std::log1p(r);
}

std::optional<std::size_t> first_passage_time(const PriceSeries& series, std::size_t start, double rho,
                                              std::size_t tau) {
    if (start + 2 > series.size()) {
        throw std::out_of_range("start index " + std::to_string(start) + " outside [0, N-2]");
    }
    check_rate(rho);
    return scan_passage(series.prices(), series.max_price(), start, rho, std::max<std::size_t>(1, tau));
}

SuccessProbability success_probability(const PriceSeries& series, double rho, std::size_t tau) {
    check_rate(rho);
    const std::size_t starts = series.size() - 1;
    const std::size_t min_t = std::max<std::size_t>(1, tau);
    SuccessProbability result;
    for (std::size_t i = 0; i < starts; ++i) {
        if (auto t = scan_passage(series.prices(), series.max_price(), i, rho, min_t)) {
            ++result.stats.successes;
            if (*t >= 2) {
                ++result.stats.multi_period;
            }
            result.stats.durations.push_back(*t);
        }
    }
    result.p = static_cast<double>(result.stats.successes) / static_cast<double>(starts);
    return result;
}

std::vector<IrrSpectrum> irr_transform(const PriceSeries& series, const RhoGrid& grid,
                                       std::span<const std::size_t> taus, Parallelism par) {
    const std::size_t n = series.size();
    const auto prices = series.prices();
    std::vector<double> log_prices(n);
    double max_abs_log = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        log_prices[j] = std::log(prices[j]);
        max_abs_log = std::max(max_abs_log, std::abs(log_prices[j]));
    }

    std::vector<std::vector<std::size_t>> counts(grid.size());
    parallel_for(grid.size(), par, [&](std::size_t k) {
        counts[k] = count_successes(prices, log_prices, max_abs_log, series.max_price(), grid[k], taus);
    });

    const std::size_t starts = n - 1;
    std::vector<IrrSpectrum> spectra;
    spectra.reserve(taus.size());
    for (std::size_t t = 0; t < taus.size(); ++t) {
        IrrSpectrum s{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()), taus[t], starts,
                      series.id()};
        for (std::size_t k = 0; k < grid.size(); ++k) {
            s.p[k] = static_cast<double>(counts[k][t]) / static_cast<double>(starts);
            s.i[k] = grid[k] * s.p[k];
        }
        spectra.push_back(std::move(s));
    }
    return spectra;
}

IrrSpectrum irr_transform(const PriceSeries& series, const RhoGrid& grid, std::size_t tau, Parallelism par) {
    const std::size_t taus[] = {tau};
    return std::move(irr_transform(series, grid, taus, par).front());
}

RhoOptimum optimal_rho(const IrrSpectrum& spectrum) {
    if (spectrum.i.empty()) {
        throw std::invalid_argument("empty spectrum");
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < spectrum.i.size(); ++k) {
        if (spectrum.i[k] > spectrum.i[best]) {
            best = k;
        }
    }
    return {spectrum.grid[best], spectrum.i[best]};
}

std::optional<double> multi_period_fraction(const PassageStats& stats) {
    if (stats.successes == 0) {
        return std::nullopt;
    }
    return static_cast<double>(stats.multi_period) / static_cast<double>(stats.successes);
}

void write_spectrum_csv(std::ostream& out, const IrrSpectrum& spectrum) {
    out << "rho,p,i\n";
    for (std::size_t k = 0; k < spectrum.grid.size(); ++k) {
        out << format_double(spectrum.grid[k]) << ',' << format_double(spectrum.p[k]) << ','
            << format_double(spectrum.i[k]) << '\n';
    }
}

nlohmann::json spectrum_sidecar(const IrrSpectrum& spectrum, std::optional<double> multi_period) {
    const auto best = optimal_rho(spectrum);
    nlohmann::json j;
    j["series_id"] = spectrum.series_id;
    j["tau"] = spectrum.tau;
    j["eligible_starts"] = spectrum.eligible_starts;
    j["rho_star"] = best.rho;
    j["i_star"] = best.density;
    j["multi_period_fraction"] = multi_period ? nlohmann::json(*multi_period) : nlohmann::json(nullptr);
    return j;
}

IrrSpectrum read_spectrum(std::istream& csv, const nlohmann::json& sidecar) {
    std::vector<double> rho;
    std::vector<double> p;
    std::vector<double> i;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(csv, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || (line_no == 1 && line == "rho,p,i")) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw DataError("expected rho,p,i", line_no);
        }
        auto r = parse_double(fields[0]);
        auto pv = parse_double(fields[1]);
        auto iv = parse_double(fields[2]);
        if (!r || !pv || !iv) {
            throw DataError("malformed spectrum row", line_no);
        }
        rho.push_back(*r);
        p.push_back(*pv);
        i.push_back(*iv);
    }
    try {
        return IrrSpectrum{RhoGrid(std::move(rho)), std::move(p), std::move(i),
                           sidecar.at("tau").get<std::size_t>(), sidecar.at("eligible_starts").get<std::size_t>(),
                           sidecar.at("series_id").get<std::string>()};
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("invalid spectrum grid: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid spectrum sidecar: ") + e.what());
    }
}

}  // namespace irrspec
