#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "irrspec/format.hpp"
#include "irrspec/irr_market.hpp"
#include "irrspec/leadlag.hpp"
#include "irrspec/return_stats.hpp"
#include "irrspec/series.hpp"
#include "irrspec/trend_strategy.hpp"

namespace irrspec::cli {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError("cannot write '" + tmp.string() + "'");
        }
        body(out);
        out.flush();
        if (!out) {
            throw DataError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("cannot move output into '" + path.string() + "'");
    }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    write_atomic(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

fs::path sidecar_path(const fs::path& output) {
    fs::path side = output;
    side.replace_extension(".json");
    if (side == output) {
        side = output;
        side += ".sidecar.json";
    }
    return side;
}

std::string fmt(double v) { return format_double(v); }

std::string opt_fmt(std::optional<double> v) { return v ? fmt(*v) : "undefined"; }

RhoGrid grid_from(const RunConfig& cfg) {
    if (!(cfg.rho_min < cfg.rho_max)) {
        throw UsageError("--rho-min must be smaller than --rho-max");
    }
    if (cfg.rho_min < 0.0) {
        throw UsageError("--rho-min must be >= 0");
    }
    if (cfg.steps < 2) {
        throw UsageError("--steps must be >= 2");
    }
    return RhoGrid::linear(cfg.rho_min, cfg.rho_max, cfg.steps);
}

void check_format(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json") {
        throw UsageError("--format must be csv or json");
    }
}

int run_irr(const RunConfig& cfg, std::ostream& out) {
    check_format(cfg);
    const auto grid = grid_from(cfg);
    const auto series = read_series_csv(cfg.input);
    const auto spectrum = irr_transform(series, grid, cfg.tau, Parallelism{cfg.threads});
    const auto best = optimal_rho(spectrum);
    const auto mpf = multi_period_fraction(success_probability(series, best.rho, cfg.tau).stats);

    auto meta = spectrum_sidecar(spectrum, mpf);
    if (cfg.format == "csv") {
        write_atomic(cfg.output, [&](std::ostream& o) { write_spectrum_csv(o, spectrum); });
        write_json(sidecar_path(cfg.output), meta);
    } else {
        meta["rho"] = std::vector<double>(grid.values().begin(), grid.values().end());
        meta["p"] = spectrum.p;
        meta["i"] = spectrum.i;
        write_json(cfg.output, meta);
    }
    out << "irr: series=" << series.id() << " N=" << series.size() << " tau=" << cfg.tau
        << " rho*=" << fmt(best.rho) << " I*=" << fmt(best.density) << " multi_period_fraction=" << opt_fmt(mpf)
        << '\n';
    return 0;
}

int run_strategy(const RunConfig& cfg, std::ostream& out) {
    check_format(cfg);
    if (cfg.mode != "mc" && cfg.mode != "scan") {
        throw UsageError("--mode must be mc or scan");
    }
    if (cfg.mode == "mc" && cfg.samples < 1) {
        throw UsageError("--samples must be >= 1");
    }
    if (!(cfg.bin_min < cfg.bin_max) || !(cfg.bin_width > 0.0)) {
        throw UsageError("bins need --bin-min < --bin-max and --bin-width > 0");
    }
    const MaConfig ma{cfg.short_window, cfg.long_window};
    const auto series = read_series_csv(cfg.input);
    try {
        ma.validate(series.size());
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("-S/-L: ") + e.what());
    }
    const auto signals = detect_signals(series, ma);
    const auto txs = cfg.mode == "mc"
                         ? monte_carlo_transactions(series, ma, cfg.samples, cfg.seed, Parallelism{cfg.threads})
                         : extract_transactions_scan(signals, series);
    const auto spectrum =
        strategy_spectrum(txs, uniform_edges(cfg.bin_min, cfg.bin_max, cfg.bin_width),
                          cfg.clamp ? OutOfRangePolicy::Clamp : OutOfRangePolicy::Error);

    if (cfg.format == "csv") {
        write_atomic(cfg.output, [&](std::ostream& o) { write_strategy_csv(o, spectrum); });
    } else {
        nlohmann::json j;
        j["series_id"] = series.id();
        j["short_window"] = ma.short_window;
        j["long_window"] = ma.long_window;
        j["mode"] = cfg.mode;
        j["n_transactions"] = spectrum.n_transactions;
        j["bin_edges"] = spectrum.bin_edges;
        j["weighted"] = spectrum.weighted;
        j["counts"] = spectrum.counts;
        write_json(cfg.output, j);
    }
    if (!cfg.transactions.empty()) {
        write_atomic(cfg.transactions, [&](std::ostream& o) { write_transactions_csv(o, txs); });
    }

    const auto buys = std::count_if(signals.begin(), signals.end(),
                                    [](const SignalEvent& e) { return e.kind == SignalKind::Buy; });
    std::size_t losses = 0;
    for (const auto& t : txs) {
        losses += t.rho < 0.0 ? 1 : 0;
    }
    out << "strategy: series=" << series.id() << " S=" << ma.short_window << " L=" << ma.long_window
        << " mode=" << cfg.mode << " buys=" << buys << " sells=" << (signals.size() - static_cast<std::size_t>(buys))
        << " transactions=" << txs.size() << " losses=" << losses << '\n';
    return 0;
}

int run_logret(const RunConfig& cfg, std::ostream& out) {
    check_format(cfg);
    if (cfg.scale != "daily" && cfg.scale != "minute") {
        throw UsageError("--scale must be daily or minute");
    }
    const double default_half = cfg.scale == "daily" ? 0.05 : 0.005;
    const double lo = cfg.ret_min.value_or(-default_half);
    const double hi = cfg.ret_max.value_or(default_half);
    if (!(lo < hi) || cfg.bins < 1) {
        throw UsageError("histogram needs --ret-min < --ret-max and --bins >= 1");
    }
    if (!(cfg.epsilon >= 0.0)) {
        throw UsageError("--epsilon must be >= 0");
    }
    const auto edges = linear_edges(lo, hi, cfg.bins);
    const auto series = read_series_csv(cfg.input);
    const auto h1 = histogram(log_returns(series), edges, !cfg.raw);

    if (cfg.input_b.empty()) {
        if (cfg.format == "csv") {
            write_atomic(cfg.output, [&](std::ostream& o) { write_histogram_csv(o, h1); });
        } else {
            nlohmann::json j;
            j["series_id"] = series.id();
            j["bin_edges"] = h1.bin_edges;
            j["counts"] = h1.counts;
            j["normalized"] = h1.normalized;
            j["below"] = h1.below;
            j["above"] = h1.above;
            write_json(cfg.output, j);
        }
        out << "logret: series=" << series.id() << " returns=" << series.size() - 1 << " bins=" << cfg.bins
            << " out_of_range=" << h1.out_of_range() << '\n';
        return 0;
    }

    const auto series_b = read_series_csv(cfg.input_b);
    const auto h2 = histogram(log_returns(series_b), edges, !cfg.raw);
    const auto diff = histogram_difference(h1, h2, cfg.epsilon);
    auto meta = diff_sidecar(diff, cfg.epsilon);
    meta["series_a"] = series.id();
    meta["series_b"] = series_b.id();
    if (cfg.format == "csv") {
        write_atomic(cfg.output, [&](std::ostream& o) { write_diff_csv(o, h1, diff); });
        write_json(sidecar_path(cfg.output), meta);
    } else {
        meta["bin_edges"] = diff.bin_edges;
        meta["count"] = h1.counts;
        meta["delta"] = diff.delta;
        write_json(cfg.output, meta);
    }
    out << "logret: series=" << series.id() << " vs " << series_b.id() << " fwhm=[" << diff.fwhm_span.first << ","
        << diff.fwhm_span.last << "] nodes_in_fwhm=" << diff.nodes_in_fwhm
        << " amplitude_ratio=" << fmt(diff.amplitude_ratio) << " fwhm_width=" << fmt(diff.fwhm_width) << '\n';
    return 0;
}

int run_leadlag(const RunConfig& cfg, std::ostream& out) {
    const auto grid = grid_from(cfg);
    if (cfg.taus.empty()) {
        throw UsageError("--taus must not be empty");
    }
    for (std::size_t k = 1; k < cfg.taus.size(); ++k) {
        if (cfg.taus[k] <= cfg.taus[k - 1]) {
            throw UsageError("--taus must be strictly increasing");
        }
    }
    if (!(cfg.node_floor >= 0.0)) {
        throw UsageError("--node-floor must be >= 0");
    }
    const auto pair = align_series(read_series_csv(cfg.input), read_series_csv(cfg.input_b));
    const auto report = tau_series_analysis(pair, grid, cfg.taus, Parallelism{cfg.threads}, cfg.node_floor);

    auto j = report_json(report);
    j["aligned_length"] = pair.a.size();
    j["dropped_a"] = pair.dropped_a;
    j["dropped_b"] = pair.dropped_b;
    const fs::path output = cfg.output;
    write_json(output, j);
    for (const auto& slice : report.slices) {
        fs::path csv = output.parent_path() / (output.stem().string() + "_tau" + std::to_string(slice.tau) + ".csv");
        write_atomic(csv, [&](std::ostream& o) { write_tau_csv(o, slice); });
    }

    out << "leadlag: " << pair.a.id() << " vs " << pair.b.id() << " N=" << pair.a.size()
        << " dropped=" << pair.dropped_a << "/" << pair.dropped_b << " nodes:";
    for (const auto& slice : report.slices) {
        out << " tau" << slice.tau << "=" << slice.nodes;
    }
    out << '\n';
    return 0;
}

int run_synth(const RunConfig& cfg, std::ostream& out) {
    PriceSeries series = [&] {
        if (cfg.kind == "gbm") {
            if (cfg.n < 2 || !(cfg.sigma >= 0.0)) {
                throw UsageError("gbm needs --n >= 2 and --sigma >= 0");
            }
            return synthesize_gbm(SynthSpec{SynthKind::Gbm, cfg.n, cfg.mu, cfg.sigma, 0, 0.0, cfg.seed});
        }
        if (cfg.kind == "lagged") {
            if (cfg.input.empty()) {
                throw UsageError("--kind lagged needs --input");
            }
            if (!(cfg.noise >= 0.0)) {
                throw UsageError("--noise must be >= 0");
            }
            auto src = read_series_csv(cfg.input);
            if (cfg.lag >= src.size()) {
                throw UsageError("--lag must be smaller than the input length");
            }
            return lagged_copy(src, cfg.lag, cfg.noise, cfg.seed);
        }
        throw UsageError("--kind must be gbm or lagged");
    }();
    write_atomic(cfg.output, [&](std::ostream& o) { write_series_csv(o, series, cfg.header); });
    out << "synth: kind=" << cfg.kind << " N=" << series.size() << " seed=" << cfg.seed
        << " last=" << fmt(series.prices().back()) << '\n';
    return 0;
}

void add_grid_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--rho-min", cfg.rho_min, "Smallest rate on the grid (per tick)")->capture_default_str();
    sub->add_option("--rho-max", cfg.rho_max, "Largest rate on the grid (per tick)")->capture_default_str();
    sub->add_option("--steps", cfg.steps, "Number of grid points")->capture_default_str();
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Internal-rate-of-return spectra for price series", "irrspec"};
    app.require_subcommand(1, 1);
    app.add_option("--threads", cfg.threads, "Worker cap (0 = all cores); never changes results");

    auto* irr = app.add_subcommand("irr", "Market IRR transform p(rho), I(rho) = rho * p(rho)");
    irr->add_option("--input", cfg.input, "Series CSV (timestamp,price)")->required();
    add_grid_options(irr, cfg);
    irr->add_option("--tau", cfg.tau, "Minimal holding period in ticks")->capture_default_str();
    irr->add_option("--output", cfg.output, "Spectrum file; CSV also writes a .json sidecar")->required();
    irr->add_option("--format", cfg.format, "csv or json")->capture_default_str();

    auto* strategy = app.add_subcommand("strategy", "Golden/Dead Cross transaction IRR spectrum");
    strategy->add_option("--input", cfg.input, "Series CSV")->required();
    strategy->add_option("-S,--short", cfg.short_window, "Short moving-average window")->capture_default_str();
    strategy->add_option("-L,--long", cfg.long_window, "Long moving-average window")->capture_default_str();
    strategy->add_option("--mode", cfg.mode, "mc (random starts) or scan (sequential pairing)")
        ->capture_default_str();
    strategy->add_option("--samples", cfg.samples, "Monte Carlo samples")->capture_default_str();
    strategy->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    strategy->add_option("--bin-min", cfg.bin_min)->capture_default_str();
    strategy->add_option("--bin-max", cfg.bin_max)->capture_default_str();
    strategy->add_option("--bin-width", cfg.bin_width)->capture_default_str();
    strategy->add_flag("--clamp", cfg.clamp, "Clamp out-of-range rates into the edge bins instead of failing");
    strategy->add_option("--transactions", cfg.transactions, "Also write the transactions CSV here");
    strategy->add_option("--output", cfg.output, "Spectrum file")->required();
    strategy->add_option("--format", cfg.format, "csv or json")->capture_default_str();

    auto* logret = app.add_subcommand("logret", "Log-return histogram, or the difference of two");
    logret->add_option("--input", cfg.input, "Reference series CSV")->required();
    logret->add_option("--input-b", cfg.input_b, "Second series; switches to difference mode");
    logret->add_option("--scale", cfg.scale, "Default binning: daily or minute")->capture_default_str();
    logret->add_option("--bins", cfg.bins)->capture_default_str();
    logret->add_option("--ret-min", cfg.ret_min, "Lower histogram edge");
    logret->add_option("--ret-max", cfg.ret_max, "Upper histogram edge");
    logret->add_flag("--raw", cfg.raw, "Raw counts instead of unit mass");
    logret->add_option("--epsilon", cfg.epsilon, "Node floor for |delta|")->capture_default_str();
    logret->add_option("--output", cfg.output)->required();
    logret->add_option("--format", cfg.format, "csv or json")->capture_default_str();

    auto* leadlag = app.add_subcommand("leadlag", "Per-tau IRR spectrum differences of two aligned series");
    leadlag->add_option("--input", cfg.input, "Series A CSV")->required();
    leadlag->add_option("--input-b", cfg.input_b, "Series B CSV")->required();
    add_grid_options(leadlag, cfg);
    leadlag->add_option("--taus", cfg.taus, "Minimal holding periods")->delimiter(',')->capture_default_str();
    leadlag->add_option("--node-floor", cfg.node_floor, "Relative |delta| floor for node counting")
        ->capture_default_str();
    leadlag->add_option("--output", cfg.output, "Report JSON; per-tau CSVs are written beside it")->required();

    auto* synth = app.add_subcommand("synth", "Synthetic GBM series or a lagged noisy copy");
    synth->add_option("--kind", cfg.kind, "gbm or lagged")->capture_default_str();
    synth->add_option("--n", cfg.n)->capture_default_str();
    synth->add_option("--mu", cfg.mu, "Per-tick log drift")->capture_default_str();
    synth->add_option("--sigma", cfg.sigma, "Per-tick log volatility")->capture_default_str();
    synth->add_option("--seed", cfg.seed)->capture_default_str();
    synth->add_option("--lag", cfg.lag)->capture_default_str();
    synth->add_option("--noise", cfg.noise)->capture_default_str();
    synth->add_option("--input", cfg.input, "Source series for --kind lagged");
    synth->add_flag("--header", cfg.header, "Write a timestamp,price header row");
    synth->add_option("--output", cfg.output)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::UsageError);
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    try {
        if (cfg.subcommand == "irr") return run_irr(cfg, out);
        if (cfg.subcommand == "strategy") return run_strategy(cfg, out);
        if (cfg.subcommand == "logret") return run_logret(cfg, out);
        if (cfg.subcommand == "leadlag") return run_leadlag(cfg, out);
        return run_synth(cfg, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::UsageError);
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::DataError);
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::UsageError);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::DataError);
    }
}

}  // namespace irrspec::cli
