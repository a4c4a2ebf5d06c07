// Acceptance suite: one PASS/FAIL/SKIP line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "irrspec/irr_market.hpp"
#include "irrspec/leadlag.hpp"
#include "irrspec/return_stats.hpp"
#include "irrspec/trend_strategy.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace irrspec;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
    Outcome outcome;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

PriceSeries gbm(std::uint64_t seed, std::size_t n, double mu, double sigma) {
    return synthesize_gbm({SynthKind::Gbm, n, mu, sigma, 0, 0.0, seed});
}

// 1,000 GBM series (N=500), 20-point grid, tau in {0,1,3}: exact agreement
// with the naive scan for every start. Budget: 300 s.
Verdict oracle_equivalence() {
    const auto start = Clock::now();
    const auto grid = RhoGrid::linear(0.0, 0.02, 20);
    const std::size_t taus[] = {0, 1, 3};
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const auto s = gbm(seed, 500, 0.0, 0.01);
        for (double rho : grid.values()) {
            for (std::size_t tau : taus) {
                for (std::size_t i = 0; i + 1 < s.size(); ++i) {
                    ++checked;
                    if (first_passage_time(s, i, rho, tau) != oracle::naive_first_passage(s.prices(), i, rho, tau)) {
                        ++mismatches;
                    }
                }
            }
        }
    }
    const double secs = seconds_since(start);
    std::ostringstream d;
    d << checked << " queries, " << mismatches << " mismatches, " << secs << " s";
    return {mismatches == 0 && secs < 300.0 ? Outcome::Pass : Outcome::Fail, d.str()};
}

Verdict analytic_spectrum() {
    const double g = 0.01;
    std::vector<double> p(1000);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 100.0 * std::exp(g * static_cast<double>(i));
    const auto s = make_series("geometric", std::move(p));
    const auto grid = RhoGrid::linear(0.0, 0.02, 200);
    const auto spec = irr_transform(s, grid, 0);

    std::size_t bad = 0;
    double below = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid[k] <= g - 1e-6) {
            bad += (spec.p[k] == 1.0 && spec.i[k] == grid[k]) ? 0 : 1;
            below = grid[k];
        } else if (grid[k] >= g + 1e-6) {
            bad += spec.p[k] == 0.0 ? 0 : 1;
        }
    }
    const auto best = optimal_rho(spec);
    std::ostringstream d;
    d << bad << " grid violations, rho*=" << best.rho << " (nearest below g: " << below << ")";
    return {bad == 0 && best.rho == below ? Outcome::Pass : Outcome::Fail, d.str()};
}

struct MonotonicityCounts {
    std::size_t tau_violations = 0;
    std::size_t rho_violations = 0;
    std::size_t comparisons = 0;
};

// 100 GBM series (N=1000) on the default grid, tau = 0..15.
const MonotonicityCounts& monotonicity() {
    static const MonotonicityCounts counts = [] {
        MonotonicityCounts c;
        const auto grid = RhoGrid::default_grid();
        std::vector<std::size_t> taus(16);
        std::iota(taus.begin(), taus.end(), 0);
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto spectra = irr_transform(gbm(seed, 1000, 0.0002, 0.01), grid, taus);
            for (std::size_t t = 0; t < taus.size(); ++t) {
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    ++c.comparisons;
                    if (t > 0 && spectra[t].p[k] > spectra[t - 1].p[k]) ++c.tau_violations;
                    if (k > 0 && spectra[t].p[k] > spectra[t].p[k - 1]) ++c.rho_violations;
                }
            }
        }
        return c;
    }();
    return counts;
}

Verdict tau_monotonicity() {
    const auto& c = monotonicity();
    return {c.tau_violations == 0 ? Outcome::Pass : Outcome::Fail,
            std::to_string(c.tau_violations) + " violations over " + std::to_string(c.comparisons) + " points"};
}

Verdict rho_monotonicity() {
    const auto& c = monotonicity();
    return {c.rho_violations == 0 ? Outcome::Pass : Outcome::Fail,
            std::to_string(c.rho_violations) + " violations over " + std::to_string(c.comparisons) + " points"};
}

// 200 GBM series of 2,458 daily points; S=5 with L in {25, 75, 200};
// 10,000 Monte Carlo samples per series at L=25.
Verdict strategy_oracle() {
    std::size_t signal_mismatch = 0;
    std::size_t signals = 0;
    std::size_t foreign = 0;
    std::size_t sampled = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto s = gbm(seed, 2458, 0.0002, 0.012);
        for (std::size_t l : {25u, 75u, 200u}) {
            const auto evs = detect_signals(s, {5, l});
            const auto brute = oracle::brute_signals(s.prices(), 5, l);
            signals += evs.size();
            if (evs.size() != brute.size()) {
                ++signal_mismatch;
                continue;
            }
            for (std::size_t k = 0; k < evs.size(); ++k) {
                const auto kind = evs[k].kind == SignalKind::Buy ? oracle::Kind::Buy : oracle::Kind::Sell;
                if (evs[k].index != brute[k].first || kind != brute[k].second) ++signal_mismatch;
            }
        }
        const auto reachable = oracle::start_enumeration(oracle::brute_signals(s.prices(), 5, 25), s.size());
        for (const auto& t : monte_carlo_transactions(s, {5, 25}, 10000, seed)) {
            ++sampled;
            if (!reachable.contains({t.buy_index, t.sell_index})) ++foreign;
        }
    }
    std::ostringstream d;
    d << signals << " signals (" << signal_mismatch << " discrepancies), " << sampled << " sampled transactions ("
      << foreign << " outside the start enumeration)";
    return {signal_mismatch == 0 && foreign == 0 ? Outcome::Pass : Outcome::Fail, d.str()};
}

Verdict worked_fixture() {
    const auto evs = detect_signals(make_series("fixture", {10, 9, 8, 9, 11, 14}), {2, 3});
    const bool ok = evs.size() == 1 && evs[0].index == 4 && evs[0].kind == SignalKind::Buy;
    return {ok ? Outcome::Pass : Outcome::Fail, std::to_string(evs.size()) + " event(s)"};
}

Verdict histogram_conservation() {
    std::vector<PriceSeries> fixtures{make_series("fixture", {10, 9, 8, 9, 11, 14}),
                                      make_series("flat", std::vector<double>(50, 7.0)),
                                      make_series("jumps", {100, 200, 50, 51, 49, 400})};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) fixtures.push_back(gbm(seed, 2458, 0.0, 0.02));
    std::size_t bad = 0;
    std::size_t self_nodes = 0;
    for (const auto& s : fixtures) {
        const auto r = log_returns(s);
        for (const auto& edges : {daily_return_edges(), minute_return_edges()}) {
            const auto h = histogram(r, edges, false);
            const double in_range = std::accumulate(h.counts.begin(), h.counts.end(), 0.0);
            if (static_cast<std::size_t>(in_range) + h.out_of_range() != s.size() - 1) ++bad;
            self_nodes += histogram_difference(h, h).nodes_in_fwhm;
        }
    }
    std::ostringstream d;
    d << fixtures.size() << " fixtures x 2 binnings, " << bad << " conservation failures, " << self_nodes
      << " self-difference nodes";
    return {bad == 0 && self_nodes == 0 ? Outcome::Pass : Outcome::Fail, d.str()};
}

// 100 GBM pairs, N=30,000, b = lagged_copy(a, 1, noise 0.0005). Minute-scale
// volatility sigma=0.001 per tick, grid 200 points on [0, 4*sigma], taus {0,3,...,15}.
// Needs nodes(tau=0) >= nodes(tau=3) in >= 60 replicates, within 600 s.
Verdict leadlag_tendency() {
    const auto start = Clock::now();
    const auto grid = RhoGrid::linear(0.0, 0.004, 200);
    const auto taus = default_taus();
    int holds = 0;
    std::size_t nodes0 = 0;
    std::size_t nodes3 = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto a = gbm(seed, 30000, 0.0, 0.001);
        const auto b = lagged_copy(a, 1, 0.0005, seed + 1000000);
        const auto report = tau_series_analysis(align_series(a, b), grid, taus);
        nodes0 += report.slices[0].nodes;
        nodes3 += report.slices[1].nodes;
        holds += report.slices[0].nodes >= report.slices[1].nodes ? 1 : 0;
    }
    const double secs = seconds_since(start);
    std::ostringstream d;
    d << holds << "/100 replicates with nodes(0) >= nodes(3); mean nodes tau0=" << nodes0 / 100.0
      << " tau3=" << nodes3 / 100.0 << "; " << secs << " s";
    return {holds >= 60 && secs < 600.0 ? Outcome::Pass : Outcome::Fail, d.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Runs the real executable twice per configuration (threads 1 and 3) and
// compares every artifact byte for byte.
Verdict cli_determinism() {
    const fs::path dir = fs::temp_directory_path() / "irrspec_acceptance_determinism";
    fs::remove_all(dir);
    const std::string exe = IRRSPEC_CLI_PATH;
    std::vector<std::string> artifacts;
    bool commands_ok = true;
    for (const char* run : {"r1", "r2"}) {
        const fs::path out = dir / run;
        fs::create_directories(out);
        const std::string threads = std::string(run) == "r1" ? "1" : "3";
        const std::string o = out.string() + "/";
        const std::vector<std::string> commands{
            "synth --kind gbm --n 3000 --mu 0.0002 --sigma 0.001 --seed 7 --output " + o + "a.csv",
            "synth --kind lagged --input " + o + "a.csv --lag 1 --noise 0.0005 --seed 8 --output " + o + "b.csv",
            "--threads " + threads + " irr --input " + o + "a.csv --rho-max 0.004 --tau 3 --output " + o + "irr.csv",
            "--threads " + threads + " strategy --input " + o + "a.csv --samples 5000 --seed 11 --clamp --output " +
                o + "st.csv --transactions " + o + "tx.csv",
            "--threads " + threads + " logret --input " + o + "a.csv --input-b " + o +
                "b.csv --scale minute --output " + o + "diff.csv",
            "--threads " + threads + " leadlag --input " + o + "a.csv --input-b " + o +
                "b.csv --rho-max 0.004 --output " + o + "ll.json",
        };
        for (const auto& c : commands) {
            const std::string line = "\"" + exe + "\" " + c + " > /dev/null";
            if (std::system(line.c_str()) != 0) {
                commands_ok = false;
            }
        }
        if (artifacts.empty()) {
            for (const auto& e : fs::directory_iterator(out)) artifacts.push_back(e.path().filename().string());
        }
    }
    std::size_t differing = 0;
    for (const auto& name : artifacts) {
        if (slurp(dir / "r1" / name) != slurp(dir / "r2" / name)) ++differing;
    }
    fs::remove_all(dir);
    std::ostringstream d;
    d << artifacts.size() << " artifacts compared across --threads 1 / 3, " << differing << " differ"
      << (commands_ok ? "" : ", a command failed");
    return {commands_ok && differing == 0 && artifacts.size() >= 12 ? Outcome::Pass : Outcome::Fail, d.str()};
}

// Needs $IRRSPEC_INDEX_DATA pointing at topix.csv, sp500.csv and ftse100.csv
// (daily closes 1995/09/01 - 2005/08/30).
Verdict index_data() {
    const char* root = std::getenv("IRRSPEC_INDEX_DATA");
    const std::vector<std::string> names{"topix.csv", "sp500.csv", "ftse100.csv"};
    if (root == nullptr) {
        return {Outcome::Skip, "set IRRSPEC_INDEX_DATA to a directory holding topix.csv, sp500.csv, ftse100.csv"};
    }
    for (const auto& n : names) {
        if (!fs::exists(fs::path(root) / n)) {
            return {Outcome::Skip, "missing " + (fs::path(root) / n).string()};
        }
    }
    bool ok = true;
    std::ostringstream d;
    for (const auto& n : names) {
        const auto s = read_series_csv(fs::path(root) / n);
        const auto best = optimal_rho(irr_transform(s, RhoGrid::default_grid(), 0));
        const auto mpf = multi_period_fraction(success_probability(s, best.rho, 0).stats);
        const bool pass = best.rho >= 0.005 && best.rho <= 0.009 && mpf && *mpf > 0.30;
        ok = ok && pass;
        d << s.id() << ": rho*=" << best.rho << " dt>=2 fraction=" << (mpf ? std::to_string(*mpf) : "undefined")
          << (pass ? "" : " (out of bounds)") << "; ";
    }
    return {ok ? Outcome::Pass : Outcome::Fail, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"oracle equivalence (1000 GBM x 20 rho x tau {0,1,3})", oracle_equivalence},
        {"analytic spectrum (geometric g=0.01, N=1000)", analytic_spectrum},
        {"tau-monotonicity (100 GBM series)", tau_monotonicity},
        {"rho-monotonicity (100 GBM series)", rho_monotonicity},
        {"strategy oracle (200 GBM series, N=2458, 10000 MC samples)", strategy_oracle},
        {"worked signal fixture [10,9,8,9,11,14] S=2 L=3", worked_fixture},
        {"histogram conservation and self-difference", histogram_conservation},
        {"lead-lag tendency (100 pairs, N=30000)", leadlag_tendency},
        {"CLI determinism across runs and --threads", cli_determinism},
        {"index data rho* in [0.005, 0.009], dt>=2 fraction > 0.30", index_data},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v{Outcome::Fail, ""};
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {Outcome::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Skip ? "SKIP" : "FAIL";
        failures += v.outcome == Outcome::Fail ? 1 : 0;
        std::cout << "[" << tag << "] " << name << " -- " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
