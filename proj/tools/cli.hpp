#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace irrspec::cli {

enum class ExitCode : int { Ok = 0, DataError = 1, UsageError = 2 };

/// Parsed command line. Only the fields of the chosen subcommand are used.
struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string input_b;
    std::string output;
    std::string format = "csv";
    unsigned threads = 0;

    // irr, leadlag
    double rho_min = 0.0;
    double rho_max = 0.05;
    std::size_t steps = 200;
    std::size_t tau = 0;
    std::vector<std::size_t> taus{0, 3, 6, 9, 12, 15};
    double node_floor = 1e-6;

    // strategy
    std::size_t short_window = 5;
    std::size_t long_window = 25;
    std::string mode = "mc";
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
    double bin_min = -0.05;
    double bin_max = 0.05;
    double bin_width = 5e-4;
    bool clamp = false;
    std::string transactions;

    // logret
    std::string scale = "daily";
    std::size_t bins = 101;
    std::optional<double> ret_min;
    std::optional<double> ret_max;
    bool raw = false;
    double epsilon = 0.0;

    // synth
    std::string kind = "gbm";
    std::size_t n = 1000;
    double mu = 0.0;
    double sigma = 0.01;
    std::size_t lag = 0;
    double noise = 0.0;
    bool header = false;
};

/// Runs one invocation. `args` excludes the program name. Artifacts are
/// written atomically; a one-line summary goes to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace irrspec::cli
