#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twoway/problem.hpp"

namespace twoway::cli {

/// Invalid configuration; reported with exit status 3.
struct ConfigError : Error {
    using Error::Error;
};

enum ExitCode : int { ok = 0, failure = 1, not_converged = 2, bad_config = 3 };

struct RunConfig {
    std::string command;

    std::string preset = "periodic-cos";
    double L = 1.0;
    double r = 0.1;
    double rho1 = 1.0;  // data where h > 0
    double rho2 = 2.0;  // data where h < 0

    int N = 32;
    long nodes = 0;
    double resolution = 1.0;
    double residual_tolerance = 1e-6;
    double tol = 1e-10;
    int max_iter = 200;
    std::string framework = "auto";
    double lambda_threshold = 0.0;  // 0 selects the default rule
    std::string l_mode = "drop";
    double oversample = 4.0;
    int draws = 5;
    int profile_x = 21;
    int profile_theta = 128;

    std::vector<int> N_values{25, 50, 100, 200, 400};
    std::vector<double> L_values{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0};
    std::vector<double> r_values{0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
    std::vector<double> diffusivity_L{20.0, 50.0, 100.0};

    std::string output = "twoway-out";
    std::uint64_t seed = 20240601;
    int jobs = 1;
};

/// Canonical `key=value` listing of every setting that affects results.
std::string canonical(const RunConfig& config);

/// 64-bit FNV-1a of canonical(config), as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Checks command-specific requirements; throws ConfigError naming the field.
void validate(const RunConfig& config);

ProblemSpec make_problem(const RunConfig& config);

/// Executes one command, writing artifacts under config.output.
int run(const RunConfig& config);

/// Command-line entry point.
int main(int argc, char** argv);

}  // namespace twoway::cli
