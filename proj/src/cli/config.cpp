#include <algorithm>
#include <cstdio>
#include <sstream>

#include "twoway/cli.hpp"

namespace twoway::cli {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string list(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ' ';
        if constexpr (std::is_floating_point_v<T>) out += num(values[i]);
        else out += std::to_string(values[i]);
    }
    return out;
}

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError("invalid config field '" + field + "': " + message);
}

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"spectrum", "solve", "norms", "pnorm", "fit", "sweep-L",
                                                "sweep-r", "oracle-compare", "lambda-r", "diffusivity"};
    return names;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

std::string canonical(const RunConfig& c) {
    std::ostringstream os;
    os << "command=" << c.command << '\n'
       << "diffusivity_L=" << list(c.diffusivity_L) << '\n'
       << "draws=" << c.draws << '\n'
       << "framework=" << c.framework << '\n'
       << "L=" << num(c.L) << '\n'
       << "L_values=" << list(c.L_values) << '\n'
       << "l_mode=" << c.l_mode << '\n'
       << "lambda_threshold=" << num(c.lambda_threshold) << '\n'
       << "max_iter=" << c.max_iter << '\n'
       << "N=" << c.N << '\n'
       << "N_values=" << list(c.N_values) << '\n'
       << "nodes=" << c.nodes << '\n'
       << "oversample=" << num(c.oversample) << '\n'
       << "preset=" << c.preset << '\n'
       << "profile_theta=" << c.profile_theta << '\n'
       << "profile_x=" << c.profile_x << '\n'
       << "r=" << num(c.r) << '\n'
       << "r_values=" << list(c.r_values) << '\n'
       << "residual_tolerance=" << num(c.residual_tolerance) << '\n'
       << "resolution=" << num(c.resolution) << '\n'
       << "rho1=" << num(c.rho1) << '\n'
       << "rho2=" << num(c.rho2) << '\n'
       << "seed=" << c.seed << '\n'
       << "tol=" << num(c.tol) << '\n';
    return os.str();
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical(config)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void validate(const RunConfig& c) {
    require(contains(commands(), c.command), "command", "unknown command '" + c.command + "'");
    require(contains(presets::names(), c.preset), "preset", "unknown preset '" + c.preset + "'");
    require(c.L > 0.0, "L", "must be positive");
    require(c.r > 0.0 && c.r < 1.0, "r", "must lie in (0, 1)");
    require(c.N >= 1, "N", "must be at least 1");
    require(c.nodes >= 0, "nodes", "must be non-negative");
    require(c.resolution > 0.0, "resolution", "must be positive");
    require(c.residual_tolerance > 0.0, "residual_tolerance", "must be positive");
    require(c.tol > 0.0, "tol", "must be positive");
    require(c.max_iter >= 1, "max_iter", "must be at least 1");
    require(contains({"auto", "simple", "extended", "thresholded"}, c.framework), "framework",
            "expected auto, simple, extended or thresholded");
    require(c.lambda_threshold >= 0.0, "lambda_threshold", "must be non-negative");
    require(contains({"drop", "include"}, c.l_mode), "l_mode", "expected drop or include");
    require(c.oversample >= 2.0, "oversample", "must be at least 2");
    require(c.draws >= 1, "draws", "must be at least 1");
    require(c.profile_x >= 2 && c.profile_theta >= 2, "profile_x/profile_theta", "need at least 2 samples");
    require(c.jobs >= 1, "jobs", "must be at least 1");
    require(!c.output.empty(), "output", "must name a directory");

    const bool periodic_cos = c.preset == "periodic-cos";
    if (c.command == "pnorm") require(periodic_cos, "preset", "pnorm needs periodic-cos");
    if (c.command == "sweep-L" || c.command == "diffusivity") {
        require(periodic_cos, "preset", c.command + " needs periodic-cos");
        require(c.N >= 16, "N", c.command + " needs at least 16 modes per sign");
    }
    if (c.command == "lambda-r") require(c.preset == "periodic-cos-r", "preset", "lambda-r needs periodic-cos-r");
    if (c.command == "norms" || c.command == "fit") {
        require(!c.N_values.empty(), "N_values", "must not be empty");
        for (std::size_t i = 0; i < c.N_values.size(); ++i) {
            require(c.N_values[i] >= 1, "N_values", "entries must be positive");
            if (i) require(c.N_values[i] > c.N_values[i - 1], "N_values", "must be strictly increasing");
        }
        if (c.command == "fit") require(c.N_values.size() >= 5, "N_values", "fit needs at least 5 entries");
    }
    if (c.command == "sweep-L") {
        require(!c.L_values.empty(), "L_values", "must not be empty");
        for (double L : c.L_values) require(L > 0.0, "L_values", "entries must be positive");
    }
    if (c.command == "sweep-r") {
        require(!c.r_values.empty(), "r_values", "must not be empty");
        for (double r : c.r_values) require(r > 0.0 && r < 1.0, "r_values", "entries must lie in (0, 1)");
    }
    if (c.command == "diffusivity") {
        require(c.diffusivity_L.size() >= 2, "diffusivity_L", "needs at least two entries");
        for (double L : c.diffusivity_L) require(L > 0.0, "diffusivity_L", "entries must be positive");
    }
    if (c.framework == "thresholded" && c.lambda_threshold == 0.0)
        require(c.preset == "periodic-cos-r", "lambda_threshold",
                "required for the thresholded framework unless the preset is periodic-cos-r");
}

ProblemSpec make_problem(const RunConfig& c) {
    ProblemSpec spec = presets::by_name(c.preset, c.L, c.r);
    spec.w.rho_plus = c.rho1;
    spec.w.rho_minus = c.rho2;
    return spec;
}

}  // namespace twoway::cli
