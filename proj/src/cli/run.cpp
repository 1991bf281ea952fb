#include <cmath>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "output.hpp"
#include "twoway/cli.hpp"
#include "twoway/norms.hpp"
#include "twoway/periodic.hpp"

namespace twoway::cli {

namespace {

using json = nlohmann::ordered_json;

struct Context {
    const RunConfig& config;
    Output out;
    ProblemSpec spec;
    SpectralOptions spectral;
    SolveOptions solve;
};

std::shared_ptr<const Spectrum> spectrum_of(const Context& ctx, const ProblemSpec& spec, int N) {
    return std::make_shared<const Spectrum>(solve_spectrum(spec, N, ctx.spectral));
}

Framework framework_of(const Context& ctx) {
    const std::string& f = ctx.config.framework;
    if (f == "simple") return Framework::simple;
    if (f == "extended") return Framework::extended;
    if (f == "thresholded") return Framework::thresholded;
    return ctx.spec.h.kind == WeightKind::cos_minus_r ? Framework::thresholded : default_framework(ctx.spec);
}

// Λ defaults to half the first coupled eigenvalue of the r = 0 problem.
double threshold_of(const Context& ctx, Framework framework) {
    if (framework != Framework::thresholded) return 0.0;
    if (ctx.config.lambda_threshold > 0.0) return ctx.config.lambda_threshold;
    const Spectrum base = solve_spectrum(presets::periodic_cos(ctx.config.L), 16, ctx.spectral);
    return first_coupled_eigenvalue(base) / 2.0;
}

OperatorSet operators_of(const Context& ctx, std::shared_ptr<const Spectrum> spectrum) {
    const Framework f = framework_of(ctx);
    return build_operators(std::move(spectrum), ctx.config.L, f, threshold_of(ctx, f));
}

LMode l_mode_of(const RunConfig& c) {
    return c.l_mode == "include" ? LMode::include_L : LMode::drop_transcendental;
}

json coefficients_json(const SolutionCoefficients& s) {
    return json{{"c", s.c}, {"d", s.d}, {"converged", s.converged}, {"iterations", s.iterations}};
}

int cmd_spectrum(Context& ctx, json& summary) {
    const auto s = spectrum_of(ctx, ctx.spec, ctx.config.N);
    ctx.out.csv("spectrum.csv", spectrum_csv(*s));
    ctx.out.csv("samples.csv", samples_csv(*s));
    json body{{"preset", ctx.config.preset},
              {"N", s->N},
              {"nodes", s->grid.size()},
              {"lambda_1", s->lambda(1)},
              {"lambda_minus_1", s->lambda(-1)},
              {"max_residual", s->residuals.maxCoeff()},
              {"has_zero_mode", s->has_zero_mode},
              {"has_g", s->has_g}};
    ctx.out.json("spectrum.json", body);
    summary = body;
    return ok;
}

int cmd_solve(Context& ctx, json& summary) {
    const auto s = spectrum_of(ctx, ctx.spec, ctx.config.N);
    const OperatorSet ops = operators_of(ctx, s);
    const Eigen::VectorXd w = boundary_samples(ctx.spec, ops.grid());
    const SolutionCoefficients sol = neumann_solve(w, ops, ctx.solve);
    json body = json::parse(solution_json(sol, ops));
    const auto [res_in, res_out] = boundary_residual(sol, ops, w);
    body["boundary_residual"] = {{"inflow", res_in}, {"outflow", res_out}};
    ctx.out.json("solution.json", body);
    ctx.out.csv("profile.csv", profile_csv(sol, ops, ctx.config.profile_x, ctx.config.profile_theta));
    summary = coefficients_json(sol);
    summary["flux"] = flux(sol, ops);
    return sol.converged ? ok : not_converged;
}

NormEstimate norm_estimate(const Context& ctx, std::shared_ptr<const Spectrum>& s) {
    const int n_max = ctx.config.N_values.back();
    s = spectrum_of(ctx, ctx.spec, n_max);
    const OperatorSet ops = build_operators(s, ctx.config.L, Framework::simple);
    return wln_norm_sweep(ops, ctx.config.N_values, l_mode_of(ctx.config));
}

json norms_body(const NormEstimate& est) {
    return json{{"L", est.L},
                {"l_mode", est.mode == LMode::include_L ? "include" : "drop"},
                {"N_values", est.N_values},
                {"norms_squared", est.norms_squared}};
}

int cmd_norms(Context& ctx, json& summary) {
    std::shared_ptr<const Spectrum> s;
    const NormEstimate est = norm_estimate(ctx, s);
    ctx.out.csv("norms.csv", norms_csv(est));
    json body = norms_body(est);
    const OperatorSet ops = operators_of(ctx, s);
    body["pw_norm"] = pw_norm(ops);
    ctx.out.json("norms.json", body);
    summary = body;
    return ok;
}

int cmd_fit(Context& ctx, json& summary) {
    std::shared_ptr<const Spectrum> s;
    const NormEstimate est = norm_estimate(ctx, s);
    ctx.out.csv("norms.csv", norms_csv(est));
    std::vector<double> n(est.N_values.begin(), est.N_values.end());
    const PowerLawFit fit = powerlaw_fit(n, est.norms_squared);
    json body = norms_body(est);
    body["fit"] = json::parse(fit_json(fit));
    ctx.out.json("fit.json", body);
    summary = body["fit"];
    return fit.converged ? ok : not_converged;
}

int cmd_pnorm(Context& ctx, json& summary) {
    const PNormAnalytic exact = p_norm_analytic_periodic(ctx.config.L);
    const auto s = spectrum_of(ctx, ctx.spec, ctx.config.N);
    const PNormNumeric numeric = p_norm_numeric(build_operators(s, ctx.config.L, Framework::extended));
    json body{{"p_norm", exact.value},
              {"p_norm_numeric", numeric.value},
              {"rho", exact.rho_sup},
              {"rho_numeric", numeric.rho},
              {"sigma1", exact.sigma1},
              {"sigma2", exact.sigma2},
              {"r1", exact.r1},
              {"r2", exact.r2},
              {"L", ctx.config.L}};
    ctx.out.json("pnorm.json", body);
    summary = body;
    return ok;
}

int cmd_sweep_L(Context& ctx, json& summary) {
    const auto s = spectrum_of(ctx, ctx.spec, ctx.config.N);
    const auto rows = sweep_L(s, ctx.config.L_values, ctx.config.rho1, ctx.config.rho2, ctx.solve, ctx.config.jobs);
    ctx.out.csv("sweep_L.csv", sweep_L_csv(rows));
    bool all = true;
    for (const auto& r : rows) all = all && r.converged;
    summary = json{{"points", rows.size()}, {"all_converged", all}};
    return all ? ok : not_converged;
}

int cmd_sweep_r(Context& ctx, json& summary) {
    const auto rows = sweep_r(ctx.config.r_values, ctx.config.L, ctx.config.N, ctx.config.jobs);
    ctx.out.csv("sweep_r.csv", sweep_r_csv(rows));
    summary = json{{"points", rows.size()}, {"L", ctx.config.L}};
    return ok;
}

double relative_gap(const SolutionCoefficients& x, const SolutionCoefficients& y) {
    double num = std::hypot(x.c - y.c, x.d - y.d);
    double den = std::hypot(y.c, y.d);
    num = std::hypot(num, (x.a - y.a).norm());
    den = std::hypot(den, y.a.norm());
    return den > 0.0 ? num / den : num;
}

int cmd_oracle_compare(Context& ctx, json& summary) {
    const auto s = spectrum_of(ctx, ctx.spec, ctx.config.N);
    const OperatorSet ops = operators_of(ctx, s);
    const Eigen::VectorXd w = boundary_samples(ctx.spec, ops.grid());
    const SolutionCoefficients series = neumann_solve(w, ops, ctx.solve);
    const DirectSolveReport direct = direct_solve(ctx.spec, ops, ctx.config.oversample);

    json draws = json::array();
    double worst = 0.0;
    bool converged = series.converged;
    for (int k = 0; k < ctx.config.draws; ++k) {
        const SyntheticData data = random_trace_data(ops, ctx.config.seed + static_cast<std::uint64_t>(k));
        const SolutionCoefficients sol = neumann_solve(data.w, ops, ctx.solve);
        const auto traced = [&](const Quadrature& grid) { return boundary_trace(data.exact, ops, grid); };
        const DirectSolveReport oracle = direct_solve(traced, ops, ctx.config.oversample);
        const double gap = relative_gap(sol, oracle.solution);
        worst = std::max(worst, gap);
        converged = converged && sol.converged;
        draws.push_back({{"seed", ctx.config.seed + static_cast<std::uint64_t>(k)},
                         {"neumann_vs_direct", gap},
                         {"neumann_vs_exact", relative_gap(sol, data.exact)},
                         {"iterations", sol.iterations},
                         {"converged", sol.converged}});
    }
    json body{{"framework", framework_name(ops.framework)},
              {"lambda_threshold", ops.threshold},
              {"neumann", coefficients_json(series)},
              {"direct", {{"c", direct.solution.c},
                          {"d", direct.solution.d},
                          {"rows", direct.rows},
                          {"unknowns", direct.unknowns},
                          {"condition", direct.condition}}},
              {"boundary_data_gap", relative_gap(series, direct.solution)},
              {"trace_span_draws", draws},
              {"trace_span_max_error", worst}};
    ctx.out.json("oracle.json", body);
    summary = json{{"boundary_data_gap", body["boundary_data_gap"]}, {"trace_span_max_error", worst}};
    return converged ? ok : not_converged;
}

int cmd_lambda_r(Context& ctx, json& summary) {
    const auto s = spectrum_of(ctx, ctx.spec, ctx.config.N);
    const LambdaR lr = lambda_R(*s);
    const LowerBound lb = wlp_lower_bound(*s, ctx.config.L);
    json body{{"r", lr.r},
              {"lambda_R", lr.lambda_R},
              {"two_r", 2.0 * lr.r},
              {"deviation_norm", lr.deviation_norm},
              {"L", ctx.config.L},
              {"normalization_ratio", lb.normalization_ratio},
              {"lower_bound", lb.bound}};
    ctx.out.json("lambda_r.json", body);
    summary = body;
    return ok;
}

int cmd_diffusivity(Context& ctx, json& summary) {
    const auto s = spectrum_of(ctx, ctx.spec, ctx.config.N);
    const DiffusivityEstimate est =
        diffusivity_estimate(s, ctx.config.diffusivity_L, ctx.config.rho1, ctx.config.rho2, ctx.solve);
    if (est.short_L_warning) std::cerr << "warning: some L < 10; the diffusive limit may not apply\n";
    json body{{"L_values", est.L_values},
              {"flux", est.flux},
              {"D", est.D},
              {"extrapolation_length", est.extrapolation_length},
              {"residual", est.residual},
              {"D_naive", est.D_naive},
              {"short_L_warning", est.short_L_warning},
              {"all_converged", est.all_converged}};
    ctx.out.json("diffusivity.json", body);
    summary = body;
    return est.all_converged ? ok : not_converged;
}

}  // namespace

int run(const RunConfig& config) {
    validate(config);
    Context ctx{config, Output(config), make_problem(config), {}, {}};
    ctx.spectral.residual_tolerance = config.residual_tolerance;
    ctx.spectral.resolution = config.resolution;
    ctx.spectral.min_nodes = config.nodes;
    ctx.solve.tol = config.tol;
    ctx.solve.max_iter = config.max_iter;

    json summary;
    int status = failure;
    const std::string& c = config.command;
    if (c == "spectrum") status = cmd_spectrum(ctx, summary);
    else if (c == "solve") status = cmd_solve(ctx, summary);
    else if (c == "norms") status = cmd_norms(ctx, summary);
    else if (c == "fit") status = cmd_fit(ctx, summary);
    else if (c == "pnorm") status = cmd_pnorm(ctx, summary);
    else if (c == "sweep-L") status = cmd_sweep_L(ctx, summary);
    else if (c == "sweep-r") status = cmd_sweep_r(ctx, summary);
    else if (c == "oracle-compare") status = cmd_oracle_compare(ctx, summary);
    else if (c == "lambda-r") status = cmd_lambda_r(ctx, summary);
    else if (c == "diffusivity") status = cmd_diffusivity(ctx, summary);

    json head{{"command", c}, {"config_hash", config_hash(config)}, {"status", status}};
    for (auto it = summary.begin(); it != summary.end(); ++it) head[it.key()] = it.value();
    std::cout << head.dump() << '\n';
    if (status == not_converged) std::cerr << "twoway: iteration did not converge; partial results written\n";
    return status;
}

int main(int argc, char** argv) {
    RunConfig config;
    CLI::App app{"Two-way diffusion solver"};
    app.set_config("--config", "", "Key/value config file (INI or TOML)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1, 1);
    app.fallthrough();

    app.add_option("--preset", config.preset, "Problem preset")->check(CLI::IsMember(presets::names()));
    app.add_option("--L", config.L, "Slab length");
    app.add_option("--r", config.r, "Offset r for periodic-cos-r");
    app.add_option("--rho1", config.rho1, "Boundary data where h > 0");
    app.add_option("--rho2", config.rho2, "Boundary data where h < 0");
    app.add_option("--N", config.N, "Modes per sign");
    app.add_option("--nodes", config.nodes, "Minimum quadrature nodes");
    app.add_option("--resolution", config.resolution, "Trial-space scale factor");
    app.add_option("--residual-tolerance", config.residual_tolerance, "Eigenpair residual bound");
    app.add_option("--tol", config.tol, "Iteration increment tolerance");
    app.add_option("--max-iter", config.max_iter, "Iteration cap");
    app.add_option("--framework", config.framework, "auto, simple, extended or thresholded");
    app.add_option("--lambda-threshold", config.lambda_threshold, "Threshold for the thresholded framework");
    app.add_option("--l-mode", config.l_mode, "drop or include the (1 - e^{-|lambda| L}) factors");
    app.add_option("--oversample", config.oversample, "Least-squares rows per unknown");
    app.add_option("--draws", config.draws, "Random trace-span draws for oracle-compare");
    app.add_option("--profile-x", config.profile_x, "Profile samples in x");
    app.add_option("--profile-theta", config.profile_theta, "Profile samples in theta");
    app.add_option("--N-values", config.N_values, "Mode counts for norms/fit")->delimiter(',');
    app.add_option("--L-values", config.L_values, "Slab lengths for sweep-L")->delimiter(',');
    app.add_option("--r-values", config.r_values, "Offsets for sweep-r")->delimiter(',');
    app.add_option("--diffusivity-L", config.diffusivity_L, "Slab lengths for diffusivity")->delimiter(',');
    app.add_option("--out", config.output, "Output directory");
    app.add_option("--seed", config.seed, "Random seed");
    app.add_option("--jobs", config.jobs, "Concurrent sweep points")->envname("TWOWAY_JOBS");

    for (const char* name : {"spectrum", "solve", "norms", "pnorm", "fit", "sweep-L", "sweep-r", "oracle-compare",
                             "lambda-r", "diffusivity"})
        app.add_subcommand(name, std::string("Run ") + name)->callback([&config, name] { config.command = name; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "twoway: " << e.what() << '\n';
        return bad_config;
    }

    try {
        return run(config);
    } catch (const ConfigError& e) {
        std::cerr << "twoway: " << e.what() << '\n';
        return bad_config;
    } catch (const std::exception& e) {
        std::cerr << "twoway: error: " << e.what() << '\n';
        return failure;
    }
}

}  // namespace twoway::cli
