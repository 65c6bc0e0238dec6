#pragma once
// Command-line driver: flag/config-file parsing, dispatch into the library,
// and reproducible artifacts.  Every completed run writes a manifest that
// echoes the configuration and checksums each output file; identical
// configuration and seed produce bit-identical tables.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "flamelab/acceptance.hpp"
#include "flamelab/evolution.hpp"
#include "flamelab/io.hpp"
#include "flamelab/phase_plane.hpp"
#include "flamelab/pole_dynamics.hpp"
#include "flamelab/stability.hpp"

namespace flamelab {

inline constexpr const char* artifact_version = "1.0.0";

enum class Command {
    Simulate,
    SteadyRs,
    BifurcationRs,
    StabilityCmd,
    Poles,
    CatalogMs,
    Verify
};

inline Command command_from_name(const std::string& name) {
    if (name == "simulate") return Command::Simulate;
    if (name == "steady-rs") return Command::SteadyRs;
    if (name == "bifurcation-rs") return Command::BifurcationRs;
    if (name == "stability") return Command::StabilityCmd;
    if (name == "poles") return Command::Poles;
    if (name == "catalog-ms") return Command::CatalogMs;
    if (name == "verify") return Command::Verify;
    throw ConfigError("unknown command: '" + name + "'");
}

inline const char* command_name(Command c) {
    switch (c) {
        case Command::Simulate: return "simulate";
        case Command::SteadyRs: return "steady-rs";
        case Command::BifurcationRs: return "bifurcation-rs";
        case Command::StabilityCmd: return "stability";
        case Command::Poles: return "poles";
        case Command::CatalogMs: return "catalog-ms";
        case Command::Verify: return "verify";
    }
    return "?";
}

struct SweepSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    std::string spacing = "linear";
};

struct RunConfig {
    Command command = Command::Verify;
    std::optional<double> epsilon;
    std::optional<SweepSpec> sweep;
    std::vector<double> eps_values; // expanded from epsilon or sweep
    int n_modes = 0;                // 0 = choose per command
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    std::string format = "csv";
    // simulate
    std::string equation = "rs";
    double t_end = 10.0;
    double dt = 2e-3;
    int sample_every = 100;
    double amplitude = 1e-2;
    // steady-rs / bifurcation-rs / stability
    int j = 1;
    std::string branch = "plus";
    int j_max = 3;
    std::string kind = "rs";
    int n_grid = 0; // 0 = per-kind default
    int n_max = 16;
    // poles
    std::vector<double> heights;
    std::vector<std::string> lines;
    double t_max = 200.0;
};

namespace run_detail {

inline std::vector<double> expand_sweep(const SweepSpec& s) {
    if (s.count < 1) throw ConfigError("sweep: count must be >= 1");
    if (s.start <= 0.0 || s.stop <= 0.0)
        throw ConfigError("sweep: bounds must be positive");
    if (s.spacing != "linear" && s.spacing != "log")
        throw ConfigError("sweep: spacing must be linear or log");
    std::vector<double> out;
    out.reserve(s.count);
    if (s.count == 1) {
        out.push_back(s.start);
        return out;
    }
    for (int i = 0; i < s.count; ++i) {
        const double f = static_cast<double>(i) / (s.count - 1);
        if (s.spacing == "log")
            out.push_back(std::exp(std::log(s.start) +
                                   f * (std::log(s.stop) - std::log(s.start))));
        else
            out.push_back(s.start + f * (s.stop - s.start));
    }
    return out;
}

inline void check_epsilon_range(const RunConfig& cfg) {
    auto in = [&](double lo, double hi, const char* why) {
        for (double e : cfg.eps_values)
            if (!(e > lo && e < hi))
                throw ConfigError(std::string("epsilon ") + format_double(e) +
                                  " out of range for " +
                                  command_name(cfg.command) + ": " + why);
    };
    switch (cfg.command) {
        case Command::Simulate:
        case Command::Poles:
            in(0.0, std::numeric_limits<double>::infinity(),
               "must be positive");
            break;
        case Command::SteadyRs:
        case Command::BifurcationRs:
            in(0.0, 1.0, "branches exist only for epsilon in (0, 1)");
            break;
        case Command::StabilityCmd:
            if (cfg.kind == "rs" || cfg.kind == "ms")
                in(0.0, 1.0, "steady profiles exist only for epsilon in (0, 1)");
            else
                in(0.0, std::numeric_limits<double>::infinity(),
                   "must be positive");
            break;
        case Command::CatalogMs:
            in(0.05, 1.0, "the catalog window requires epsilon in (0.05, 1)");
            break;
        case Command::Verify: break;
    }
}

inline void validate(RunConfig& cfg) {
    if (cfg.command == Command::Verify) {
        if (cfg.epsilon || cfg.sweep)
            throw ConfigError("verify takes no epsilon");
    } else {
        if (cfg.epsilon && cfg.sweep)
            throw ConfigError("give either --epsilon or a sweep, not both");
        if (!cfg.epsilon && !cfg.sweep)
            throw ConfigError(std::string(command_name(cfg.command)) +
                              " needs --epsilon or a sweep");
        const bool sweep_ok = cfg.command == Command::BifurcationRs ||
                              cfg.command == Command::CatalogMs;
        if (cfg.sweep && !sweep_ok)
            throw ConfigError(std::string(command_name(cfg.command)) +
                              " does not support epsilon sweeps");
        cfg.eps_values =
            cfg.sweep ? expand_sweep(*cfg.sweep)
                      : std::vector<double>{*cfg.epsilon};
        check_epsilon_range(cfg);
    }

    if (cfg.n_modes < 0) throw ConfigError("n-modes must be nonnegative");
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("format must be csv or json");
    if (cfg.command == Command::Simulate) {
        if (cfg.equation != "rs" && cfg.equation != "ms" &&
            cfg.equation != "uform")
            throw ConfigError("equation must be rs, ms or uform");
        if (cfg.dt <= 0.0 || cfg.t_end <= 0.0)
            throw ConfigError("dt and t-end must be positive");
        if (cfg.sample_every < 1)
            throw ConfigError("sample-every must be >= 1");
    }
    if (cfg.branch != "plus" && cfg.branch != "minus")
        throw ConfigError("branch must be plus or minus");
    if (cfg.j < 1) throw ConfigError("j must be >= 1");
    if (cfg.j_max < 1) throw ConfigError("j-max must be >= 1");
    if (cfg.command == Command::StabilityCmd) {
        if (cfg.kind != "rs" && cfg.kind != "ms" && cfg.kind != "trivial-rs" &&
            cfg.kind != "trivial-ms")
            throw ConfigError(
                "kind must be rs, ms, trivial-rs or trivial-ms");
        if (cfg.n_grid < 0 || cfg.n_max < 1)
            throw ConfigError("n-grid must be >= 0 and n-max >= 1");
    }
    if (cfg.command == Command::Poles) {
        if (cfg.heights.empty())
            throw ConfigError("poles needs --heights y1,y2,...");
        for (double h : cfg.heights)
            if (!(h > 0.0)) throw ConfigError("heights must be positive");
        if (!cfg.lines.empty() && cfg.lines.size() != cfg.heights.size())
            throw ConfigError("--lines must match --heights in length");
        for (const auto& l : cfg.lines)
            if (l != "0" && l != "pi")
                throw ConfigError("lines entries must be 0 or pi");
        if (cfg.t_max <= 0.0) throw ConfigError("t-max must be positive");
    }
}

inline GridSpec pick_grid(int n_modes, double min_eps) {
    if (n_modes > 0) return GridSpec{n_modes};
    // steep profiles at small epsilon need the larger basis for 1e-8
    // residuals
    return min_eps < 0.3 ? GridSpec{1024} : GridSpec{};
}

inline nlohmann::ordered_json config_echo(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["command"] = command_name(cfg.command);
    if (cfg.epsilon) j["epsilon"] = *cfg.epsilon;
    if (cfg.sweep)
        j["sweep"] = {{"start", cfg.sweep->start},
                      {"stop", cfg.sweep->stop},
                      {"count", cfg.sweep->count},
                      {"spacing", cfg.sweep->spacing}};
    j["n_modes"] = cfg.n_modes;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["format"] = cfg.format;
    switch (cfg.command) {
        case Command::Simulate:
            j["equation"] = cfg.equation;
            j["t_end"] = cfg.t_end;
            j["dt"] = cfg.dt;
            j["sample_every"] = cfg.sample_every;
            j["amplitude"] = cfg.amplitude;
            break;
        case Command::SteadyRs:
            j["j"] = cfg.j;
            j["branch"] = cfg.branch;
            break;
        case Command::BifurcationRs:
            j["j_max"] = cfg.j_max;
            break;
        case Command::StabilityCmd:
            j["kind"] = cfg.kind;
            j["j"] = cfg.j;
            j["branch"] = cfg.branch;
            j["n_grid"] = cfg.n_grid;
            j["n_max"] = cfg.n_max;
            break;
        case Command::Poles:
            j["heights"] = cfg.heights;
            j["lines"] = cfg.lines;
            j["t_max"] = cfg.t_max;
            break;
        case Command::CatalogMs:
        case Command::Verify:
            break;
    }
    return j;
}

inline void run_simulate(const RunConfig& cfg, ArtifactSink& sink) {
    const double eps = cfg.eps_values.front();
    EvolutionProblem prob;
    prob.equation = cfg.equation == "ms"
                        ? Equation::MS
                        : cfg.equation == "uform" ? Equation::UFORM
                                                  : Equation::RS;
    prob.epsilon = eps;
    prob.grid = cfg.n_modes > 0 ? GridSpec{cfg.n_modes} : GridSpec{};
    prob.dt = cfg.dt;
    prob.t_end = cfg.t_end;
    prob.sample_every = cfg.sample_every;
    const Parity parity =
        prob.equation == Equation::UFORM ? Parity::Odd : Parity::Even;
    auto u0 = random_band_limited(prob.grid, parity, cfg.seed, 1, 10,
                                  cfg.amplitude);
    auto traj = integrate(prob, u0);

    Table table;
    table.columns.push_back("t");
    for (int i = 0; i < prob.grid.points(); ++i)
        table.columns.push_back("u_" + std::to_string(i));
    for (const auto& st : traj.states) {
        Row row;
        row.reserve(table.columns.size());
        row.emplace_back(st.time);
        for (double v : st.field.values()) row.emplace_back(v);
        table.push(std::move(row));
    }
    sink.write_table("trajectory", table, cfg.format);

    nlohmann::ordered_json params;
    params["equation"] = cfg.equation;
    params["epsilon"] = eps;
    params["n_modes"] = prob.grid.n_modes;
    params["points"] = prob.grid.points();
    params["parity"] = parity == Parity::Odd ? "odd" : "even";
    params["seed"] = cfg.seed;
    params["amplitude"] = cfg.amplitude;
    params["dt"] = cfg.dt;
    params["t_end"] = cfg.t_end;
    params["sample_every"] = cfg.sample_every;
    params["samples"] = traj.states.size();
    params["blew_up"] = traj.blew_up;
    if (traj.blew_up) params["blow_up_time"] = traj.blow_up_time;
    sink.write("params.json", params.dump(2) + "\n");
}

inline void run_steady(const RunConfig& cfg, ArtifactSink& sink) {
    const double eps = cfg.eps_values.front();
    const GridSpec grid = pick_grid(cfg.n_modes, eps);
    const int sign = cfg.branch == "minus" ? -1 : +1;
    auto st = steady_solution(cfg.j, sign, eps, grid);
    auto res = rs_residual_field(st.v, eps);

    Table table;
    table.columns = {"x", "v", "theta", "residual"};
    const auto& vv = st.v.values();
    const auto& tv = st.theta.values();
    const auto& rv = res.values();
    for (int i = 0; i < grid.points(); ++i)
        table.push({grid.x(i), vv[i], tv[i], std::abs(rv[i])});
    sink.write_table("steady", table, cfg.format);

    nlohmann::ordered_json params;
    params["j"] = st.j;
    params["sign"] = st.sign;
    params["epsilon"] = st.epsilon;
    params["n_modes"] = grid.n_modes;
    params["w0"] = st.w0;
    params["delta_phi"] = st.delta_phi;
    params["velocity"] = st.velocity;
    params["velocity_mean_form"] = st.velocity_mean_form;
    params["residual"] = st.residual;
    sink.write("params.json", params.dump(2) + "\n");
}

inline void run_bifurcation(const RunConfig& cfg, ArtifactSink& sink) {
    double min_eps = cfg.eps_values.front();
    for (double e : cfg.eps_values) min_eps = std::min(min_eps, e);
    const GridSpec grid = pick_grid(cfg.n_modes, min_eps);
    auto rows = bifurcation_diagram(cfg.eps_values, cfg.j_max,
                                    comparison_verdict_hook(), grid);
    Table table;
    table.columns = {"epsilon", "j",        "sign",   "w0",
                     "delta_phi", "velocity", "verdict"};
    for (const auto& r : rows)
        table.push({r.epsilon, static_cast<long long>(r.j),
                    static_cast<long long>(r.sign), r.w0, r.delta_phi,
                    r.velocity, r.verdict});
    sink.write_table("diagram", table, cfg.format);
}

inline void run_stability(const RunConfig& cfg, ArtifactSink& sink) {
    const double eps = cfg.eps_values.front();
    SpectrumReport report;
    if (cfg.kind == "trivial-rs" || cfg.kind == "trivial-ms") {
        report = trivial_spectrum(
            cfg.kind == "trivial-rs" ? Equation::RS : Equation::MS, eps,
            cfg.n_max);
    } else if (cfg.kind == "rs") {
        const GridSpec grid = pick_grid(cfg.n_modes, eps);
        const int sign = cfg.branch == "minus" ? -1 : +1;
        auto st = steady_solution(cfg.j, sign, eps, grid);
        LinearizedOperator op{OperatorKind::RS_ABOUT_V, eps, st.v};
        report = discrete_spectrum(op, cfg.n_grid > 0 ? cfg.n_grid : 512);
    } else {
        const GridSpec grid =
            cfg.n_modes > 0 ? GridSpec{cfg.n_modes} : GridSpec{1024};
        auto v = profile_from_poles(coalescent_steady(cfg.j, eps), grid);
        LinearizedOperator op{OperatorKind::MS_ABOUT_V, eps, v};
        report = discrete_spectrum(op, cfg.n_grid > 0 ? cfg.n_grid : 160);
    }
    nlohmann::ordered_json out;
    out["kind"] = cfg.kind;
    out["epsilon"] = eps;
    out["eigenvalues"] = report.eigenvalues;
    out["n_grid"] = report.n_grid;
    sink.write("spectrum.json", out.dump(2) + "\n");
}

inline void run_poles(const RunConfig& cfg, ArtifactSink& sink) {
    PoleSet start;
    start.epsilon = cfg.eps_values.front();
    for (size_t i = 0; i < cfg.heights.size(); ++i) {
        const double line =
            cfg.lines.empty() ? 0.0 : (cfg.lines[i] == "pi" ? pi : 0.0);
        start.pairs.push_back({line, cfg.heights[i]});
    }
    auto [steady, rep] = flow_to_steady(start, cfg.t_max);

    Table table;
    table.columns.push_back("t");
    for (int i = 1; i <= start.n(); ++i)
        table.columns.push_back("y_" + std::to_string(i));
    table.columns.push_back("U");
    for (size_t s = 0; s < rep.times.size(); ++s) {
        Row row;
        row.emplace_back(rep.times[s]);
        for (double y : rep.trajectory[s]) row.emplace_back(y);
        row.emplace_back(rep.liapunov_values[s]);
        table.push(std::move(row));
    }
    sink.write_table("poles", table, cfg.format);

    nlohmann::ordered_json fin;
    fin["epsilon"] = start.epsilon;
    fin["t_max"] = cfg.t_max;
    fin["converged"] = rep.converged;
    fin["final_force_norm"] = rep.final_force_norm;
    std::vector<double> hs;
    std::vector<std::string> ls;
    for (const auto& p : steady.pairs) {
        hs.push_back(p.height);
        ls.push_back(std::abs(p.line) < 1e-12 ? "0" : "pi");
    }
    fin["final_heights"] = hs;
    fin["lines"] = ls;
    if (rep.converged) {
        try {
            fin["classification"] =
                hessian_class_name(hessian_classify(steady).classification);
        } catch (const ConfigError&) {
            fin["classification"] = nullptr;
        }
    } else {
        fin["classification"] = nullptr;
    }
    sink.write("final.json", fin.dump(2) + "\n");
}

inline void run_catalog(const RunConfig& cfg, ArtifactSink& sink) {
    const GridSpec grid =
        cfg.n_modes > 0 ? GridSpec{cfg.n_modes} : GridSpec{1024};
    std::vector<std::vector<CatalogEntry>> per_eps(cfg.eps_values.size());
    for (size_t i = 0; i < cfg.eps_values.size(); ++i)
        per_eps[i] = enumerate_family(cfg.eps_values[i], grid);

    size_t max_heights = 0;
    for (const auto& list : per_eps)
        for (const auto& e : list)
            max_heights = std::max(max_heights, e.heights.size());

    Table table;
    table.columns = {"epsilon", "j", "k", "sign", "n_poles"};
    for (size_t i = 1; i <= max_heights; ++i)
        table.columns.push_back("y_" + std::to_string(i));
    table.columns.insert(table.columns.end(),
                         {"delta_phi", "velocity", "residual",
                          "classification"});
    for (size_t i = 0; i < per_eps.size(); ++i) {
        for (const auto& e : per_eps[i]) {
            Row row;
            row.emplace_back(cfg.eps_values[i]);
            row.emplace_back(static_cast<long long>(e.j));
            row.emplace_back(static_cast<long long>(e.k));
            row.emplace_back(static_cast<long long>(e.sign));
            row.emplace_back(static_cast<long long>(e.n_poles));
            for (size_t h = 0; h < max_heights; ++h)
                row.emplace_back(h < e.heights.size()
                                     ? Cell{e.heights[h]}
                                     : Cell{std::string{}});
            row.emplace_back(e.delta_phi);
            row.emplace_back(e.velocity);
            row.emplace_back(e.residual);
            row.emplace_back(e.classification);
            table.push(std::move(row));
        }
    }
    sink.write_table("catalog", table, cfg.format);
}

inline int run_verify(const RunConfig& cfg, ArtifactSink& sink) {
    const auto results = run_acceptance();
    Table table;
    table.columns = {"id", "name", "status", "seconds", "detail"};
    std::vector<int> failed;
    for (const auto& r : results) {
        std::printf("[%2d/%2d] %s  %-40s (%7.2f s)%s%s\n", r.id,
                    static_cast<int>(results.size()),
                    r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.empty() ? "" : "  -- ", r.detail.c_str());
        std::fflush(stdout);
        table.push({static_cast<long long>(r.id), r.name,
                    std::string(r.passed ? "PASS" : "FAIL"), r.seconds,
                    r.detail});
        if (!r.passed) failed.push_back(r.id);
    }
    sink.write_table("verify", table, cfg.format);
    if (!failed.empty()) {
        nlohmann::ordered_json err;
        err["error"]["type"] = "verification";
        err["error"]["message"] =
            std::to_string(failed.size()) + " criteria failed";
        err["error"]["failed_ids"] = failed;
        sink.write("error.json", err.dump(2) + "\n");
        return 3;
    }
    return 0;
}

inline void emit_error_line(const std::string& type,
                            const std::string& message) {
    nlohmann::json err;
    err["error"]["type"] = type;
    err["error"]["message"] = message;
    std::cerr << err.dump() << "\n";
}

} // namespace run_detail

inline int execute(const RunConfig& cfg) {
    using namespace run_detail;
    const auto t0 = std::chrono::steady_clock::now();
    ArtifactSink sink(cfg.output_dir);
    int exit_code = 0;
    try {
        switch (cfg.command) {
            case Command::Simulate: run_simulate(cfg, sink); break;
            case Command::SteadyRs: run_steady(cfg, sink); break;
            case Command::BifurcationRs: run_bifurcation(cfg, sink); break;
            case Command::StabilityCmd: run_stability(cfg, sink); break;
            case Command::Poles: run_poles(cfg, sink); break;
            case Command::CatalogMs: run_catalog(cfg, sink); break;
            case Command::Verify: exit_code = run_verify(cfg, sink); break;
        }
    } catch (const ConfigError& e) {
        emit_error_line("config", e.what());
        return 2;
    } catch (const std::exception& e) {
        nlohmann::ordered_json err;
        err["error"]["type"] = "numerical";
        err["error"]["message"] = e.what();
        err["config"] = config_echo(cfg);
        auto& partial = err["partial_outputs"];
        partial = nlohmann::ordered_json::array();
        for (const auto& w : sink.written())
            partial.push_back({{"name", w.name},
                               {"bytes", w.bytes},
                               {"sha256", w.sha256},
                               {"partial", true}});
        sink.write("error.json", err.dump(2) + "\n");
        emit_error_line("numerical", e.what());
        return 3;
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    nlohmann::ordered_json manifest;
    manifest["artifact_version"] = artifact_version;
    manifest["completed"] = true;
    manifest["wall_clock_seconds"] = wall;
    manifest["config"] = config_echo(cfg);
    auto& outputs = manifest["outputs"];
    outputs = nlohmann::ordered_json::array();
    for (const auto& w : sink.written())
        outputs.push_back(
            {{"name", w.name}, {"bytes", w.bytes}, {"sha256", w.sha256}});
    write_file(sink.dir() / "manifest.json", manifest.dump(2) + "\n");
    return exit_code;
}

inline int run_main(int argc, char** argv) {
    CLI::App app{"flamelab: numerical laboratory for wrinkled flame fronts"};
    app.set_config("--config", "",
                   "key=value configuration file; flags override its values");
    app.allow_config_extras(CLI::config_extras_mode::error);

    RunConfig cfg;
    std::string command_pos, command_opt;
    SweepSpec sweep;
    std::optional<double> epsilon;
    bool has_start = false, has_stop = false, has_count = false;

    app.add_option("COMMAND", command_pos,
                   "one of simulate|steady-rs|bifurcation-rs|stability|poles|"
                   "catalog-ms|verify");
    app.add_option("--command", command_opt, "same as the positional command");
    app.add_option("--epsilon", epsilon, "single epsilon value");
    app.add_option("--eps-start", sweep.start, "sweep start")
        ->trigger_on_parse()
        ->each([&](const std::string&) { has_start = true; });
    app.add_option("--eps-stop", sweep.stop, "sweep stop")
        ->each([&](const std::string&) { has_stop = true; });
    app.add_option("--eps-count", sweep.count, "sweep point count")
        ->each([&](const std::string&) { has_count = true; });
    app.add_option("--eps-spacing", sweep.spacing, "linear|log")
        ->check(CLI::IsMember({"linear", "log"}));
    app.add_option("--n-modes", cfg.n_modes,
                   "spectral modes (0 = per-command default)");
    app.add_option("--seed", cfg.seed, "seed for generated initial data");
    app.add_option("--output-dir", cfg.output_dir, "artifact directory")
        ->envname("FLAMELAB_OUTPUT_DIR");
    app.add_option("--format", cfg.format, "table format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    app.add_option("--equation", cfg.equation, "simulate: rs|ms|uform")
        ->check(CLI::IsMember({"rs", "ms", "uform"}));
    app.add_option("--t-end", cfg.t_end, "simulate: final time");
    app.add_option("--dt", cfg.dt, "simulate: time step");
    app.add_option("--sample-every", cfg.sample_every,
                   "simulate: record every k-th step");
    app.add_option("--amplitude", cfg.amplitude,
                   "simulate: initial data amplitude");

    app.add_option("--j", cfg.j, "branch index / coalescent pole pairs");
    app.add_option("--branch", cfg.branch, "plus|minus")
        ->check(CLI::IsMember({"plus", "minus"}));
    app.add_option("--j-max", cfg.j_max, "bifurcation-rs: largest branch");
    app.add_option("--kind", cfg.kind,
                   "stability: rs|ms|trivial-rs|trivial-ms")
        ->check(CLI::IsMember({"rs", "ms", "trivial-rs", "trivial-ms"}));
    app.add_option("--n-grid", cfg.n_grid,
                   "stability: discretization size (0 = per-kind default)");
    app.add_option("--n-max", cfg.n_max,
                   "stability: highest mode for trivial spectra");

    app.add_option("--heights", cfg.heights, "poles: initial heights")
        ->delimiter(',');
    app.add_option("--lines", cfg.lines, "poles: lines (0 or pi) per height")
        ->delimiter(',');
    app.add_option("--t-max", cfg.t_max, "poles: flow horizon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        run_detail::emit_error_line("config", e.what());
        return 2;
    }

    try {
        if (!command_pos.empty() && !command_opt.empty() &&
            command_pos != command_opt)
            throw ConfigError("positional command and --command disagree");
        const std::string name =
            !command_pos.empty() ? command_pos : command_opt;
        if (name.empty())
            throw ConfigError("no command given; see --help");
        cfg.command = command_from_name(name);
        cfg.epsilon = epsilon;
        if (has_start || has_stop || has_count) {
            if (!(has_start && has_stop && has_count))
                throw ConfigError(
                    "a sweep needs --eps-start, --eps-stop and --eps-count");
            cfg.sweep = sweep;
        }
        run_detail::validate(cfg);
    } catch (const ConfigError& e) {
        run_detail::emit_error_line("config", e.what());
        return 2;
    }

    return execute(cfg);
}

} // namespace flamelab
