#pragma once

// Command-line front end. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure (norm drift), 1 anything unexpected.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "quadfold/config.hpp"
#include "quadfold/csv.hpp"
#include "quadfold/errors.hpp"
#include "quadfold/experiments.hpp"
#include "quadfold/models.hpp"
#include "quadfold/version.hpp"

namespace quadfold {

enum ExitCode : int { kExitOk = 0, kExitUnexpected = 1, kExitConfig = 2, kExitNumerical = 3 };

struct CliOptions {
    std::optional<std::string> preset;
    std::optional<std::string> config_path;
    std::string out_dir = "./out";
    std::vector<std::string> overrides;
    std::optional<bool> micromotion_map;
    std::optional<int> sample_dt_ns;
    std::optional<double> rel_tol;
};

namespace cli_detail {

inline RunSpec resolve(const CliOptions& o)
{
    RunSpec spec = resolve_spec(o.preset, o.config_path, o.overrides);
    auto& s = spec.scenario;
    if (o.micromotion_map) s.micromotion_map = *o.micromotion_map;
    if (o.sample_dt_ns) {
        if (*o.sample_dt_ns <= 0) throw ConfigError("--sample-dt-ns must be positive");
        s.sample_dt = *o.sample_dt_ns * 1e-3;
        s.propagation.sample_dt = s.sample_dt;
    }
    if (o.rel_tol) {
        if (!(*o.rel_tol > 0)) throw ConfigError("--rel-tol must be positive");
        s.propagation.rel_tol = *o.rel_tol;
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

inline std::filesystem::path prepare_out_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");
    return dir;
}

/// Tolerance for engine-vs-closed-form agreement: 1e-12 * max(1, ||H0||).
inline double heff_tolerance(const HarmonicSystem& sys) { return 1e-12 * std::max(1.0, sys.h0().operator_norm()); }

inline Json summary_base(const RunSpec& spec, const std::string& command)
{
    const auto& s = spec.scenario;
    Json j;
    j["tool"] = "quadfold";
    j["version"] = std::string(kVersion);
    j["command"] = command;
    j["scenario"] = s.name;
    j["model"] = model_name(s.params);
    j["parameters_mhz"] = params_to_json(s.params);
    j["parameters_rad_per_us"] = params_to_angular_json(s.params);
    j["effective_parameters_mhz"] = effective_params_json(s.params);
    j["initial_state"] = s.initial_state;
    j["t_end_us"] = s.t_end;
    j["sample_dt_us"] = s.sample_dt;
    j["micromotion_map"] = s.micromotion_map;
    j["propagation"] = {{"rel_tol", s.propagation.rel_tol},
                        {"abs_tol", s.propagation.abs_tol},
                        {"max_step_fraction", s.propagation.max_step_fraction}};
    Json assumptions = s.assumptions;
    assumptions.push_back(s.micromotion_map
                              ? "effective trajectories mapped back to the lab frame with exp(-iK(t)), K(t) to O(w^-2)"
                              : "effective trajectories compared without the micromotion frame map");
    j["assumptions"] = assumptions;

    const HarmonicSystem sys = build_system(s.params);
    j["heff_max_abs_diff_rad_per_us"] = max_abs_diff(effective_hamiltonian(sys), closed_heff(s.params));
    return j;
}

inline void write_json(const std::filesystem::path& path, const Json& j)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

inline std::string format_entry(Complex z)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::fixed << std::setprecision(6);
    if (z.imag() == 0.0) {
        os << z.real();
    } else {
        os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    }
    return os.str();
}

inline void print_matrix(std::ostream& out, const Operator& op, double scale)
{
    const auto& labels = op.labels();
    std::size_t width = 10;
    for (int i = 0; i < op.dim(); ++i)
        for (int j = 0; j < op.dim(); ++j) width = std::max(width, format_entry(op.matrix()(i, j) * scale).size() + 1);
    std::size_t lw = 0;
    for (const auto& l : labels) lw = std::max(lw, l.size());
    for (int i = 0; i < op.dim(); ++i) {
        out << "  " << std::setw(static_cast<int>(lw)) << (labels.empty() ? std::to_string(i + 1) : labels[i]) << " |";
        for (int j = 0; j < op.dim(); ++j)
            out << std::setw(static_cast<int>(width)) << format_entry(op.matrix()(i, j) * scale);
        out << '\n';
    }
}

inline int cmd_heff(const CliOptions& o, std::ostream& out)
{
    const RunSpec spec = resolve(o);
    const auto& s = spec.scenario;
    const HarmonicSystem sys = build_system(s.params);
    const Operator engine = effective_hamiltonian(sys);
    const Operator closed = closed_heff(s.params);
    const double diff = max_abs_diff(engine, closed);

    out << "model: " << model_name(s.params) << " (" << s.name << ")\n";
    out << "engine H_eff / 2pi [MHz]:\n";
    print_matrix(out, engine, 1.0 / kTwoPi);
    out << "closed-form H_eff / 2pi [MHz]:\n";
    print_matrix(out, closed, 1.0 / kTwoPi);
    out << "effective parameters [MHz]: " << effective_params_json(s.params).dump() << '\n';
    out << "max |engine - closed| [rad/us]: " << format_double(diff) << '\n';
    out << "tolerance [rad/us]: " << format_double(heff_tolerance(sys)) << '\n';
    return kExitOk;
}

inline Json deviation_map(const ComparisonResult& r, double MonitoredDeviation::*field)
{
    Json j = Json::object();
    for (const auto& d : r.deviations) j[d.name] = d.*field;
    return j;
}

inline int cmd_run(const CliOptions& o, std::ostream& out)
{
    const RunSpec spec = resolve(o);
    const auto dir = prepare_out_dir(o.out_dir);
    const auto result = run_comparison(spec.scenario);
    const auto labels = basis_labels(spec.scenario.params);

    write_trajectory_csv(dir / "trajectories_exact.csv", result.exact, labels);
    write_trajectory_csv(dir / "trajectories_effective.csv", result.effective, labels);
    write_trajectory_csv(dir / "trajectories_rwa.csv", result.rwa, labels);

    Json j = summary_base(spec, "run");
    j["monitored"] = spec.scenario.monitored;
    j["dev_effective"] = deviation_map(result, &MonitoredDeviation::dev_effective);
    j["dev_rwa"] = deviation_map(result, &MonitoredDeviation::dev_rwa);
    j["dev_effective_period_avg"] = deviation_map(result, &MonitoredDeviation::dev_effective_avg);
    j["dev_rwa_period_avg"] = deviation_map(result, &MonitoredDeviation::dev_rwa_avg);
    Json coupled = Json::object();
    for (const auto& d : result.deviations) coupled[d.name] = d.drive_coupled;
    j["drive_coupled"] = coupled;
    j["max_norm_drift"] = {{"exact", result.exact.max_norm_drift},
                           {"effective", result.effective.max_norm_drift},
                           {"rwa", result.rwa.max_norm_drift}};
    j["samples"] = result.exact.size();
    write_json(dir / "summary.json", j);

    out << "wrote " << result.exact.size() << " samples to " << dir.string() << '\n';
    for (const auto& d : result.deviations)
        out << "  " << d.name << ": dev_effective " << format_double(d.dev_effective) << " (period-avg "
            << format_double(d.dev_effective_avg) << "), dev_rwa " << format_double(d.dev_rwa) << '\n';
    return kExitOk;
}

inline int cmd_scan(const CliOptions& o, std::ostream& out)
{
    const RunSpec spec = resolve(o);
    const auto dir = prepare_out_dir(o.out_dir);
    const auto grid = spec.scan.grid();
    const auto rows = run_detuning_scan(spec.scenario, grid, spec.scan.t_obs);
    write_scan_csv(dir / "scan.csv", rows);

    double d1 = 0, d3 = 0, d1_rwa = 0;
    for (const auto& r : rows) {
        d1 = std::max(d1, std::abs(r.p1_eff - r.p1_exact));
        d3 = std::max(d3, std::abs(r.p3_eff - r.p3_exact));
        d1_rwa = std::max(d1_rwa, std::abs(r.p1_rwa - r.p1_exact));
    }
    Json j = summary_base(spec, "scan");
    j["scan"] = {{"nu_delta2_min", spec.scan.nu_delta2_min},
                 {"nu_delta2_max", spec.scan.nu_delta2_max},
                 {"points", spec.scan.points},
                 {"t_obs_us", spec.scan.t_obs}};
    j["max_dev_effective"] = {{"P1", d1}, {"P3", d3}};
    j["max_dev_rwa"] = {{"P1", d1_rwa}};
    write_json(dir / "summary.json", j);

    out << "wrote " << rows.size() << " scan points to " << dir.string() << '\n';
    out << "  max |P1_eff - P1_exact| " << format_double(d1) << ", max |P3_eff - P3_exact| " << format_double(d3)
        << '\n';
    return kExitOk;
}

inline int cmd_scaling(const CliOptions& o, std::ostream& out)
{
    const RunSpec spec = resolve(o);
    const auto dir = prepare_out_dir(o.out_dir);
    const auto result = run_omega_scaling(spec.scenario, spec.nu_trap_list);
    write_scaling_csv(dir / "scaling.csv", result.rows);

    Json j = summary_base(spec, "scaling");
    j["nu_trap_list_mhz"] = spec.nu_trap_list;
    Json table = Json::array();
    for (const auto& r : result.rows) table.push_back({{"nu_trap_mhz", r.nu_trap}, {"deviation", r.deviation}});
    j["deviations"] = table;
    j["slope"] = result.slope;
    write_json(dir / "summary.json", j);

    out << "log-log slope of deviation vs trap frequency: " << format_double(result.slope) << '\n';
    return kExitOk;
}

inline int cmd_presets(std::ostream& out)
{
    for (const auto& name : preset_names()) {
        RunSpec spec;
        spec.scenario = preset(name);
        const auto& s = spec.scenario;
        out << name << ": model=" << model_name(s.params) << " initial_state=\"" << s.initial_state
            << "\" t_end_us=" << format_double(s.t_end) << " params_mhz=" << params_to_json(s.params).dump() << '\n';
    }
    return kExitOk;
}

} // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Effective-picture dynamics of trapped Rydberg ions under the trap's quadrupole drive", "quadfold"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CliOptions opts;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--preset", opts.preset, "Preset scenario (fig2, fig3, fig4, fig5a, fig5b)");
        sub->add_option("--config", opts.config_path, "JSON scenario file");
        sub->add_option("--set", opts.overrides, "Override a config leaf, key=value (repeatable)")
            ->allow_extra_args(false);
        sub->add_option("--micromotion-map", opts.micromotion_map, "Map effective states back to the lab frame (true|false)");
        sub->add_option("--sample-dt-ns", opts.sample_dt_ns, "Sampling interval in ns");
        sub->add_option("--rel-tol", opts.rel_tol, "Relative tolerance of the driven integrator");
    };

    CLI::App* heff = app.add_subcommand("heff", "Print engine and closed-form effective Hamiltonians");
    add_common(heff);
    CLI::App* run = app.add_subcommand("run", "Exact vs effective vs RWA trajectories");
    CLI::App* scan = app.add_subcommand("scan", "P1/P3 at fixed time versus Delta2");
    CLI::App* scaling = app.add_subcommand("scaling", "Stroboscopic deviation versus trap frequency");
    for (CLI::App* sub : {run, scan, scaling}) {
        add_common(sub);
        sub->add_option("--out-dir", opts.out_dir, "Output directory")->capture_default_str();
    }
    CLI::App* presets = app.add_subcommand("presets", "List preset scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*presets) return cli_detail::cmd_presets(out);
        if (*heff) return cli_detail::cmd_heff(opts, out);
        if (*run) return cli_detail::cmd_run(opts, out);
        if (*scan) return cli_detail::cmd_scan(opts, out);
        if (*scaling) return cli_detail::cmd_scaling(opts, out);
    } catch (const ConfigError& e) {
        err << "quadfold: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalFailure& e) {
        err << "quadfold: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "quadfold: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "quadfold: " << e.what() << '\n';
        return kExitUnexpected;
    }
    return kExitConfig;
}

} // namespace quadfold
