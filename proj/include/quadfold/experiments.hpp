#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "quadfold/dynamics.hpp"
#include "quadfold/effective.hpp"
#include "quadfold/errors.hpp"
#include "quadfold/models.hpp"

namespace quadfold {

struct ScenarioConfig {
    std::string name = "custom";
    ModelParams params = FourLevelParams{};
    std::string initial_state = "1";
    double t_end = 1.0;      // us
    double sample_dt = 1e-3; // us
    bool micromotion_map = true;
    std::vector<std::string> monitored;
    PropagationSettings propagation;
    std::vector<std::string> assumptions;

    int level_index(std::string_view label) const
    {
        const auto labels = basis_labels(params);
        const auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end())
            throw ConfigError("unknown basis state '" + std::string(label) + "' for model " + model_name(params));
        return static_cast<int>(it - labels.begin());
    }

    void validate() const
    {
        std::visit([](const auto& p) { p.validate(); }, params);
        level_index(initial_state);
        for (const auto& m : monitored) level_index(m);
        if (!(t_end > 0)) throw ConfigError("t_end must be positive");
        if (!(sample_dt > 0)) throw ConfigError("sample_dt must be positive");
        propagation.validate();
    }
};

/// "1" -> "P1", "2_1 3_2" -> "P23".
inline std::string short_name(std::string_view label)
{
    std::string out = "P";
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (label[i] == '_') {
            // skip the ion index and the separator
            while (i < label.size() && label[i] != ' ') ++i;
            continue;
        }
        out += label[i];
    }
    return out;
}

/// CSV column name: "P1" for single-ion levels, "P_2_1_3_2" for two-ion states.
inline std::string column_name(std::string_view label)
{
    if (label.find('_') == std::string_view::npos) return "P" + std::string(label);
    std::string out = "P_";
    for (char c : label) out += c == ' ' ? '_' : c;
    return out;
}

/// Centered one-period moving average of a sampled trace. The window is
/// clipped at the ends of the grid and the trace is treated as piecewise linear.
inline std::vector<double> period_average(std::span<const double> times, std::span<const double> values, double period)
{
    if (times.size() != values.size()) throw std::invalid_argument("period_average: size mismatch");
    const std::size_t n = times.size();
    if (n < 2 || !(period > 0)) return {values.begin(), values.end()};

    std::vector<double> cumulative(n, 0.0);
    for (std::size_t k = 1; k < n; ++k)
        cumulative[k] = cumulative[k - 1] + 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);

    const auto integral_to = [&](double x) {
        auto it = std::upper_bound(times.begin(), times.end(), x);
        if (it == times.begin()) return 0.0;
        std::size_t j = static_cast<std::size_t>(it - times.begin()) - 1;
        if (j >= n - 1) return cumulative[n - 1];
        const double dx = x - times[j];
        const double slope = (values[j + 1] - values[j]) / (times[j + 1] - times[j]);
        return cumulative[j] + dx * (values[j] + 0.5 * slope * dx);
    };

    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = std::max(times.front(), times[k] - 0.5 * period);
        const double b = std::min(times.back(), times[k] + 0.5 * period);
        out[k] = b > a ? (integral_to(b) - integral_to(a)) / (b - a) : values[k];
    }
    return out;
}

inline double max_abs_deviation(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_deviation: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct MonitoredDeviation {
    std::string label;
    std::string name;       // short name, e.g. P23
    bool drive_coupled;     // the state has support in v; gates use the period-averaged metric
    double dev_effective;   // max_t |P_eff - P_exact|
    double dev_rwa;         // max_t |P_rwa - P_exact|
    double dev_effective_avg;
    double dev_rwa_avg;

    /// The metric acceptance gates use for this state.
    double gated_effective() const { return drive_coupled ? dev_effective_avg : dev_effective; }
};

struct ComparisonResult {
    Trajectory exact;
    Trajectory effective;
    Trajectory rwa;
    std::vector<MonitoredDeviation> deviations;
    std::vector<std::string> assumptions;

    const MonitoredDeviation& deviation(std::string_view label) const
    {
        for (const auto& d : deviations)
            if (d.label == label || d.name == label) return d;
        throw std::out_of_range("no monitored state '" + std::string(label) + "'");
    }
};

namespace detail {

inline bool drive_coupled(const Operator& v, int level)
{
    return v.matrix().row(level).cwiseAbs().maxCoeff() > 0.0;
}

inline Trajectory effective_trajectory(const HarmonicSystem& sys, const EffectivePicture& pic, const StateVector& psi0,
                                       std::span<const double> times, bool micromotion_map)
{
    if (!micromotion_map) return propagate_static(pic.h_eff, psi0, times);

    const StateVector start = map_frame(pic, psi0, 0.0, FrameDirection::LabToEffective);
    Trajectory traj = propagate_static(pic.h_eff, start, times, true);
    traj.max_norm_drift = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const StateVector lab = map_frame(pic, traj.states[k], traj.times[k], FrameDirection::EffectiveToLab);
        traj.populations[k] = lab.populations();
        traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(1.0 - lab.norm_squared()));
    }
    traj.states.clear();
    traj.labels = sys.h0().labels();
    return traj;
}

} // namespace detail

inline ComparisonResult run_comparison(const ScenarioConfig& cfg, std::span<const double> times)
{
    cfg.validate();
    const HarmonicSystem sys = build_system(cfg.params);
    const int start = cfg.level_index(cfg.initial_state);
    const StateVector psi0 = StateVector::basis(start + 1, sys.dim());

    PropagationSettings settings = cfg.propagation;
    settings.sample_dt = cfg.sample_dt;

    ComparisonResult out;
    out.exact = propagate_driven(sys, std::nullopt, psi0, times, settings);
    const EffectivePicture pic = effective_picture(sys);
    out.effective = detail::effective_trajectory(sys, pic, psi0, times, cfg.micromotion_map);
    out.rwa = rwa_baseline(sys, std::nullopt, psi0, times);
    out.assumptions = cfg.assumptions;

    for (const auto& label : cfg.monitored) {
        const int idx = cfg.level_index(label);
        const auto ex = out.exact.trace(idx);
        const auto ef = out.effective.trace(idx);
        const auto rw = out.rwa.trace(idx);
        const double period = sys.period();
        const auto ex_avg = period_average(out.exact.times, ex, period);
        out.deviations.push_back({
            label,
            short_name(label),
            detail::drive_coupled(sys.v(), idx),
            max_abs_deviation(ex, ef),
            max_abs_deviation(ex, rw),
            max_abs_deviation(ex_avg, period_average(out.exact.times, ef, period)),
            max_abs_deviation(ex_avg, period_average(out.exact.times, rw, period)),
        });
    }
    return out;
}

inline ComparisonResult run_comparison(const ScenarioConfig& cfg)
{
    const auto grid = uniform_grid(cfg.t_end, cfg.sample_dt);
    return run_comparison(cfg, grid);
}

// ---------------------------------------------------------------------------
// Presets

inline std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5a", "fig5b"}; }

inline ScenarioConfig preset(std::string_view name)
{
    ScenarioConfig cfg;
    cfg.name = std::string(name);
    cfg.micromotion_map = true;
    cfg.sample_dt = 1e-3;

    FourLevelParams fig2;
    fig2.nu_quad = 12;
    fig2.nu_trap = 20;
    fig2.nu_omega1 = 2;
    fig2.nu_omega2 = 2;
    fig2.nu_delta2 = 2;
    fig2.nu_delta3 = 2;
    fig2.nu_delta4 = 1;

    if (name == "fig2" || name == "fig3") {
        cfg.params = fig2;
        cfg.initial_state = "1";
        cfg.monitored = {"1", "3"};
        cfg.assumptions.push_back("initial state |1>");
        if (name == "fig2") {
            cfg.t_end = 1.0;
        } else {
            cfg.t_end = 0.5; // observation time of the scan
            cfg.assumptions.push_back("detuning scan over nu_delta2 only, default [-10, 10] MHz with 201 points");
        }
        return cfg;
    }
    if (name == "fig4") {
        FiveLevelParams p;
        p.base.nu_quad = 12;
        p.base.nu_trap = 20;
        p.base.nu_omega1 = 0;
        p.base.nu_omega2 = 2;
        p.nu_quad_bar = 4;
        p.nu_delta5 = 0;
        cfg.params = p;
        cfg.initial_state = "2";
        cfg.monitored = {"3"};
        cfg.t_end = 1.0;
        cfg.assumptions.push_back("nu_delta5 = 0");
        cfg.assumptions.push_back("run length 1 us");
        return cfg;
    }
    if (name == "fig5a" || name == "fig5b") {
        TwoIonParams p;
        p.base.nu_quad = 8;
        p.base.nu_trap = 30;
        p.base.nu_delta2 = 1;
        p.base.nu_omega2 = 2;
        p.base.nu_omega1 = 0;
        p.base.nu_delta3 = 0;
        p.base.nu_delta4 = 0;
        p.nu_lambda = 7;
        cfg.params = p;
        cfg.assumptions.push_back("nu_omega1 = 0, nu_delta3 = 0, nu_delta4 = 0");
        cfg.assumptions.push_back("closed-form two-ion H_eff uses Delta3' = Delta3");
        if (name == "fig5a") {
            cfg.initial_state = two_ion_label(2, 3);
            cfg.monitored = {two_ion_label(2, 3), two_ion_label(3, 2)};
            cfg.t_end = 0.5;
        } else {
            cfg.initial_state = two_ion_label(3, 4);
            cfg.monitored = {two_ion_label(3, 4), two_ion_label(4, 3)};
            cfg.t_end = 2.2;
        }
        return cfg;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: fig2, fig3, fig4, fig5a, fig5b)");
}

// ---------------------------------------------------------------------------
// Scans

/// Runs body(i) for i in [0, n) on up to hardware_concurrency threads.
/// The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body body)
{
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::vector<double> linspace(double lo, double hi, int points)
{
    if (points < 1) throw std::invalid_argument("linspace: need at least one point");
    if (points == 1) return {lo};
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    return out;
}

inline std::vector<double> default_detuning_grid() { return linspace(-10.0, 10.0, 201); }

struct ScanRow {
    double nu_delta2;
    double p1_exact, p1_eff, p1_rwa;
    double p3_exact, p3_eff;
};

/// P1 and P3 at t_obs versus Delta2 (single-ion models only). Rows follow the grid order.
inline std::vector<ScanRow> run_detuning_scan(const ScenarioConfig& cfg, std::span<const double> nu_delta2_grid,
                                              double t_obs)
{
    if (nu_delta2_grid.empty()) throw ConfigError("detuning scan grid is empty");
    if (std::holds_alternative<TwoIonParams>(cfg.params)) throw ConfigError("detuning scan needs a single-ion model");
    if (!(t_obs > 0)) throw ConfigError("t_obs must be positive");

    std::vector<ScanRow> rows(nu_delta2_grid.size());
    const std::vector<double> times{0.0, t_obs};
    parallel_for(rows.size(), [&](std::size_t i) {
        ScenarioConfig point = cfg;
        base_params(point.params).nu_delta2 = nu_delta2_grid[i];
        point.monitored.clear();
        const auto r = run_comparison(point, times);
        const auto& ex = r.exact.populations.back();
        const auto& ef = r.effective.populations.back();
        const auto& rw = r.rwa.populations.back();
        rows[i] = {nu_delta2_grid[i], ex[0], ef[0], rw[0], ex[2], ef[2]};
    });
    return rows;
}

struct ScalingRow {
    double nu_trap;
    double deviation;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    double slope; // least-squares d log D / d log w
};

/// Stroboscopic times n T in [0, t_end]; the sin(w t) part of K vanishes there.
inline std::vector<double> stroboscopic_grid(double t_end, double period)
{
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor(t_end / period + 1e-9));
    for (long long k = 0; k <= n; ++k) out.push_back(static_cast<double>(k) * period);
    return out;
}

inline double loglog_slope(std::span<const ScalingRow> rows)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        const double x = std::log(r.nu_trap), y = std::log(r.deviation);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline ScalingResult run_omega_scaling(const ScenarioConfig& base, std::span<const double> nu_trap_list)
{
    if (nu_trap_list.size() < 4) throw ConfigError("omega scaling needs at least 4 trap frequencies");
    if (!std::is_sorted(nu_trap_list.begin(), nu_trap_list.end()) ||
        std::adjacent_find(nu_trap_list.begin(), nu_trap_list.end()) != nu_trap_list.end())
        throw ConfigError("trap frequencies must be strictly ascending");
    if (!base.micromotion_map) throw ConfigError("omega scaling requires micromotion_map = true");
    if (base.monitored.empty()) throw ConfigError("omega scaling needs monitored states");

    ScalingResult out;
    out.rows.resize(nu_trap_list.size());
    parallel_for(nu_trap_list.size(), [&](std::size_t i) {
        ScenarioConfig point = base;
        base_params(point.params).nu_trap = nu_trap_list[i];
        const double period = 1.0 / nu_trap_list[i]; // us, since nu is in MHz
        const auto times = stroboscopic_grid(point.t_end, period);
        const auto r = run_comparison(point, times);
        double d = 0.0;
        for (const auto& m : r.deviations) d = std::max(d, m.dev_effective);
        out.rows[i] = {nu_trap_list[i], d};
    });
    out.slope = loglog_slope(out.rows);
    return out;
}

} // namespace quadfold
