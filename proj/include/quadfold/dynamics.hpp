#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadfold/effective.hpp"
#include "quadfold/hilbert.hpp"

namespace quadfold {

/// Norm drift |1 - <psi|psi>| above this aborts a propagation.
inline constexpr double kNormFailure = 1e-6;

struct PropagationSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step_fraction = 1.0 / 40.0; // of the drive period
    double sample_dt = 1e-3;               // us

    void validate() const
    {
        if (!(rel_tol > 0) || !(abs_tol > 0) || !(max_step_fraction > 0) || !(sample_dt > 0))
            throw std::invalid_argument("PropagationSettings: all values must be positive");
        if (max_step_fraction > 0.1) throw std::invalid_argument("PropagationSettings: max_step_fraction must be <= 1/10");
    }
};

struct Trajectory {
    std::vector<double> times;                   // us, ascending
    std::vector<std::vector<double>> populations; // [sample][level]
    std::vector<StateVector> states;             // empty unless requested
    std::vector<std::string> labels;
    double max_norm_drift = 0.0;

    std::size_t size() const { return times.size(); }
    int dim() const { return populations.empty() ? 0 : static_cast<int>(populations.front().size()); }

    /// Population trace of one level, 0-based.
    std::vector<double> trace(int level) const
    {
        std::vector<double> out;
        out.reserve(populations.size());
        for (const auto& p : populations) out.push_back(p.at(level));
        return out;
    }
};

struct StepperStats {
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
    std::int64_t rhs_evals = 0;
};

/// Adaptive Dormand-Prince 5(4) pair with FSAL, propagating the 5th-order
/// solution. `Rhs` is callable as rhs(double t, const Vector& y, Vector& dydt).
/// Integrates in either time direction; |h| never exceeds max_step.
template <class Rhs>
class DormandPrince54 {
public:
    DormandPrince54(Rhs rhs, double rel_tol, double abs_tol, double max_step)
        : rhs_(std::move(rhs)), rtol_(rel_tol), atol_(abs_tol), max_step_(max_step)
    {
        if (!(rel_tol > 0) || !(abs_tol > 0) || !(max_step > 0))
            throw std::invalid_argument("DormandPrince54: tolerances and step cap must be positive");
    }

    void advance(Vector& y, double& t, double t_target)
    {
        if (t_target == t) return;
        const double dir = t_target > t ? 1.0 : -1.0;
        const auto n = y.size();
        if (k1_.size() != n || !fsal_valid_ || fsal_t_ != t || fsal_y_ != y) {
            k1_.resize(n);
            rhs_(t, y, k1_);
            ++stats_.rhs_evals;
            fsal_valid_ = true;
            fsal_t_ = t;
            fsal_y_ = y;
        }
        if (h_ == 0.0) h_ = initial_step(y);

        while (dir * (t_target - t) > 0) {
            const double remaining = std::abs(t_target - t);
            double h = std::min({h_, max_step_, remaining});
            const bool clipped = h < h_ && h == remaining;

            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw NumericalFailure("DormandPrince54: step size underflow at t = " + std::to_string(t));

            const double err = attempt(y, t, dir * h);
            if (err <= 1.0) {
                t = (h == remaining) ? t_target : t + dir * h;
                y = y_new_;
                k1_.swap(k7_);
                fsal_t_ = t;
                fsal_y_ = y;
                ++stats_.accepted;
                double fac = err == 0.0 ? kMaxGrow : kSafety * std::pow(err, -0.2);
                fac = std::clamp(fac, kMinShrink, last_rejected_ ? 1.0 : kMaxGrow);
                // Landing on a sample time must not shrink the natural step.
                if (!clipped) h_ = std::min(h * fac, max_step_);
                last_rejected_ = false;
            } else {
                ++stats_.rejected;
                h_ = h * std::max(kMinShrink, kSafety * std::pow(err, -0.2));
                last_rejected_ = true;
            }
        }
    }

    const StepperStats& stats() const { return stats_; }

private:
    static constexpr double kSafety = 0.9;
    static constexpr double kMinShrink = 0.2;
    static constexpr double kMaxGrow = 5.0;

    double initial_step(const Vector& y) const
    {
        double d0 = 0, d1 = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = atol_ + rtol_ * std::abs(y(i));
            d0 += std::norm(y(i)) / (sc * sc);
            d1 += std::norm(k1_(i)) / (sc * sc);
        }
        const double h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * std::sqrt(d0 / d1);
        return std::min(h, max_step_);
    }

    // One trial step of signed size h from (t, y). Leaves the candidate in
    // y_new_ and f(t + h, y_new_) in k7_; returns the scaled error norm.
    double attempt(const Vector& y, double t, double h)
    {
        constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        constexpr double a21 = 1.0 / 5;
        constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                         a65 = -5103.0 / 18656;
        constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        // b - b*, where b* are the 4th-order weights
        constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                         e6 = 22.0 / 525, e7 = -1.0 / 40;

        const auto n = y.size();
        k2_.resize(n), k3_.resize(n), k4_.resize(n), k5_.resize(n), k6_.resize(n), k7_.resize(n);

        tmp_ = y + h * (a21 * k1_);
        rhs_(t + c2 * h, tmp_, k2_);
        tmp_ = y + h * (a31 * k1_ + a32 * k2_);
        rhs_(t + c3 * h, tmp_, k3_);
        tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
        rhs_(t + c4 * h, tmp_, k4_);
        tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
        rhs_(t + c5 * h, tmp_, k5_);
        tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
        rhs_(t + h, tmp_, k6_);
        y_new_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
        rhs_(t + h, y_new_, k7_);
        stats_.rhs_evals += 6;

        tmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
        double acc = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = atol_ + rtol_ * std::max(std::abs(y(i)), std::abs(y_new_(i)));
            acc += std::norm(tmp_(i)) / (sc * sc);
        }
        return std::sqrt(acc / static_cast<double>(n));
    }

    Rhs rhs_;
    double rtol_, atol_, max_step_;
    double h_ = 0.0;
    bool last_rejected_ = false;
    bool fsal_valid_ = false;
    double fsal_t_ = 0.0;
    Vector fsal_y_, k1_, k2_, k3_, k4_, k5_, k6_, k7_, y_new_, tmp_;
    StepperStats stats_;
};

/// Right-hand side of i d/dt psi = [H0 + extra + 2 v cos(w t)] psi.
struct DrivenRhs {
    Matrix static_part; // -i (H0 + extra)
    Matrix drive_part;  // -2 i v
    double omega;

    DrivenRhs(const HarmonicSystem& sys, const std::optional<Operator>& extra_static)
        : static_part(Complex(0, -1) * sys.h0().matrix()), drive_part(Complex(0, -2) * sys.v().matrix()),
          omega(sys.omega())
    {
        if (extra_static) {
            if (extra_static->dim() != sys.dim()) throw std::invalid_argument("extra_static: dimension mismatch");
            if (!extra_static->is_hermitian()) throw ContractViolation("extra_static: operator is not Hermitian");
            static_part += Complex(0, -1) * extra_static->matrix();
        }
    }

    void operator()(double t, const Vector& y, Vector& dydt) const
    {
        dydt.noalias() = static_part * y;
        dydt.noalias() += std::cos(omega * t) * (drive_part * y);
    }
};

/// 0, dt, 2 dt, ... up to t_end. t_end is always the last point.
inline std::vector<double> uniform_grid(double t_end, double dt)
{
    if (!(t_end >= 0) || !(dt > 0)) throw std::invalid_argument("uniform_grid: need t_end >= 0 and dt > 0");
    std::vector<double> grid;
    const double ratio = t_end / dt;
    const auto n = static_cast<long long>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(n)) <= 1e-9 * std::max(1.0, ratio)) {
        grid.reserve(n + 1);
        for (long long k = 0; k <= n; ++k) grid.push_back(n == 0 ? 0.0 : t_end * static_cast<double>(k) / n);
    } else {
        const auto m = static_cast<long long>(std::floor(ratio));
        for (long long k = 0; k <= m; ++k) grid.push_back(static_cast<double>(k) * dt);
        grid.push_back(t_end);
    }
    return grid;
}

namespace detail {

inline void check_grid(std::span<const double> times)
{
    if (times.empty()) throw std::invalid_argument("time grid is empty");
    if (times.front() < 0) throw std::invalid_argument("time grid must start at t >= 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("time grid must be strictly ascending");
}

inline void record(Trajectory& traj, double t, const Vector& y, bool keep_states)
{
    traj.times.push_back(t);
    std::vector<double> p(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) p[i] = std::norm(y(i));
    traj.populations.push_back(std::move(p));
    traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(1.0 - y.squaredNorm()));
    if (keep_states) traj.states.push_back(StateVector::from_evolved(y));
}

} // namespace detail

/// Exact driven evolution sampled at `times` (the initial state is taken at t = 0).
inline Trajectory propagate_driven(const HarmonicSystem& sys, const std::optional<Operator>& extra_static,
                                   const StateVector& psi0, std::span<const double> times,
                                   const PropagationSettings& settings, bool keep_states = false,
                                   StepperStats* stats = nullptr)
{
    settings.validate();
    detail::check_grid(times);
    if (psi0.dim() != sys.dim()) throw std::invalid_argument("propagate_driven: psi0 dimension mismatch");

    DormandPrince54<DrivenRhs> stepper(DrivenRhs(sys, extra_static), settings.rel_tol, settings.abs_tol,
                                       settings.max_step_fraction * sys.period());
    Trajectory traj;
    traj.labels = sys.h0().labels();
    Vector y = psi0.amplitudes();
    double t = 0.0;
    for (double target : times) {
        stepper.advance(y, t, target);
        const double drift = std::abs(1.0 - y.squaredNorm());
        if (drift > kNormFailure)
            throw NumericalFailure("propagate_driven: norm drift " + std::to_string(drift) + " at t = " +
                                   std::to_string(t) + " us");
        detail::record(traj, t, y, keep_states);
    }
    if (stats) *stats = stepper.stats();
    return traj;
}

inline Trajectory propagate_driven(const HarmonicSystem& sys, const std::optional<Operator>& extra_static,
                                   const StateVector& psi0, double t_end, const PropagationSettings& settings,
                                   bool keep_states = false)
{
    const auto grid = uniform_grid(t_end, settings.sample_dt);
    return propagate_driven(sys, extra_static, psi0, grid, settings, keep_states);
}

/// Evolution under a static Hermitian h, psi(t) = sum_k exp(-i E_k t) <k|psi0> |k>.
inline Trajectory propagate_static(const Operator& h, const StateVector& psi0, std::span<const double> times,
                                   bool keep_states = false)
{
    detail::check_grid(times);
    if (psi0.dim() != h.dim()) throw std::invalid_argument("propagate_static: psi0 dimension mismatch");
    const auto eig = hermitian_eigen(h);
    const Vector c0 = eig.vectors.adjoint() * psi0.amplitudes();

    Trajectory traj;
    traj.labels = h.labels();
    Vector c(c0.size());
    for (double t : times) {
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = std::polar(1.0, -eig.values(k) * t) * c0(k);
        detail::record(traj, t, eig.vectors * c, keep_states);
    }
    return traj;
}

/// Rotating-wave baseline: the oscillating quadrupole term is dropped, leaving H0 (+ extra).
inline Trajectory rwa_baseline(const HarmonicSystem& sys, const std::optional<Operator>& extra_static,
                               const StateVector& psi0, std::span<const double> times, bool keep_states = false)
{
    Operator h = sys.h0();
    if (extra_static) h += *extra_static;
    return propagate_static(h, psi0, times, keep_states);
}

} // namespace quadfold
