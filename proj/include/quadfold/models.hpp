#pragma once

// Concrete level schemes of a trapped Rydberg ion under the trap's quadrupole
// drive, plus their closed-form effective Hamiltonians.
//
// Parameters are ordinary frequencies in MHz (the value of X/2pi); builders
// convert once to angular units (rad/us). Levels:
//   |1> ground, |2> Rydberg nD, |3> Rydberg n'P, |4> quadrupole partner of |2>,
//   |5> quadrupole partner of |3> (five-level scheme only).

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "quadfold/effective.hpp"
#include "quadfold/hilbert.hpp"

namespace quadfold {

inline double to_angular(double nu_mhz) { return kTwoPi * nu_mhz; }
inline double to_nu(double angular) { return angular / kTwoPi; }

struct FourLevelParams {
    double nu_omega1 = 0; // Rabi |1>-|2>
    double nu_omega2 = 0; // Rabi |2>-|3>
    double nu_delta2 = 0;
    double nu_delta3 = 0;
    double nu_delta4 = 0;
    double nu_quad = 0; // quadrupole Rabi frequency |2>-|4>
    double nu_trap = 1; // trap radio frequency

    void validate() const
    {
        for (double x : {nu_omega1, nu_omega2, nu_delta2, nu_delta3, nu_delta4, nu_quad, nu_trap})
            if (!std::isfinite(x)) throw std::invalid_argument("model parameters must be finite");
        if (!(nu_trap > 0)) throw std::invalid_argument("nu_trap must be positive");
    }
};

struct FiveLevelParams {
    FourLevelParams base;
    double nu_delta5 = 0;
    double nu_quad_bar = 0; // quadrupole Rabi frequency |3>-|5>

    void validate() const
    {
        base.validate();
        if (!std::isfinite(nu_delta5) || !std::isfinite(nu_quad_bar))
            throw std::invalid_argument("model parameters must be finite");
    }
};

struct TwoIonParams {
    FourLevelParams base; // shared by both ions
    double nu_lambda = 0; // dipole-dipole exchange |2_1 3_2> <-> |3_1 2_2>

    void validate() const
    {
        base.validate();
        if (!std::isfinite(nu_lambda)) throw std::invalid_argument("model parameters must be finite");
    }
};

using ModelParams = std::variant<FourLevelParams, FiveLevelParams, TwoIonParams>;

// ---------------------------------------------------------------------------
// Basis

inline std::vector<std::string> single_ion_labels(int dim)
{
    std::vector<std::string> out;
    for (int i = 1; i <= dim; ++i) out.push_back(std::to_string(i));
    return out;
}

/// 1-based composite index of |i1 (ion 1), i2 (ion 2)>.
inline int two_ion_index(int level1, int level2)
{
    if (level1 < 1 || level1 > 4 || level2 < 1 || level2 > 4)
        throw std::invalid_argument("two_ion_index: level out of range");
    return 4 * (level1 - 1) + (level2 - 1) + 1;
}

/// "2_1 3_2" is ion 1 in |2>, ion 2 in |3>.
inline std::string two_ion_label(int level1, int level2)
{
    return std::to_string(level1) + "_1 " + std::to_string(level2) + "_2";
}

inline std::vector<std::string> two_ion_labels()
{
    std::vector<std::string> out;
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b) out.push_back(two_ion_label(a, b));
    return out;
}

// ---------------------------------------------------------------------------
// Builders

namespace detail {

inline Operator hc_pair(int i, int j, int dim) { return ketbra(i, j, dim) + ketbra(j, i, dim); }

// Static single-ion part in angular units, embedded in `dim` levels.
inline Operator single_ion_h0(const FourLevelParams& p, int dim)
{
    return to_angular(p.nu_delta2) * ketbra(2, 2, dim) + to_angular(p.nu_delta3) * ketbra(3, 3, dim) +
           to_angular(p.nu_delta4) * ketbra(4, 4, dim) + to_angular(p.nu_omega1) * hc_pair(1, 2, dim) +
           to_angular(p.nu_omega2) * hc_pair(2, 3, dim);
}

inline Operator lift_ion1(const Operator& a) { return tensor_product(a, Operator::identity(4)); }
inline Operator lift_ion2(const Operator& a) { return tensor_product(Operator::identity(4), a); }

inline Operator two_ion_pair(int a1, int a2, int b1, int b2)
{
    const int i = two_ion_index(a1, a2);
    const int j = two_ion_index(b1, b2);
    return ketbra(i, j, 16) + ketbra(j, i, 16);
}

} // namespace detail

inline HarmonicSystem build_four_level(const FourLevelParams& p)
{
    p.validate();
    auto labels = single_ion_labels(4);
    Operator h0 = detail::single_ion_h0(p, 4).with_labels(labels);
    Operator v = (0.5 * to_angular(p.nu_quad) * detail::hc_pair(2, 4, 4)).with_labels(labels);
    return HarmonicSystem(std::move(h0), std::move(v), to_angular(p.nu_trap));
}

inline HarmonicSystem build_five_level(const FiveLevelParams& p)
{
    p.validate();
    auto labels = single_ion_labels(5);
    Operator h0 = (detail::single_ion_h0(p.base, 5) + to_angular(p.nu_delta5) * ketbra(5, 5, 5)).with_labels(labels);
    Operator v = (0.5 * to_angular(p.base.nu_quad) * detail::hc_pair(2, 4, 5) +
                  0.5 * to_angular(p.nu_quad_bar) * detail::hc_pair(3, 5, 5))
                     .with_labels(labels);
    return HarmonicSystem(std::move(h0), std::move(v), to_angular(p.base.nu_trap));
}

/// Exchange term lambda (|2_1 3_2><3_1 2_2| + H.c.), angular units.
inline Operator dipole_dipole(double nu_lambda) { return to_angular(nu_lambda) * detail::two_ion_pair(2, 3, 3, 2); }

/// The exchange term is folded into the static part.
inline HarmonicSystem build_two_ion(const TwoIonParams& p)
{
    p.validate();
    const Operator h1 = detail::single_ion_h0(p.base, 4);
    const Operator v1 = 0.5 * to_angular(p.base.nu_quad) * detail::hc_pair(2, 4, 4);
    auto labels = two_ion_labels();
    Operator h0 = (detail::lift_ion1(h1) + detail::lift_ion2(h1) + dipole_dipole(p.nu_lambda)).with_labels(labels);
    Operator v = (detail::lift_ion1(v1) + detail::lift_ion2(v1)).with_labels(labels);
    return HarmonicSystem(std::move(h0), std::move(v), to_angular(p.base.nu_trap));
}

// ---------------------------------------------------------------------------
// Closed-form effective parameters (MHz) and Hamiltonians

struct FourLevelEffective {
    double rabi_scale;   // 1 - W^2/(4 w^2)
    double nu_delta2;    // D2 - (W^2/2w^2)(D2 - D4)
    double nu_delta3;    // unchanged
    double nu_delta4;    // D4 + (W^2/2w^2)(D2 - D4)
    double nu_omega1;
    double nu_omega2;
};

/// Detuning shifts use the subtractive form, which stays finite at D2 = 0 or D4 = 0.
inline FourLevelEffective four_level_effective(const FourLevelParams& p)
{
    p.validate();
    const double r = (p.nu_quad * p.nu_quad) / (p.nu_trap * p.nu_trap);
    const double scale = 1.0 - r / 4.0;
    const double shift = 0.5 * r * (p.nu_delta2 - p.nu_delta4);
    return {scale, p.nu_delta2 - shift, p.nu_delta3, p.nu_delta4 + shift, scale * p.nu_omega1, scale * p.nu_omega2};
}

struct FiveLevelEffective {
    // ladder {1,2,3}
    double nu_omega1;
    double nu_omega2;
    double nu_delta2;
    double nu_delta3;
    // ladder {4,5}
    double nu_delta4;
    double nu_delta5;
    double nu_omega3; // W Wbar W2 / (2 w^2), via |4>-|2>-|3>-|5>
};

inline FiveLevelEffective five_level_effective(const FiveLevelParams& p)
{
    p.validate();
    const auto& b = p.base;
    const double w2 = b.nu_trap * b.nu_trap;
    const double r = b.nu_quad * b.nu_quad / w2;
    const double rb = p.nu_quad_bar * p.nu_quad_bar / w2;
    const double shift24 = 0.5 * r * (b.nu_delta2 - b.nu_delta4);
    const double shift35 = 0.5 * rb * (b.nu_delta3 - p.nu_delta5);
    return {
        b.nu_omega1 * (1.0 - r / 4.0),
        b.nu_omega2 * (1.0 - r / 4.0 - rb / 4.0),
        b.nu_delta2 - shift24,
        b.nu_delta3 - shift35,
        b.nu_delta4 + shift24,
        p.nu_delta5 + shift35,
        b.nu_quad * p.nu_quad_bar * b.nu_omega2 / (2.0 * w2),
    };
}

struct TwoIonEffective {
    FourLevelEffective single; // per ion; nu_delta3 stays at D3
    double nu_lambda;          // lambda (1 - W^2/(2 w^2))
    double nu_residual;        // lambda W^2 / (2 w^2) on |3_1 4_2> <-> |4_1 3_2>
};

inline TwoIonEffective two_ion_effective(const TwoIonParams& p)
{
    p.validate();
    const double r = (p.base.nu_quad * p.base.nu_quad) / (p.base.nu_trap * p.base.nu_trap);
    return {four_level_effective(p.base), p.nu_lambda * (1.0 - r / 2.0), p.nu_lambda * r / 2.0};
}

namespace detail {

inline Operator four_level_closed(const FourLevelEffective& e, int dim)
{
    return to_angular(e.nu_delta2) * ketbra(2, 2, dim) + to_angular(e.nu_delta3) * ketbra(3, 3, dim) +
           to_angular(e.nu_delta4) * ketbra(4, 4, dim) + to_angular(e.nu_omega1) * hc_pair(1, 2, dim) +
           to_angular(e.nu_omega2) * hc_pair(2, 3, dim);
}

} // namespace detail

inline Operator closed_heff_four_level(const FourLevelParams& p)
{
    return detail::four_level_closed(four_level_effective(p), 4).with_labels(single_ion_labels(4));
}

/// Block form H1 (+) H2: the {4,5} ladder and the {1,2,3} ladder, no cross terms.
inline Operator closed_heff_five_level(const FiveLevelParams& p)
{
    using detail::hc_pair;
    const auto e = five_level_effective(p);
    const Operator ladder45 = to_angular(e.nu_delta4) * ketbra(4, 4, 5) + to_angular(e.nu_delta5) * ketbra(5, 5, 5) +
                              to_angular(e.nu_omega3) * hc_pair(4, 5, 5);
    const Operator ladder123 = to_angular(e.nu_delta2) * ketbra(2, 2, 5) + to_angular(e.nu_delta3) * ketbra(3, 3, 5) +
                               to_angular(e.nu_omega1) * hc_pair(1, 2, 5) + to_angular(e.nu_omega2) * hc_pair(2, 3, 5);
    return (ladder45 + ladder123).with_labels(single_ion_labels(5));
}

inline Operator closed_heff_two_ion(const TwoIonParams& p)
{
    const auto e = two_ion_effective(p);
    const Operator single = detail::four_level_closed(e.single, 4);
    return (detail::lift_ion1(single) + detail::lift_ion2(single) +
            to_angular(e.nu_lambda) * detail::two_ion_pair(2, 3, 3, 2) +
            to_angular(e.nu_residual) * detail::two_ion_pair(3, 4, 4, 3))
        .with_labels(two_ion_labels());
}

// ---------------------------------------------------------------------------
// Variant dispatch

inline HarmonicSystem build_system(const ModelParams& p)
{
    return std::visit(
        [](const auto& q) -> HarmonicSystem {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, FourLevelParams>) return build_four_level(q);
            else if constexpr (std::is_same_v<T, FiveLevelParams>) return build_five_level(q);
            else return build_two_ion(q);
        },
        p);
}

inline Operator closed_heff(const ModelParams& p)
{
    return std::visit(
        [](const auto& q) -> Operator {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, FourLevelParams>) return closed_heff_four_level(q);
            else if constexpr (std::is_same_v<T, FiveLevelParams>) return closed_heff_five_level(q);
            else return closed_heff_two_ion(q);
        },
        p);
}

inline const FourLevelParams& base_params(const ModelParams& p)
{
    return std::visit(
        [](const auto& q) -> const FourLevelParams& {
            if constexpr (std::is_same_v<std::decay_t<decltype(q)>, FourLevelParams>) return q;
            else return q.base;
        },
        p);
}

inline FourLevelParams& base_params(ModelParams& p)
{
    return std::visit(
        [](auto& q) -> FourLevelParams& {
            if constexpr (std::is_same_v<std::decay_t<decltype(q)>, FourLevelParams>) return q;
            else return q.base;
        },
        p);
}

inline std::string model_name(const ModelParams& p)
{
    switch (p.index()) {
    case 0: return "four_level";
    case 1: return "five_level";
    default: return "two_ion";
    }
}

inline std::vector<std::string> basis_labels(const ModelParams& p)
{
    switch (p.index()) {
    case 0: return single_ion_labels(4);
    case 1: return single_ion_labels(5);
    default: return two_ion_labels();
    }
}

} // namespace quadfold
