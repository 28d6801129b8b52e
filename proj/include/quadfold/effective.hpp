#pragma once

// Effective (micromotion-free) picture of a harmonically driven Hamiltonian
//
//     H(t) = H0 + v e^{i w t} + v^dagger e^{-i w t}      (v Hermitian: H0 + 2 v cos(w t))
//
// The frame |psi~> = exp(i K(t)) |psi> with
//
//     K(t) = (2 v / w) sin(w t) - (2 i [v, H0] / w^2) cos(w t)
//
// removes the drive up to O(w^-4) and leaves the static Hamiltonian
//
//     H_eff = H0 + [[v, H0], v] / w^2.
//
// All operators are in angular units (rad/us); w in rad/us; t in us.

#include <cmath>
#include <stdexcept>
#include <string>

#include "quadfold/hilbert.hpp"

namespace quadfold {

class HarmonicSystem {
public:
    HarmonicSystem(Operator h0, Operator v, double omega) : h0_(std::move(h0)), v_(std::move(v)), omega_(omega)
    {
        if (h0_.dim() != v_.dim()) throw std::invalid_argument("HarmonicSystem: h0 and v dimensions differ");
        if (!(omega_ > 0.0) || !std::isfinite(omega_))
            throw std::invalid_argument("HarmonicSystem: drive frequency must be positive and finite");
        if (!h0_.is_hermitian())
            throw ContractViolation("HarmonicSystem: h0 is not Hermitian (max|h - h^dagger| = " +
                                    std::to_string(h0_.hermiticity_error()) + ")");
        // Only the Hermitian-v form of the micromotion generator is implemented.
        if (!v_.is_hermitian())
            throw ContractViolation("HarmonicSystem: harmonic amplitude v must be Hermitian (max|v - v^dagger| = " +
                                    std::to_string(v_.hermiticity_error()) + ")");
    }

    const Operator& h0() const { return h0_; }
    const Operator& v() const { return v_; }
    double omega() const { return omega_; }
    int dim() const { return h0_.dim(); }
    double period() const { return kTwoPi / omega_; }

    /// H(t) = h0 + 2 v cos(w t).
    Operator at(double t) const { return h0_ + v_ * Complex(2.0 * std::cos(omega_ * t)); }

    HarmonicSystem with_omega(double omega) const { return HarmonicSystem(h0_, v_, omega); }

private:
    Operator h0_;
    Operator v_;
    double omega_;
};

struct EffectivePicture {
    Operator h_eff;
    Operator k1_amp; // coefficient of sin(w t) in K(t): 2 v / w
    Operator k2_amp; // coefficient of cos(w t) in K(t): -2 i [v, H0] / w^2
    double omega;

    Operator generator(double t) const
    {
        return k1_amp * Complex(std::sin(omega * t)) + k2_amp * Complex(std::cos(omega * t));
    }
};

inline Operator effective_hamiltonian(const HarmonicSystem& sys)
{
    const Operator& h0 = sys.h0();
    const Operator& v = sys.v();
    const double inv_w2 = 1.0 / (sys.omega() * sys.omega());
    return h0 + commutator(commutator(v, h0), v) * Complex(inv_w2);
}

inline EffectivePicture effective_picture(const HarmonicSystem& sys)
{
    const double w = sys.omega();
    return EffectivePicture{
        effective_hamiltonian(sys),
        sys.v() * Complex(2.0 / w),
        commutator(sys.v(), sys.h0()) * Complex(0.0, -2.0 / (w * w)),
        w,
    };
}

inline Operator micromotion_generator(const HarmonicSystem& sys, double t)
{
    return effective_picture(sys).generator(t);
}

enum class FrameDirection { LabToEffective, EffectiveToLab };

/// Applies exp(+i K(t)) (lab -> effective) or exp(-i K(t)) (effective -> lab).
inline StateVector map_frame(const EffectivePicture& pic, const StateVector& psi, double t, FrameDirection direction)
{
    if (psi.dim() != pic.h_eff.dim()) throw std::invalid_argument("map_frame: dimension mismatch");
    const double sign = direction == FrameDirection::LabToEffective ? 1.0 : -1.0;
    const Operator u = expi_hermitian(pic.generator(t), sign);
    return StateVector::from_evolved(u * psi.amplitudes());
}

} // namespace quadfold
