// Two-level toy: drive a single coupling and compare the exact population
// with the effective-Hamiltonian prediction.
#include <cstdio>

#include "quadfold/dynamics.hpp"
#include "quadfold/effective.hpp"

int main()
{
    using namespace quadfold;
    Matrix h0 = Matrix::Zero(2, 2);
    h0(0, 0) = 0.5 * kTwoPi;
    h0(1, 1) = -0.5 * kTwoPi;
    Matrix v = Matrix::Zero(2, 2);
    v(0, 1) = v(1, 0) = 2.0 * kTwoPi;

    const HarmonicSystem sys{Operator(h0), Operator(v), 40.0 * kTwoPi};
    const EffectivePicture pic = effective_picture(sys);
    const auto psi0 = StateVector::basis(1, 2);
    const auto times = uniform_grid(1.0, 0.05);

    const Trajectory exact = propagate_driven(sys, std::nullopt, psi0, times, PropagationSettings{});
    const Trajectory eff = propagate_static(pic.h_eff, psi0, times, false);

    std::printf("%8s %12s %12s\n", "t_us", "P1_exact", "P1_eff");
    for (std::size_t k = 0; k < times.size(); ++k)
        std::printf("%8.3f %12.8f %12.8f\n", times[k], exact.populations[k][0], eff.populations[k][0]);
}
