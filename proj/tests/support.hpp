#pragma once

#include <random>

#include "quadfold/hilbert.hpp"
#include "quadfold/models.hpp"

namespace qtest {

using namespace quadfold;

inline Operator random_operator(std::mt19937_64& rng, int dim)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(n(rng), n(rng));
    return Operator(m);
}

inline Operator random_hermitian(std::mt19937_64& rng, int dim, double scale = 1.0)
{
    const Matrix m = random_operator(rng, dim).matrix();
    return Operator(0.5 * scale * (m + m.adjoint()));
}

inline double unitarity_error(const Operator& u)
{
    const Matrix d = u.matrix().adjoint() * u.matrix() - Matrix::Identity(u.dim(), u.dim());
    return d.cwiseAbs().maxCoeff();
}

inline FourLevelParams random_four_level(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_real_distribution<double> trap(10.0, 60.0);
    std::uniform_real_distribution<double> ratio(0.0, 0.9);
    FourLevelParams p;
    p.nu_omega1 = u(rng);
    p.nu_omega2 = u(rng);
    p.nu_delta2 = u(rng);
    p.nu_delta3 = u(rng);
    p.nu_delta4 = u(rng);
    p.nu_trap = trap(rng);
    p.nu_quad = ratio(rng) * p.nu_trap;
    return p;
}

inline FiveLevelParams random_five_level(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_real_distribution<double> ratio(0.0, 0.9);
    FiveLevelParams p;
    p.base = random_four_level(rng);
    p.nu_delta5 = u(rng);
    p.nu_quad_bar = ratio(rng) * p.base.nu_trap;
    return p;
}

inline TwoIonParams random_two_ion(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> lam(-10.0, 10.0);
    TwoIonParams p;
    p.base = random_four_level(rng);
    p.nu_lambda = lam(rng);
    return p;
}

} // namespace qtest
