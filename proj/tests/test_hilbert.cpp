#include <gtest/gtest.h>

#include <numbers>

#include "quadfold/errors.hpp"
#include "support.hpp"

using namespace quadfold;

namespace {

const Complex I{0.0, 1.0};

Operator sigma_x()
{
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return Operator(m);
}

Operator sigma_y()
{
    Matrix m(2, 2);
    m << 0, -I, I, 0;
    return Operator(m);
}

Operator sigma_z()
{
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return Operator(m);
}

} // namespace

TEST(Ketbra, Projector)
{
    Matrix expect(2, 2);
    expect << 1, 0, 0, 0;
    EXPECT_EQ(ketbra(1, 1, 2).matrix(), expect);
}

TEST(Ketbra, HermitianPair)
{
    const Operator h = ketbra(2, 4, 4) + ketbra(4, 2, 4);
    EXPECT_TRUE(h.is_hermitian());
    EXPECT_EQ(h.at(2, 4), Complex(1.0));
    EXPECT_EQ(h.at(4, 2), Complex(1.0));
    EXPECT_EQ(h.matrix().cwiseAbs().sum(), 2.0);
}

TEST(Ketbra, Contraction)
{
    EXPECT_EQ((ketbra(1, 2, 2) * ketbra(2, 1, 2)).matrix(), ketbra(1, 1, 2).matrix());
}

TEST(Ketbra, OutOfRange)
{
    EXPECT_THROW(ketbra(0, 1, 2), std::invalid_argument);
    EXPECT_THROW(ketbra(1, 3, 2), std::invalid_argument);
    EXPECT_THROW(ketbra(1, 1, 0), std::invalid_argument);
}

TEST(OperatorType, RejectsBadLabels)
{
    EXPECT_THROW(Operator(Matrix::Zero(2, 2), {"a"}), std::invalid_argument);
    EXPECT_THROW(Operator(Matrix::Zero(2, 2), {"a", "a"}), std::invalid_argument);
    EXPECT_THROW(Operator(Matrix::Zero(2, 3)), std::invalid_argument);
    EXPECT_NO_THROW(Operator(Matrix::Zero(2, 2), {"a", "b"}));
}

TEST(StateVectorType, NormalizationChecked)
{
    Vector v(2);
    v << 1.0, 1.0;
    EXPECT_THROW(StateVector{v}, ContractViolation);
    v /= std::sqrt(2.0);
    EXPECT_NO_THROW(StateVector{v});
}

TEST(Commutator, PauliAlgebra)
{
    const Operator c = commutator(sigma_x(), sigma_y());
    EXPECT_LE(max_abs_diff(c, 2.0 * I * sigma_z()), 1e-15);
}

TEST(Commutator, SelfCommutes)
{
    std::mt19937_64 rng(11);
    const Operator a = qtest::random_operator(rng, 5);
    EXPECT_EQ(commutator(a, a).max_abs(), 0.0);
}

TEST(Commutator, HermitianPairGivesAntiHermitian)
{
    std::mt19937_64 rng(12);
    const Operator v = qtest::random_hermitian(rng, 4);
    const Operator h = qtest::random_hermitian(rng, 4);
    const Operator c = commutator(v, h);
    EXPECT_LE(max_abs_diff(c.adjoint(), -c), 1e-14);
}

TEST(Commutator, DimensionMismatch)
{
    EXPECT_THROW(commutator(Operator::identity(2), Operator::identity(3)), std::invalid_argument);
}

TEST(TensorProduct, Identity)
{
    EXPECT_EQ(tensor_product(Operator::identity(2), Operator::identity(2)).matrix(), Matrix::Identity(4, 4));
}

TEST(TensorProduct, IonOneTransition)
{
    const Operator t = tensor_product(ketbra(2, 3, 4), Operator::identity(4));
    ASSERT_EQ(t.dim(), 16);
    for (int r = 1; r <= 16; ++r)
        for (int c = 1; c <= 16; ++c) {
            const int r1 = (r - 1) / 4 + 1, r2 = (r - 1) % 4 + 1;
            const int c1 = (c - 1) / 4 + 1, c2 = (c - 1) % 4 + 1;
            const bool expect = r1 == 2 && c1 == 3 && r2 == c2;
            EXPECT_EQ(t.at(r, c), Complex(expect ? 1.0 : 0.0)) << r << "," << c;
        }
}

TEST(ExpiHermitian, ZeroGenerator)
{
    EXPECT_LE(max_abs_diff(expi_hermitian(Operator::zero(3), 1.7), Operator::identity(3)), 1e-15);
}

TEST(ExpiHermitian, PauliQuarterTurn)
{
    const Operator u = expi_hermitian(sigma_x(), std::numbers::pi / 2);
    EXPECT_LE(max_abs_diff(u, I * sigma_x()), 1e-15);
}

TEST(ExpiHermitian, InversePair)
{
    std::mt19937_64 rng(13);
    const Operator h = qtest::random_hermitian(rng, 6);
    EXPECT_LE(max_abs_diff(expi_hermitian(h, 0.8) * expi_hermitian(h, -0.8), Operator::identity(6)), 1e-10);
}

TEST(ExpiHermitian, RejectsNonHermitian)
{
    EXPECT_THROW(expi_hermitian(ketbra(1, 2, 2), 1.0), ContractViolation);
}

// Randomized properties

TEST(HilbertProperty, ExponentialIsUnitary)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> s(-50.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 2 + trial % 15;
        const Operator h = qtest::random_hermitian(rng, dim, 3.0);
        EXPECT_LE(qtest::unitarity_error(expi_hermitian(h, s(rng))), 1e-10);
    }
}

TEST(HilbertProperty, CommutatorAntisymmetricExactly)
{
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const Operator a = qtest::random_operator(rng, 4);
        const Operator b = qtest::random_operator(rng, 4);
        EXPECT_EQ(commutator(a, b).matrix(), (-commutator(b, a)).matrix());
    }
}

TEST(HilbertProperty, CommutatorBilinear)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const Operator a = qtest::random_operator(rng, 4);
        const Operator b = qtest::random_operator(rng, 4);
        const Operator c = qtest::random_operator(rng, 4);
        const Complex alpha(0.3, -1.2);
        EXPECT_LE(max_abs_diff(commutator(alpha * a + b, c), alpha * commutator(a, c) + commutator(b, c)), 1e-12);
    }
}

TEST(HilbertProperty, JacobiIdentity)
{
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 100; ++trial) {
        const Operator a = qtest::random_operator(rng, 5);
        const Operator b = qtest::random_operator(rng, 5);
        const Operator c = qtest::random_operator(rng, 5);
        const Operator j = commutator(commutator(a, b), c) + commutator(commutator(b, c), a) +
                           commutator(commutator(c, a), b);
        EXPECT_LE(j.max_abs(), 1e-12);
    }
}

TEST(HilbertProperty, MixedProductRule)
{
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 50; ++trial) {
        const Operator a = qtest::random_hermitian(rng, 4);
        const Operator b = qtest::random_hermitian(rng, 4);
        const Operator c = qtest::random_hermitian(rng, 4);
        const Operator d = qtest::random_hermitian(rng, 4);
        EXPECT_LE(max_abs_diff(tensor_product(a, b) * tensor_product(c, d), tensor_product(a * c, b * d)), 1e-12);
    }
}
