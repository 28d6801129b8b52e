#pragma once

// Dense complex operator and state algebra for small (dim <= a few hundred)
// Hilbert spaces. Level indices on every public surface are 1-based, so
// ketbra(2, 4, 4) is |2><4| in a four-level system.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quadfold/errors.hpp"

namespace quadfold {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Absolute entrywise tolerance for max|h - h^dagger|.
inline constexpr double kHermitianTol = 1e-10;
/// Allowed |1 - <psi|psi>| when a StateVector is built from user input.
inline constexpr double kNormTol = 1e-9;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Square complex matrix with optional basis-state names.
class Operator {
public:
    explicit Operator(Matrix entries, std::vector<std::string> labels = {})
        : m_(std::move(entries)), labels_(std::move(labels))
    {
        if (m_.rows() == 0 || m_.rows() != m_.cols())
            throw std::invalid_argument("Operator: entries must be a non-empty square matrix");
        check_labels(labels_);
    }

    static Operator zero(int dim) { return Operator(Matrix::Zero(dim, dim)); }
    static Operator identity(int dim) { return Operator(Matrix::Identity(dim, dim)); }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    const std::vector<std::string>& labels() const { return labels_; }
    bool has_labels() const { return !labels_.empty(); }

    /// 1-based element access, <i|op|j>.
    Complex at(int i, int j) const
    {
        check_index(i);
        check_index(j);
        return m_(i - 1, j - 1);
    }

    Operator with_labels(std::vector<std::string> labels) const { return Operator(m_, std::move(labels)); }

    Operator adjoint() const { return Operator(m_.adjoint(), labels_); }

    double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
    bool is_hermitian(double tol = kHermitianTol) const { return hermiticity_error() <= tol; }

    double max_abs() const { return m_.cwiseAbs().maxCoeff(); }
    Complex trace() const { return m_.trace(); }

    /// Largest |eigenvalue| for Hermitian operators, largest singular value otherwise.
    double operator_norm() const
    {
        Eigen::JacobiSVD<Matrix> svd(m_);
        return svd.singularValues()(0);
    }

    Operator& operator+=(const Operator& o)
    {
        require_same_dim(o, "+");
        m_ += o.m_;
        adopt_labels(o);
        return *this;
    }
    Operator& operator-=(const Operator& o)
    {
        require_same_dim(o, "-");
        m_ -= o.m_;
        adopt_labels(o);
        return *this;
    }
    Operator& operator*=(Complex s)
    {
        m_ *= s;
        return *this;
    }

    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator-(Operator a) { return a *= -1.0; }
    friend Operator operator*(Operator a, Complex s) { return a *= s; }
    friend Operator operator*(Complex s, Operator a) { return a *= s; }
    friend Operator operator*(const Operator& a, const Operator& b)
    {
        a.require_same_dim(b, "*");
        return Operator(a.m_ * b.m_, a.has_labels() ? a.labels_ : b.labels_);
    }

    Vector operator*(const Vector& v) const
    {
        if (v.size() != m_.rows()) throw std::invalid_argument("Operator * vector: dimension mismatch");
        return m_ * v;
    }

private:
    void check_index(int i) const
    {
        if (i < 1 || i > dim()) throw std::invalid_argument("Operator: level index out of range");
    }

    void check_labels(const std::vector<std::string>& labels) const
    {
        if (labels.empty()) return;
        if (static_cast<int>(labels.size()) != dim())
            throw std::invalid_argument("Operator: label count must equal dim");
        if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size())
            throw std::invalid_argument("Operator: labels must be distinct");
    }

    void require_same_dim(const Operator& o, const char* op) const
    {
        if (o.dim() != dim())
            throw std::invalid_argument(std::string("Operator ") + op + ": dimension mismatch");
    }

    void adopt_labels(const Operator& o)
    {
        if (labels_.empty()) labels_ = o.labels_;
    }

    Matrix m_;
    std::vector<std::string> labels_;
};

inline double max_abs_diff(const Operator& a, const Operator& b)
{
    if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

/// Normalized pure state.
class StateVector {
public:
    explicit StateVector(Vector amplitudes) : amps_(std::move(amplitudes))
    {
        if (amps_.size() == 0) throw std::invalid_argument("StateVector: empty");
        if (std::abs(1.0 - amps_.squaredNorm()) > kNormTol)
            throw ContractViolation("StateVector: amplitudes are not normalized");
    }

    /// Wraps the output of a propagator. The caller owns the norm-drift check.
    static StateVector from_evolved(Vector amplitudes)
    {
        StateVector s;
        s.amps_ = std::move(amplitudes);
        return s;
    }

    /// |index> with 1-based index.
    static StateVector basis(int index, int dim)
    {
        if (dim < 1 || index < 1 || index > dim) throw std::invalid_argument("StateVector::basis: index out of range");
        Vector v = Vector::Zero(dim);
        v(index - 1) = 1.0;
        return StateVector(std::move(v));
    }

    int dim() const { return static_cast<int>(amps_.size()); }
    const Vector& amplitudes() const { return amps_; }
    double norm_squared() const { return amps_.squaredNorm(); }

    std::vector<double> populations() const
    {
        std::vector<double> p(amps_.size());
        for (Eigen::Index i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_(i));
        return p;
    }

private:
    StateVector() = default;
    Vector amps_;
};

/// |i><j| in a dim-level space, 1-based.
inline Operator ketbra(int i, int j, int dim)
{
    if (dim < 1 || i < 1 || j < 1 || i > dim || j > dim)
        throw std::invalid_argument("ketbra: index out of range");
    Matrix m = Matrix::Zero(dim, dim);
    m(i - 1, j - 1) = 1.0;
    return Operator(std::move(m));
}

inline Operator commutator(const Operator& a, const Operator& b)
{
    if (a.dim() != b.dim()) throw std::invalid_argument("commutator: dimension mismatch");
    return Operator(a.matrix() * b.matrix() - b.matrix() * a.matrix(), a.has_labels() ? a.labels() : b.labels());
}

/// Kronecker product; composite index = b.dim*(i1-1) + (i2-1) + 1, so a is the slow index.
inline Operator tensor_product(const Operator& a, const Operator& b)
{
    const int da = a.dim();
    const int db = b.dim();
    Matrix m(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) m.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    return Operator(std::move(m));
}

struct HermitianEigen {
    Eigen::VectorXd values;
    Matrix vectors; // columns are eigenvectors
};

inline HermitianEigen hermitian_eigen(const Operator& h)
{
    if (!h.is_hermitian())
        throw ContractViolation("hermitian_eigen: operator is not Hermitian (max|h - h^dagger| = " +
                                std::to_string(h.hermiticity_error()) + ")");
    // Symmetrize so roundoff asymmetry below the tolerance cannot leak into the solver.
    const Matrix sym = 0.5 * (h.matrix() + h.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) throw NumericalFailure("hermitian_eigen: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// exp(i * scale * h) for Hermitian h, via eigendecomposition.
inline Operator expi_hermitian(const Operator& h, double scale)
{
    const auto eig = hermitian_eigen(h);
    Vector phases(eig.values.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, scale * eig.values(k));
    return Operator(eig.vectors * phases.asDiagonal() * eig.vectors.adjoint(), h.labels());
}

} // namespace quadfold
