#pragma once

// Complex Hermitian linear algebra shared by every solver: eigen and singular
// value decompositions, PSD predicates, log-determinants and the Frobenius
// projection onto the trace-bounded PSD cone.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace jamcraft {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Malformed input: wrong shape, non-finite entries, inconsistent dimensions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation (e.g. log-det of a
/// matrix that is not positive definite).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical guarantee that should hold by construction did not.
class ContractViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool all_finite(const ComplexMatrix& m);

/// Square complex matrix that is Hermitian by construction: the input is
/// replaced by (M + Mᴴ)/2, so accumulated round-off asymmetry never leaks.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(const ComplexMatrix& m);

    static HermitianMatrix zero(Index n);
    static HermitianMatrix identity(Index n);
    static HermitianMatrix diagonal(const RealVector& d);

    Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    Complex operator()(Index i, Index j) const { return m_(i, j); }
    double trace() const { return m_.trace().real(); }
    double frobenius_norm() const { return m_.norm(); }

    HermitianMatrix operator+(const HermitianMatrix& o) const;
    HermitianMatrix operator-(const HermitianMatrix& o) const;
    HermitianMatrix operator*(double s) const;
    HermitianMatrix& operator+=(const HermitianMatrix& o);

private:
    ComplexMatrix m_;
};

inline HermitianMatrix operator*(double s, const HermitianMatrix& h) { return h * s; }

/// Eigenpairs with eigenvalues sorted in descending order.
struct Eigensystem {
    ComplexMatrix vectors;
    RealVector values;
};

struct SingularSystem {
    ComplexMatrix u;     // rows x rows
    RealVector sigma;    // min(rows, cols), descending
    ComplexMatrix v;     // cols x cols
};

Eigensystem evd(const HermitianMatrix& h);
SingularSystem svd(const ComplexMatrix& m);

/// min eigenvalue >= -tol * max(1, max |eigenvalue|).
bool is_psd(const HermitianMatrix& h, double tol);

/// min eigenvalue > rel_tol * max |eigenvalue| (and the matrix is nonzero).
bool is_pd(const HermitianMatrix& h, double rel_tol = 1e-10);

/// Natural-log determinant of a positive definite matrix.
double log_det(const HermitianMatrix& h);

/// Inverse of a positive definite matrix.
HermitianMatrix inverse_pd(const HermitianMatrix& h);

/// M·H·Mᴴ.
HermitianMatrix congruence(const ComplexMatrix& m, const HermitianMatrix& h);

/// U·diag(d)·Uᴴ.
HermitianMatrix from_spectrum(const ComplexMatrix& u, const RealVector& d);

/// Re Tr{AᴴB}, the real inner product on Hermitian matrices.
double inner(const HermitianMatrix& a, const HermitianMatrix& b);

/// Euclidean projection of v onto {x >= 0, sum(x) <= budget}.
RealVector project_capped_simplex(const RealVector& v, double budget);

/// Frobenius-nearest point of {X ⪰ 0, Tr X <= budget}.
HermitianMatrix psd_trace_projection(const HermitianMatrix& h, double budget);

std::string describe(const ComplexMatrix& m);

}  // namespace jamcraft
