#include "jamcraft/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

namespace jamcraft {

bool all_finite(const ComplexMatrix& m)
{
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m)
{
    if (m.rows() != m.cols())
        throw InvalidInput("HermitianMatrix: matrix is " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", expected square");
    if (!all_finite(m))
        throw InvalidInput("HermitianMatrix: non-finite entry");
    m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Index n) { return HermitianMatrix(ComplexMatrix::Zero(n, n)); }

HermitianMatrix HermitianMatrix::identity(Index n)
{
    return HermitianMatrix(ComplexMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d)
{
    ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
    m.diagonal() = d.cast<Complex>();
    return HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const
{
    if (o.dim() != dim())
        throw InvalidInput("HermitianMatrix: dimension mismatch in +");
    return HermitianMatrix(m_ + o.m_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const
{
    if (o.dim() != dim())
        throw InvalidInput("HermitianMatrix: dimension mismatch in -");
    return HermitianMatrix(m_ - o.m_);
}

HermitianMatrix HermitianMatrix::operator*(double s) const { return HermitianMatrix(m_ * s); }

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o)
{
    *this = *this + o;
    return *this;
}

Eigensystem evd(const HermitianMatrix& h)
{
    // Construction already guarantees finiteness; empty matrices are legal.
    Eigensystem out;
    const Index n = h.dim();
    if (n == 0)
        return out;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success)
        throw DomainError("evd: eigen solver failed to converge");
    // Eigen returns ascending order.
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

SingularSystem svd(const ComplexMatrix& m)
{
    if (!all_finite(m))
        throw InvalidInput("svd: non-finite entry");
    Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

bool is_psd(const HermitianMatrix& h, double tol)
{
    if (h.dim() == 0)
        return true;
    const RealVector vals = evd(h).values;
    const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
    return vals.minCoeff() >= -tol * scale;
}

bool is_pd(const HermitianMatrix& h, double rel_tol)
{
    if (h.dim() == 0)
        return false;
    const RealVector vals = evd(h).values;
    const double top = vals.cwiseAbs().maxCoeff();
    return top > 0.0 && vals.minCoeff() > rel_tol * top;
}

double log_det(const HermitianMatrix& h)
{
    if (h.dim() == 0)
        return 0.0;
    Eigen::LLT<ComplexMatrix> llt(h.matrix());
    if (llt.info() != Eigen::Success)
        throw DomainError("log_det: matrix is not positive definite");
    const auto diag = llt.matrixLLT().diagonal();
    double acc = 0.0;
    for (Index i = 0; i < diag.size(); ++i) {
        const double d = diag(i).real();
        if (!(d > 0.0))
            throw DomainError("log_det: matrix is not positive definite");
        acc += 2.0 * std::log(d);
    }
    return acc;
}

HermitianMatrix inverse_pd(const HermitianMatrix& h)
{
    Eigen::LLT<ComplexMatrix> llt(h.matrix());
    if (llt.info() != Eigen::Success)
        throw DomainError("inverse_pd: matrix is not positive definite");
    return HermitianMatrix(llt.solve(ComplexMatrix::Identity(h.dim(), h.dim())));
}

HermitianMatrix congruence(const ComplexMatrix& m, const HermitianMatrix& h)
{
    if (m.cols() != h.dim())
        throw InvalidInput("congruence: dimension mismatch");
    return HermitianMatrix(m * h.matrix() * m.adjoint());
}

HermitianMatrix from_spectrum(const ComplexMatrix& u, const RealVector& d)
{
    return HermitianMatrix(u * d.cast<Complex>().asDiagonal() * u.adjoint());
}

double inner(const HermitianMatrix& a, const HermitianMatrix& b)
{
    return a.matrix().cwiseProduct(b.matrix().conjugate()).sum().real();
}

RealVector project_capped_simplex(const RealVector& v, double budget)
{
    RealVector clamped = v.cwiseMax(0.0);
    if (clamped.sum() <= budget)
        return clamped;

    // Sorting-based projection onto {x >= 0, sum x = budget}; theta > 0 here.
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumulative += sorted[j];
        const double candidate = (cumulative - budget) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0)
            theta = candidate;
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

HermitianMatrix psd_trace_projection(const HermitianMatrix& h, double budget)
{
    if (!(budget > 0.0))
        throw InvalidInput("psd_trace_projection: budget must be positive");
    const Eigensystem es = evd(h);
    return from_spectrum(es.vectors, project_capped_simplex(es.values, budget));
}

std::string describe(const ComplexMatrix& m)
{
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (Index i = 0; i < m.rows(); ++i) {
        os << (i ? "; " : "");
        for (Index j = 0; j < m.cols(); ++j)
            os << (j ? ", " : "") << m(i, j).real() << (m(i, j).imag() < 0 ? "" : "+")
               << m(i, j).imag() << "i";
    }
    os << "]";
    return os.str();
}

}  // namespace jamcraft
