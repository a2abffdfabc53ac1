#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace cliffstbc {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cd I_UNIT{0.0, 1.0};

// Default tolerance for "is this matrix zero" style checks on designs whose
// entries are small integers, sqrt(2) or unit-modulus numbers.
inline constexpr double kStructTol = 1e-10;

struct Rational {
    long num = 0;
    long den = 1;

    Rational() = default;
    Rational(long n, long d) : num(n), den(d) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
    std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

inline double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_zero(const CMatrix& m, double tol = kStructTol) { return max_abs(m) <= tol; }

inline bool approx_equal(const CMatrix& a, const CMatrix& b, double tol = kStructTol) {
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs(a - b) <= tol;
}

// Rank of a real matrix via column-pivoted QR with a relative threshold.
inline Eigen::Index numeric_rank(const RMatrix& m, double rel_tol = 1e-9) {
    if (m.size() == 0) return 0;
    Eigen::ColPivHouseholderQR<RMatrix> qr(m);
    qr.setThreshold(rel_tol);
    return qr.rank();
}

// Hermitian inverse square root for a positive definite matrix.
inline CMatrix inverse_sqrt_hermitian(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
    const RVector& ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0) throw std::domain_error("matrix is not positive definite");
    RVector s = ev.cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace cliffstbc
