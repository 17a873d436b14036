#pragma once

// Dense matrix kernels used by the certificate builders: Kronecker products
// and sums, block diagonals, the matrix exponential and spectral abscissa
// extraction with matched left/right eigenvectors.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mjls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Default decision margin for "Hurwitz": mu < -eps.
inline constexpr double kDefaultHurwitzMargin = 1e-9;

class LinalgError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Derived>
[[nodiscard]] bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    return m.allFinite();
}

/// Shape and entrywise equality; unlike Eigen's operator== it accepts
/// operands of different shapes.
template <typename A, typename B>
[[nodiscard]] bool exactly_equal(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

template <typename T>
[[nodiscard]] bool exactly_equal(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!exactly_equal(a[k], b[k])) return false;
    }
    return true;
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw LinalgError(std::string(what) + ": expected a non-empty square matrix, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

/// Standard Kronecker product; block (i, j) of the result is a(i, j) * b.
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& b) {
    const auto br = b.rows();
    const auto bc = b.cols();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * br, a.cols() * bc);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * br, j * bc, br, bc) = a(i, j) * b;
        }
    }
    return out;
}

/// a (+) b = a kron I_m + I_n kron b, with n, m the orders of a and b.
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> kron_sum(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& b) {
    using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    require_square(a, "kron_sum");
    require_square(b, "kron_sum");
    return kron<Scalar>(a, M::Identity(b.rows(), b.rows())) +
           kron<Scalar>(M::Identity(a.rows(), a.rows()), b);
}

template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> block_diag(
    std::span<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> blocks) {
    if (blocks.empty()) {
        throw LinalgError("block_diag: empty block sequence");
    }
    Eigen::Index order = 0;
    for (const auto& b : blocks) {
        require_square(b, "block_diag");
        order += b.rows();
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(order, order);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        out.block(at, at, b.rows(), b.cols()) = b;
        at += b.rows();
    }
    return out;
}

[[nodiscard]] inline Matrix block_diag(const std::vector<Matrix>& blocks) {
    return block_diag<double>(std::span<const Matrix>(blocks));
}
[[nodiscard]] inline CMatrix block_diag(const std::vector<CMatrix>& blocks) {
    return block_diag<Complex>(std::span<const CMatrix>(blocks));
}

/// Matrix exponential by scaling and squaring with the degree-13 Pade
/// approximant (Higham's norm thresholds for degrees 3, 5, 7, 9, 13).
[[nodiscard]] Matrix expm(const Matrix& a);

/// Largest singular value.
[[nodiscard]] double spectral_norm(const Matrix& a);

struct EigenPair {
    Complex value;
    CVector right;  ///< unit 2-norm, A x = value x
    CVector left;   ///< unit 2-norm, y^H A = value y^H
};

struct SpectralAbscissa {
    /// Mean real part of the eigenvalues within default_cluster_tol of the
    /// rightmost one; a defective eigenvalue's computed cluster spreads by
    /// ~sqrt(eps) while its mean does not.
    double mu = 0.0;
    /// Every eigenpair with Re(lambda) >= mu - cluster_tol, ordered by
    /// decreasing real part, then by decreasing imaginary part.
    std::vector<EigenPair> achieving_pairs;
};

/// Default clustering tolerance 1e-6 * max(1, |mu|).
[[nodiscard]] double default_cluster_tol(double mu);

[[nodiscard]] SpectralAbscissa spectral_abscissa(const Matrix& a,
                                                 std::optional<double> cluster_tol = std::nullopt);
[[nodiscard]] SpectralAbscissa spectral_abscissa(const CMatrix& a,
                                                 std::optional<double> cluster_tol = std::nullopt);

/// Eigenvalues only; cheaper when no eigenvectors are needed.
[[nodiscard]] CVector eigenvalues(const Matrix& a);
[[nodiscard]] CVector eigenvalues(const CMatrix& a);

/// Same value as spectral_abscissa(a).mu, without eigenvectors.
[[nodiscard]] double abscissa(const Matrix& a);
[[nodiscard]] double abscissa(const CMatrix& a);

[[nodiscard]] bool is_hurwitz(const Matrix& a, double eps = kDefaultHurwitzMargin);

}  // namespace mjls
