#include "mjls/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace mjls {

namespace {

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Backward-error thresholds on ||A||_1 for each Pade degree.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t K>
Matrix pade_low(const Matrix& a, const std::array<double, K>& b) {
    // Degrees 3..9: U = A * sum odd, V = sum even, in powers of A^2.
    const auto n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    Matrix power = ident;
    Matrix u_inner = Matrix::Zero(n, n);
    Matrix v = Matrix::Zero(n, n);
    for (std::size_t k = 0; k + 1 < K; k += 2) {
        v += b[k] * power;
        u_inner += b[k + 1] * power;
        power = power * a2;
    }
    const Matrix u = a * u_inner;
    return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
    const auto& b = kPade13;
    const auto n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u =
        a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
             b[1] * ident);
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                     b[2] * a2 + b[0] * ident;
    return (v - u).partialPivLu().solve(v + u);
}

double one_norm(const Matrix& a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Solves y^H A = lambda y^H by inverse iteration on A^H with a slightly
// perturbed shift, seeded from the matching right eigenvector.
template <typename Mat>
CVector left_eigenvector(const Mat& a, Complex lambda, const CVector& right) {
    const auto n = a.rows();
    const CMatrix ah = a.template cast<Complex>().adjoint();
    const double scale = std::max(1.0, ah.cwiseAbs().maxCoeff());
    CVector seed = right;
    for (Eigen::Index k = 0; k < n; ++k) {
        // Deterministic perturbation so the seed is never orthogonal to y.
        seed(k) += Complex(1e-3 * std::cos(1.0 + 0.7 * static_cast<double>(k)),
                           1e-3 * std::sin(2.0 + 1.3 * static_cast<double>(k)));
    }
    seed.normalize();
    for (double rel : {1e-13, 1e-11, 1e-9, 1e-7}) {
        const Complex shift = std::conj(lambda) + Complex(rel * scale, rel * scale);
        CMatrix shifted = ah;
        shifted.diagonal().array() -= shift;
        const Eigen::PartialPivLU<CMatrix> lu(shifted);
        CVector y = seed;
        bool ok = true;
        for (int it = 0; it < 3; ++it) {
            y = lu.solve(y);
            const double nrm = y.norm();
            if (!std::isfinite(nrm) || nrm == 0.0) {
                ok = false;
                break;
            }
            y /= nrm;
        }
        if (ok) {
            return y;
        }
    }
    throw LinalgError("spectral_abscissa: left eigenvector inverse iteration failed");
}

struct EigenDecomposition {
    CVector values;
    CMatrix vectors;  ///< empty unless requested
};

// The default QR budgets (40 and 30 sweeps per row) occasionally stall on the
// highly structured certificates built from rotations; retry with a larger
// budget, then in complex arithmetic, then after a fixed unitary similarity.
EigenDecomposition decompose(const CMatrix& a, bool with_vectors, const char* who) {
    const Eigen::Index n = std::max<Eigen::Index>(a.rows(), 1);
    for (Eigen::Index per_row : {30, 1000}) {
        Eigen::ComplexEigenSolver<CMatrix> solver;
        solver.setMaxIterations(per_row * n);
        solver.compute(a, with_vectors);
        if (solver.info() == Eigen::Success) {
            return {solver.eigenvalues(), with_vectors ? CMatrix(solver.eigenvectors()) : CMatrix()};
        }
    }
    CVector v(a.rows());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        v(k) = Complex(std::cos(0.3 + 1.7 * static_cast<double>(k)), std::sin(0.9 + 0.4 * static_cast<double>(k)));
    }
    v.normalize();
    const CMatrix h = CMatrix::Identity(a.rows(), a.rows()) - 2.0 * v * v.adjoint();
    Eigen::ComplexEigenSolver<CMatrix> solver;
    solver.setMaxIterations(1000 * n);
    solver.compute(h * a * h, with_vectors);
    if (solver.info() != Eigen::Success) {
        throw LinalgError(std::string(who) + ": eigensolver did not converge");
    }
    return {solver.eigenvalues(), with_vectors ? CMatrix(h * solver.eigenvectors()) : CMatrix()};
}

EigenDecomposition decompose(const Matrix& a, bool with_vectors, const char* who) {
    const Eigen::Index n = std::max<Eigen::Index>(a.rows(), 1);
    for (Eigen::Index per_row : {40, 1000}) {
        Eigen::EigenSolver<Matrix> solver;
        solver.setMaxIterations(per_row * n);
        solver.compute(a, with_vectors);
        if (solver.info() == Eigen::Success) {
            return {solver.eigenvalues(), with_vectors ? CMatrix(solver.eigenvectors()) : CMatrix()};
        }
    }
    return decompose(CMatrix(a.cast<Complex>()), with_vectors, who);
}

// A defective eigenvalue splits into a cluster of radius ~ eps^(1/k), while
// the cluster mean stays accurate to rounding. The abscissa is therefore the
// mean real part of the eigenvalues tied with the rightmost one (and, for real
// input, with its conjugate) within the default cluster tolerance.
double cluster_abscissa(const CVector& values, bool real_input) {
    Eigen::Index top = 0;
    for (Eigen::Index k = 1; k < values.size(); ++k) {
        if (values(k).real() > values(top).real()) top = k;
    }
    const Complex lead = values(top);
    const double tol = default_cluster_tol(lead.real());
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        double dist = std::abs(values(k) - lead);
        if (real_input) dist = std::min(dist, std::abs(values(k) - std::conj(lead)));
        if (dist <= tol) {
            sum += values(k).real();
            ++count;
        }
    }
    return sum / count;
}

template <typename Mat>
void require_finite_square(const Mat& a, const char* who) {
    require_square(a, who);
    if (!a.allFinite()) {
        throw LinalgError(std::string(who) + ": non-finite entries");
    }
    if (a.rows() == 0) {
        throw LinalgError(std::string(who) + ": empty matrix");
    }
}

template <typename Mat>
SpectralAbscissa abscissa_with_pairs(const Mat& a, std::optional<double> cluster_tol) {
    require_finite_square(a, "spectral_abscissa");
    const EigenDecomposition eig = decompose(a, true, "spectral_abscissa");
    const CVector& values = eig.values;
    const double mu = cluster_abscissa(values, !Eigen::NumTraits<typename Mat::Scalar>::IsComplex);
    const double tol = cluster_tol.value_or(default_cluster_tol(mu));

    std::vector<Eigen::Index> chosen;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (values(k).real() >= mu - tol) {
            chosen.push_back(k);
        }
    }
    std::sort(chosen.begin(), chosen.end(), [&](Eigen::Index l, Eigen::Index r) {
        if (values(l).real() != values(r).real()) {
            return values(l).real() > values(r).real();
        }
        return values(l).imag() > values(r).imag();
    });

    SpectralAbscissa out;
    out.mu = mu;
    for (auto k : chosen) {
        EigenPair pair;
        pair.value = values(k);
        pair.right = eig.vectors.col(k).normalized();
        pair.left = left_eigenvector(a, pair.value, pair.right);
        out.achieving_pairs.push_back(std::move(pair));
    }
    return out;
}

}  // namespace

Matrix expm(const Matrix& a) {
    require_square(a, "expm");
    if (!a.allFinite()) {
        throw LinalgError("expm: non-finite entries");
    }
    const double nrm = one_norm(a);
    if (nrm <= kTheta3) return pade_low(a, kPade3);
    if (nrm <= kTheta5) return pade_low(a, kPade5);
    if (nrm <= kTheta7) return pade_low(a, kPade7);
    if (nrm <= kTheta9) return pade_low(a, kPade9);

    const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta13))));
    Matrix r = pade13(std::ldexp(1.0, -squarings) * a);
    for (int k = 0; k < squarings; ++k) {
        r = r * r;
    }
    return r;
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

double default_cluster_tol(double mu) {
    return 1e-6 * std::max(1.0, std::abs(mu));
}

SpectralAbscissa spectral_abscissa(const Matrix& a, std::optional<double> cluster_tol) {
    return abscissa_with_pairs(a, cluster_tol);
}

SpectralAbscissa spectral_abscissa(const CMatrix& a, std::optional<double> cluster_tol) {
    return abscissa_with_pairs(a, cluster_tol);
}

CVector eigenvalues(const Matrix& a) {
    require_finite_square(a, "eigenvalues");
    return decompose(a, false, "eigenvalues").values;
}

CVector eigenvalues(const CMatrix& a) {
    require_finite_square(a, "eigenvalues");
    return decompose(a, false, "eigenvalues").values;
}

double abscissa(const Matrix& a) {
    require_finite_square(a, "abscissa");
    return cluster_abscissa(decompose(a, false, "abscissa").values, true);
}

double abscissa(const CMatrix& a) {
    require_finite_square(a, "abscissa");
    return cluster_abscissa(decompose(a, false, "abscissa").values, false);
}

bool is_hurwitz(const Matrix& a, double eps) {
    return abscissa(a) < -eps;
}

}  // namespace mjls
