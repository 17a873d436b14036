#include "mjls/lift.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace mjls {

namespace {

// Exponent tuples summing to `remaining` over positions [pos, n), emitted
// with the leading exponent as large as possible first.
void enumerate(int n, int pos, int remaining, Exponent& current, std::vector<Exponent>& out) {
    if (pos == n - 1) {
        current[pos] = remaining;
        out.push_back(current);
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        current[pos] = k;
        enumerate(n, pos + 1, remaining - k, current, out);
    }
    current[pos] = 0;
}

std::uint64_t factorial(int k) {
    std::uint64_t f = 1;
    for (int i = 2; i <= k; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

}  // namespace

std::size_t lifted_dimension(int n, int p, std::size_t cap) {
    if (n < 1 || p < 1) {
        throw LiftError("lifted_dimension: n and p must be positive");
    }
    // C(n + p - 1, p) computed incrementally; intermediate values are exact
    // binomials C(n - 1 + i, i).
    long double c = 1.0L;
    for (int i = 1; i <= p; ++i) {
        c = c * static_cast<long double>(n - 1 + i) / static_cast<long double>(i);
        if (c > static_cast<long double>(cap)) {
            throw LiftError("lifted dimension C(" + std::to_string(n + p - 1) + ", " +
                            std::to_string(p) + ") exceeds cap " + std::to_string(cap));
        }
    }
    return static_cast<std::size_t>(std::llround(static_cast<double>(c)));
}

LiftBasis::LiftBasis(int n, int p) : n_(n), p_(p) {
    if (n < 1 || p < 1) {
        throw LiftError("LiftBasis: n and p must be positive");
    }
    if (p > kMaxLiftDegree) {
        throw LiftError("LiftBasis: degree " + std::to_string(p) + " exceeds maximum " +
                        std::to_string(kMaxLiftDegree));
    }
    const std::size_t expected = lifted_dimension(n, p);
    indices_.reserve(expected);
    Exponent current(static_cast<std::size_t>(n), 0);
    enumerate(n, 0, p, current, indices_);

    const auto pf = static_cast<double>(factorial(p));
    coeffs_.reserve(indices_.size());
    for (std::size_t idx = 0; idx < indices_.size(); ++idx) {
        std::uint64_t denom = 1;
        for (int k : indices_[idx]) denom *= factorial(k);
        coeffs_.push_back(std::sqrt(pf / static_cast<double>(denom)));
        lookup_.emplace(indices_[idx], idx);
    }
}

std::size_t LiftBasis::position(const Exponent& k) const {
    const auto it = lookup_.find(k);
    if (it == lookup_.end()) {
        throw LiftError("LiftBasis::position: exponent not in basis");
    }
    return it->second;
}

LiftBasis make_basis(int n, int p) {
    return LiftBasis(n, p);
}

Vector lift_vector(const LiftBasis& basis, const Vector& x) {
    if (x.size() != basis.state_dim()) {
        throw LiftError("lift_vector: vector length " + std::to_string(x.size()) +
                        " does not match basis dimension " + std::to_string(basis.state_dim()));
    }
    const auto& idx = basis.indices();
    const auto& c = basis.coeffs();
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
        double v = c[r];
        for (int i = 0; i < basis.state_dim(); ++i) {
            const int k = idx[r][static_cast<std::size_t>(i)];
            if (k > 0) v *= std::pow(x(i), k);
        }
        out(static_cast<Eigen::Index>(r)) = v;
    }
    return out;
}

Matrix lift_matrix(const LiftBasis& basis, const Matrix& a) {
    const int n = basis.state_dim();
    if (a.rows() != n || a.cols() != n) {
        throw LiftError("lift_matrix: matrix is " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + ", basis expects order " + std::to_string(n));
    }
    // d/dt (c_k x^k) = sum_{i,j} a_ij k_i (c_k / c_k') (c_k' x^k'), k' = k - e_i + e_j.
    // Row k is the derivative of monomial k; column k' is the monomial it
    // expands onto.
    const auto& idx = basis.indices();
    const auto& c = basis.coeffs();
    const auto np = static_cast<Eigen::Index>(idx.size());
    Matrix out = Matrix::Zero(np, np);
    Exponent shifted;
    for (std::size_t row = 0; row < idx.size(); ++row) {
        const Exponent& k = idx[row];
        for (int i = 0; i < n; ++i) {
            const int ki = k[static_cast<std::size_t>(i)];
            if (ki == 0) continue;
            for (int j = 0; j < n; ++j) {
                const double aij = a(i, j);
                if (aij == 0.0) continue;
                shifted = k;
                shifted[static_cast<std::size_t>(i)] -= 1;
                shifted[static_cast<std::size_t>(j)] += 1;
                const std::size_t col = basis.position(shifted);
                out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) +=
                    aij * static_cast<double>(ki) * c[row] / c[col];
            }
        }
    }
    return out;
}

Matrix lift_matrix(const Matrix& a, int p) {
    require_square(a, "lift_matrix");
    return lift_matrix(make_basis(static_cast<int>(a.rows()), p), a);
}

}  // namespace mjls
