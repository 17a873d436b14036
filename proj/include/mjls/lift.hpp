#pragma once

// Degree-p polynomial lift of a state vector and of a linear generator.
//
// For x in R^n the lifted vector x^[p] collects every degree-p monomial
// c_k * x_1^k_1 ... x_n^k_n, with c_k = sqrt(p! / (k_1! ... k_n!)) so that
// ||x^[p]|| = ||x||^p. A_[p] is the generator of the lifted flow:
// dx/dt = A x implies d(x^[p])/dt = A_[p] x^[p].

#include "mjls/linalg.hpp"

#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

namespace mjls {

using Exponent = std::vector<int>;

class LiftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxLiftDegree = 6;
inline constexpr std::size_t kMaxLiftSize = 200000;

/// Number of degree-p monomials in n variables, C(n + p - 1, p).
/// Throws LiftError when the count exceeds `cap`.
[[nodiscard]] std::size_t lifted_dimension(int n, int p, std::size_t cap = kMaxLiftSize);

class LiftBasis {
public:
    LiftBasis(int n, int p);

    [[nodiscard]] int state_dim() const { return n_; }
    [[nodiscard]] int degree() const { return p_; }
    [[nodiscard]] std::size_t size() const { return indices_.size(); }

    /// Exponent tuples in lexicographically descending order.
    [[nodiscard]] const std::vector<Exponent>& indices() const { return indices_; }
    [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }

    [[nodiscard]] std::size_t position(const Exponent& k) const;

private:
    int n_;
    int p_;
    std::vector<Exponent> indices_;
    std::vector<double> coeffs_;
    std::map<Exponent, std::size_t> lookup_;
};

[[nodiscard]] LiftBasis make_basis(int n, int p);

[[nodiscard]] Vector lift_vector(const LiftBasis& basis, const Vector& x);

[[nodiscard]] Matrix lift_matrix(const LiftBasis& basis, const Matrix& a);

/// Convenience overload building the basis from a.rows() and p.
[[nodiscard]] Matrix lift_matrix(const Matrix& a, int p);

}  // namespace mjls
