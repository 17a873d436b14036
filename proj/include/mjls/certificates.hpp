#pragma once

// Certificate matrices for moment stability/instability of jump systems.
//
//   mean square:  Q^T (x) I_{n^2} + diag(A_i (+) A_i)
//   T:            Q^T (x) I_{n_p} + diag((A_i)_[p])
//   T_hat:        Q^T (x) I_{(nm)_p} + diag((W_i (+) A_i)_[p])
//   S_hat:        Q^T (x) I_{mn} + diag(V_i (+) A_i), complex V_i, p = 1
//
// A non-Hurwitz T_hat, with weights whose switched system is stable, rules
// out exponential p-th mean stability.

#include "mjls/linalg.hpp"
#include "mjls/system.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mjls {

inline constexpr std::size_t kMaxCertificateOrder = 4000;
inline constexpr double kSkewTol = 1e-12;

class SizeCapError : public std::runtime_error {
public:
    SizeCapError(std::string what, std::size_t order);
    [[nodiscard]] std::size_t order() const { return order_; }

private:
    std::size_t order_;
};

enum class Admissibility { SkewSymmetric, Identity, UserAsserted };

struct WeightSet {
    int order = 1;
    std::vector<Matrix> weights;
    Admissibility admissibility = Admissibility::Identity;

    /// m = 1, W_i = [0] for N modes; reproduces the unweighted T.
    static WeightSet trivial(int modes);
    /// Validates skew-symmetry to kSkewTol; throws std::invalid_argument otherwise.
    static WeightSet skew(std::vector<Matrix> weights);
    static WeightSet asserted(std::vector<Matrix> weights);

    friend bool operator==(const WeightSet& a, const WeightSet& b) {
        return a.order == b.order && a.admissibility == b.admissibility &&
               exactly_equal(a.weights, b.weights);
    }
};

[[nodiscard]] bool is_skew_symmetric(const Matrix& w, double tol = kSkewTol);

enum class CertificateKind { MeanSquare, UnweightedT, WeightedT };

struct CertificateReport {
    CertificateKind kind = CertificateKind::UnweightedT;
    int p = 1;
    double mu = 0.0;
    Complex dominant_eigenvalue{};
    bool hurwitz = false;
    std::size_t order = 0;
    std::optional<WeightSet> weights;

    bool operator==(const CertificateReport&) const = default;
};

enum class VerdictKind { MeanSquareStable, PthMeanStableCertified, NotPthMeanStable, Inconclusive };

struct StabilityVerdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    int p = 1;
    CertificateReport evidence;
    /// Set when the weights were only asserted (not proven) to give a stable
    /// switched system; the verdict then holds conditionally on that claim.
    bool conditional = false;

    bool operator==(const StabilityVerdict&) const = default;
};

/// Order N * n_p of the certificate at effective state dimension `dim`;
/// throws SizeCapError above `cap`.
[[nodiscard]] std::size_t certificate_order(int modes, int dim, int p,
                                            std::size_t cap = kMaxCertificateOrder);

[[nodiscard]] Matrix build_mean_square(const JumpSystem& sys);
[[nodiscard]] Matrix build_T(const JumpSystem& sys, int p);
[[nodiscard]] Matrix build_T_hat(const JumpSystem& sys, int p, const WeightSet& w);
[[nodiscard]] CMatrix build_S_hat(const JumpSystem& sys, const std::vector<CMatrix>& v);

/// Spectral summary of an assembled certificate.
[[nodiscard]] CertificateReport evaluate(CertificateKind kind, const Matrix& certificate, int p,
                                         double eps = kDefaultHurwitzMargin,
                                         std::optional<WeightSet> weights = std::nullopt);

/// Sufficient test for instability, plus the positive-system converse when
/// the weights are trivial.
[[nodiscard]] StabilityVerdict instability_verdict(const JumpSystem& sys, int p, const WeightSet& w,
                                                   double eps = kDefaultHurwitzMargin);

/// Mean-square dichotomy: Hurwitz iff exponentially mean-square stable.
[[nodiscard]] StabilityVerdict mean_square_verdict(const JumpSystem& sys,
                                                   double eps = kDefaultHurwitzMargin);

/// W_i -> diag(W_i, 0) of order m_prime > m.
[[nodiscard]] WeightSet pad_weights(const WeightSet& w, int m_prime);

/// V_i -> [[Re V, -Im V], [Im V, Re V]]; skew-Hermitian V gives skew W.
[[nodiscard]] WeightSet embed_complex_weights(const std::vector<CMatrix>& v);

std::string to_string(VerdictKind k);
std::string to_string(CertificateKind k);
std::string to_string(Admissibility a);

}  // namespace mjls
