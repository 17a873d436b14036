#include "mjls/certificates.hpp"

#include "mjls/lift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mjls {

SizeCapError::SizeCapError(std::string what, std::size_t order)
    : std::runtime_error(std::move(what)), order_(order) {}

bool is_skew_symmetric(const Matrix& w, double tol) {
    return w.rows() == w.cols() && ((w + w.transpose()).cwiseAbs().maxCoeff() <= tol);
}

WeightSet WeightSet::trivial(int modes) {
    WeightSet w;
    w.order = 1;
    w.weights.assign(static_cast<std::size_t>(modes), Matrix::Zero(1, 1));
    w.admissibility = Admissibility::Identity;
    return w;
}

namespace {

int common_order(const std::vector<Matrix>& weights) {
    if (weights.empty()) {
        throw std::invalid_argument("weight set is empty");
    }
    const auto m = weights.front().rows();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i].rows() != m || weights[i].cols() != m || m < 1) {
            throw std::invalid_argument("weight " + std::to_string(i) +
                                        " does not match the common square order " +
                                        std::to_string(m));
        }
    }
    return static_cast<int>(m);
}

}  // namespace

WeightSet WeightSet::skew(std::vector<Matrix> weights) {
    WeightSet w;
    w.order = common_order(weights);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!is_skew_symmetric(weights[i])) {
            throw std::invalid_argument("weight " + std::to_string(i) + " is not skew-symmetric");
        }
    }
    w.weights = std::move(weights);
    w.admissibility = Admissibility::SkewSymmetric;
    return w;
}

WeightSet WeightSet::asserted(std::vector<Matrix> weights) {
    WeightSet w;
    w.order = common_order(weights);
    w.weights = std::move(weights);
    w.admissibility = Admissibility::UserAsserted;
    return w;
}

std::size_t certificate_order(int modes, int dim, int p, std::size_t cap) {
    std::size_t np = 0;
    try {
        np = lifted_dimension(dim, p, cap);
    } catch (const LiftError&) {
        throw SizeCapError("certificate order exceeds cap " + std::to_string(cap) +
                               " (lifted dimension alone is above it)",
                           cap + 1);
    }
    const std::size_t order = static_cast<std::size_t>(modes) * np;
    if (order > cap) {
        throw SizeCapError("certificate order " + std::to_string(order) + " exceeds cap " +
                               std::to_string(cap),
                           order);
    }
    return order;
}

namespace {

// Q^T (x) I_block + diag(blocks).
Matrix assemble(const Matrix& q, const std::vector<Matrix>& blocks) {
    const auto block = blocks.front().rows();
    Matrix out = kron<double>(q.transpose(), Matrix::Identity(block, block));
    out += block_diag(blocks);
    return out;
}

}  // namespace

Matrix build_mean_square(const JumpSystem& sys) {
    require_valid(sys);
    const int n = sys.state_dim();
    const std::size_t order = static_cast<std::size_t>(sys.mode_count()) *
                              static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    if (order > kMaxCertificateOrder) {
        throw SizeCapError("mean-square certificate order " + std::to_string(order) +
                               " exceeds cap " + std::to_string(kMaxCertificateOrder),
                           order);
    }
    std::vector<Matrix> blocks;
    blocks.reserve(sys.modes.size());
    for (const auto& a : sys.modes) blocks.push_back(kron_sum<double>(a, a));
    return assemble(sys.generator, blocks);
}

Matrix build_T(const JumpSystem& sys, int p) {
    require_valid(sys);
    (void)certificate_order(sys.mode_count(), sys.state_dim(), p);
    const LiftBasis basis = make_basis(sys.state_dim(), p);
    std::vector<Matrix> blocks;
    blocks.reserve(sys.modes.size());
    for (const auto& a : sys.modes) blocks.push_back(lift_matrix(basis, a));
    return assemble(sys.generator, blocks);
}

Matrix build_T_hat(const JumpSystem& sys, int p, const WeightSet& w) {
    require_valid(sys);
    if (static_cast<int>(w.weights.size()) != sys.mode_count()) {
        throw std::invalid_argument("weight count " + std::to_string(w.weights.size()) +
                                    " does not match mode count " +
                                    std::to_string(sys.mode_count()));
    }
    const int dim = sys.state_dim() * w.order;
    (void)certificate_order(sys.mode_count(), dim, p);
    const LiftBasis basis = make_basis(dim, p);
    std::vector<Matrix> blocks;
    blocks.reserve(sys.modes.size());
    for (std::size_t i = 0; i < sys.modes.size(); ++i) {
        blocks.push_back(lift_matrix(basis, kron_sum<double>(w.weights[i], sys.modes[i])));
    }
    return assemble(sys.generator, blocks);
}

CMatrix build_S_hat(const JumpSystem& sys, const std::vector<CMatrix>& v) {
    require_valid(sys);
    if (static_cast<int>(v.size()) != sys.mode_count()) {
        throw std::invalid_argument("complex weight count does not match mode count");
    }
    const auto m = v.front().rows();
    for (const auto& vi : v) {
        if (vi.rows() != m || vi.cols() != m) {
            throw std::invalid_argument("complex weights must share a square order");
        }
    }
    const auto block = m * sys.state_dim();
    const std::size_t order = static_cast<std::size_t>(block) * v.size();
    if (order > kMaxCertificateOrder) {
        throw SizeCapError("complex certificate order " + std::to_string(order) +
                               " exceeds cap " + std::to_string(kMaxCertificateOrder),
                           order);
    }
    std::vector<CMatrix> blocks;
    blocks.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        blocks.push_back(kron_sum<Complex>(v[i], sys.modes[i].cast<Complex>()));
    }
    CMatrix out = kron<Complex>(sys.generator.transpose().cast<Complex>(),
                                CMatrix::Identity(block, block));
    out += block_diag(blocks);
    return out;
}

CertificateReport evaluate(CertificateKind kind, const Matrix& certificate, int p, double eps,
                           std::optional<WeightSet> weights) {
    const CVector values = eigenvalues(certificate);
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < values.size(); ++k) {
        const auto& v = values(k);
        const auto& b = values(best);
        // Prefer the upper member of a conjugate pair for a stable readout.
        if (v.real() > b.real() || (v.real() == b.real() && v.imag() > b.imag())) best = k;
    }
    CertificateReport r;
    r.kind = kind;
    r.p = p;
    r.mu = values(best).real();
    r.dominant_eigenvalue = values(best);
    r.hurwitz = r.mu < -eps;
    r.order = static_cast<std::size_t>(certificate.rows());
    r.weights = std::move(weights);
    return r;
}

StabilityVerdict instability_verdict(const JumpSystem& sys, int p, const WeightSet& w, double eps) {
    const bool trivial = w.order == 1 && std::all_of(w.weights.begin(), w.weights.end(),
                                                     [](const Matrix& m) { return m(0, 0) == 0.0; });
    const Matrix cert = trivial ? build_T(sys, p) : build_T_hat(sys, p, w);
    StabilityVerdict v;
    v.p = p;
    v.evidence = evaluate(trivial ? CertificateKind::UnweightedT : CertificateKind::WeightedT, cert,
                          p, eps, w);
    v.conditional = w.admissibility == Admissibility::UserAsserted;
    if (!v.evidence.hurwitz) {
        v.kind = VerdictKind::NotPthMeanStable;
    } else if (trivial && is_positive_system(sys)) {
        v.kind = VerdictKind::PthMeanStableCertified;
    } else {
        v.kind = VerdictKind::Inconclusive;
    }
    return v;
}

StabilityVerdict mean_square_verdict(const JumpSystem& sys, double eps) {
    StabilityVerdict v;
    v.p = 2;
    v.evidence = evaluate(CertificateKind::MeanSquare, build_mean_square(sys), 2, eps);
    v.kind = v.evidence.hurwitz ? VerdictKind::MeanSquareStable : VerdictKind::NotPthMeanStable;
    return v;
}

WeightSet pad_weights(const WeightSet& w, int m_prime) {
    if (m_prime <= w.order) {
        throw std::invalid_argument("pad_weights: target order " + std::to_string(m_prime) +
                                    " must exceed current order " + std::to_string(w.order));
    }
    WeightSet out;
    out.order = m_prime;
    out.admissibility = w.admissibility;
    out.weights.reserve(w.weights.size());
    for (const auto& wi : w.weights) {
        Matrix padded = Matrix::Zero(m_prime, m_prime);
        padded.topLeftCorner(wi.rows(), wi.cols()) = wi;
        out.weights.push_back(std::move(padded));
    }
    // A zero-padded trivial set is no longer "the unweighted certificate" but
    // the padded zeros remain skew-symmetric.
    if (out.admissibility == Admissibility::Identity) out.admissibility = Admissibility::SkewSymmetric;
    return out;
}

WeightSet embed_complex_weights(const std::vector<CMatrix>& v) {
    if (v.empty()) {
        throw std::invalid_argument("embed_complex_weights: empty weight sequence");
    }
    std::vector<Matrix> real;
    real.reserve(v.size());
    bool skew = true;
    for (const auto& vi : v) {
        const auto m = vi.rows();
        Matrix w(2 * m, 2 * m);
        w.topLeftCorner(m, m) = vi.real();
        w.topRightCorner(m, m) = -vi.imag();
        w.bottomLeftCorner(m, m) = vi.imag();
        w.bottomRightCorner(m, m) = vi.real();
        skew = skew && is_skew_symmetric(w);
        real.push_back(std::move(w));
    }
    return skew ? WeightSet::skew(std::move(real)) : WeightSet::asserted(std::move(real));
}

std::string to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::MeanSquareStable: return "MeanSquareStable";
        case VerdictKind::PthMeanStableCertified: return "PthMeanStableCertified";
        case VerdictKind::NotPthMeanStable: return "NotPthMeanStable";
        case VerdictKind::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

std::string to_string(CertificateKind k) {
    switch (k) {
        case CertificateKind::MeanSquare: return "MeanSquare";
        case CertificateKind::UnweightedT: return "UnweightedT";
        case CertificateKind::WeightedT: return "WeightedT";
    }
    return "Unknown";
}

std::string to_string(Admissibility a) {
    switch (a) {
        case Admissibility::SkewSymmetric: return "SkewSymmetric";
        case Admissibility::Identity: return "Identity";
        case Admissibility::UserAsserted: return "UserAsserted";
    }
    return "Unknown";
}

}  // namespace mjls
