#pragma once

#include "mjls/linalg.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mjls {

/// Markov jump linear system dx/dt = A_{r(t)} x with r a continuous-time
/// Markov chain on {0, ..., N-1} with generator Q.
struct JumpSystem {
    std::vector<Matrix> modes;
    Matrix generator;

    [[nodiscard]] int mode_count() const { return static_cast<int>(modes.size()); }
    [[nodiscard]] int state_dim() const {
        return modes.empty() ? 0 : static_cast<int>(modes.front().rows());
    }
};

inline constexpr double kGeneratorRowTol = 1e-12;

struct Violation {
    std::string message;
    int mode = -1;  ///< mode index, when the violation concerns one A_i
    int row = -1;
    int col = -1;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Every invariant violation of `sys`; empty means valid. Never throws.
[[nodiscard]] std::vector<Violation> validate(const JumpSystem& sys);

/// Throws ValidationError listing all violations.
void require_valid(const JumpSystem& sys);

[[nodiscard]] bool is_metzler(const Matrix& a);

/// True iff every mode matrix is Metzler.
[[nodiscard]] bool is_positive_system(const JumpSystem& sys);

/// Exit rate -Q_ii of mode i.
[[nodiscard]] double exit_rate(const JumpSystem& sys, int mode);

/// Jump distribution Q_ij / (-Q_ii) out of mode i; all zeros for absorbing modes.
[[nodiscard]] Vector jump_probabilities(const JumpSystem& sys, int mode);

std::string to_string(const Violation& v);

}  // namespace mjls
