#include "mjls/system.hpp"

#include <cmath>
#include <sstream>

namespace mjls {

namespace {

std::string summarize(const std::vector<Violation>& violations) {
    std::ostringstream os;
    os << "invalid jump system (" << violations.size() << " violation"
       << (violations.size() == 1 ? "" : "s") << ")";
    for (const auto& v : violations) {
        os << "\n  - " << to_string(v);
    }
    return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

std::string to_string(const Violation& v) {
    std::ostringstream os;
    os << v.message;
    if (v.mode >= 0) os << " [mode " << v.mode << "]";
    if (v.row >= 0) os << " [row " << v.row << "]";
    if (v.col >= 0) os << " [col " << v.col << "]";
    return os.str();
}

std::vector<Violation> validate(const JumpSystem& sys) {
    std::vector<Violation> out;
    const int modes = sys.mode_count();
    if (modes < 1) {
        out.push_back({"system has no modes"});
    }
    const auto n = modes > 0 ? sys.modes.front().rows() : 0;
    if (modes > 0 && n < 1) {
        out.push_back({"mode matrices are empty", 0});
    }
    for (int i = 0; i < modes; ++i) {
        const Matrix& a = sys.modes[static_cast<std::size_t>(i)];
        if (a.rows() != a.cols()) {
            out.push_back({"mode matrix is not square", i});
        } else if (a.rows() != n) {
            out.push_back({"mode matrix order " + std::to_string(a.rows()) +
                               " differs from state dimension " + std::to_string(n),
                           i});
        }
        if (!a.allFinite()) {
            out.push_back({"mode matrix has non-finite entries", i});
        }
    }

    const Matrix& q = sys.generator;
    if (q.rows() != modes || q.cols() != modes) {
        out.push_back({"generator is " + std::to_string(q.rows()) + "x" + std::to_string(q.cols()) +
                       ", expected " + std::to_string(modes) + "x" + std::to_string(modes)});
        return out;
    }
    for (int r = 0; r < modes; ++r) {
        double sum = 0.0;
        bool finite = true;
        for (int c = 0; c < modes; ++c) {
            const double v = q(r, c);
            if (!std::isfinite(v)) {
                out.push_back({"generator entry is not finite", -1, r, c});
                finite = false;
                continue;
            }
            if (r != c && v < 0.0) {
                out.push_back({"generator off-diagonal entry " + std::to_string(v) + " is negative",
                               -1, r, c});
            }
            sum += v;
        }
        if (finite && std::abs(sum) > kGeneratorRowTol) {
            std::ostringstream os;
            os << "generator row " << r << " sums to " << sum << " (expected 0)";
            out.push_back({os.str(), -1, r});
        }
    }
    return out;
}

void require_valid(const JumpSystem& sys) {
    auto violations = validate(sys);
    if (!violations.empty()) {
        throw ValidationError(std::move(violations));
    }
}

bool is_metzler(const Matrix& a) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            if (r != c && a(r, c) < 0.0) return false;
        }
    }
    return true;
}

bool is_positive_system(const JumpSystem& sys) {
    for (const auto& a : sys.modes) {
        if (!is_metzler(a)) return false;
    }
    return true;
}

double exit_rate(const JumpSystem& sys, int mode) {
    return -sys.generator(mode, mode);
}

Vector jump_probabilities(const JumpSystem& sys, int mode) {
    const auto modes = sys.generator.rows();
    Vector probs = Vector::Zero(modes);
    const double rate = exit_rate(sys, mode);
    if (rate <= 0.0) return probs;
    for (Eigen::Index j = 0; j < modes; ++j) {
        if (j != mode) probs(j) = sys.generator(mode, j) / rate;
    }
    return probs;
}

}  // namespace mjls
