#include "mjls/report.hpp"

#include "mjls/config.hpp"

#include <iomanip>
#include <limits>
#include <stdexcept>

namespace mjls {

using nlohmann::json;

namespace {

Admissibility admissibility_from_string(const std::string& s) {
    for (auto a : {Admissibility::SkewSymmetric, Admissibility::Identity, Admissibility::UserAsserted}) {
        if (to_string(a) == s) return a;
    }
    throw std::invalid_argument("unknown admissibility '" + s + "'");
}

CertificateKind certificate_kind_from_string(const std::string& s) {
    for (auto k : {CertificateKind::MeanSquare, CertificateKind::UnweightedT, CertificateKind::WeightedT}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown certificate kind '" + s + "'");
}

json vectors_to_json(const std::vector<Vector>& vs) {
    json out = json::array();
    for (const auto& v : vs) out.push_back(vector_to_json(v));
    return out;
}

std::vector<Vector> vectors_from_json(const json& j, const std::string& field) {
    std::vector<Vector> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(vector_from_json(j[k], field + "[" + std::to_string(k) + "]"));
    }
    return out;
}

}  // namespace

VerdictKind verdict_kind_from_string(const std::string& s) {
    for (auto k : {VerdictKind::MeanSquareStable, VerdictKind::PthMeanStableCertified,
                   VerdictKind::NotPthMeanStable, VerdictKind::Inconclusive}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

json to_json(const WeightSet& w) {
    json mats = json::array();
    for (const auto& m : w.weights) mats.push_back(matrix_to_json(m));
    return {{"order", w.order}, {"admissibility", to_string(w.admissibility)}, {"matrices", mats}};
}

WeightSet weight_set_from_json(const json& j) {
    WeightSet w;
    w.order = j.at("order").get<int>();
    w.admissibility = admissibility_from_string(j.at("admissibility").get<std::string>());
    const auto& mats = j.at("matrices");
    for (std::size_t k = 0; k < mats.size(); ++k) {
        w.weights.push_back(matrix_from_json(mats[k], "matrices[" + std::to_string(k) + "]"));
    }
    return w;
}

json to_json(const CertificateReport& r) {
    json out = {{"kind", to_string(r.kind)},
                {"p", r.p},
                {"mu", r.mu},
                {"dominant_eigenvalue", {{"re", r.dominant_eigenvalue.real()},
                                         {"im", r.dominant_eigenvalue.imag()}}},
                {"hurwitz", r.hurwitz},
                {"order", r.order}};
    if (r.weights) out["weights"] = to_json(*r.weights);
    return out;
}

CertificateReport certificate_report_from_json(const json& j) {
    CertificateReport r;
    r.kind = certificate_kind_from_string(j.at("kind").get<std::string>());
    r.p = j.at("p").get<int>();
    r.mu = j.at("mu").get<double>();
    const auto& ev = j.at("dominant_eigenvalue");
    r.dominant_eigenvalue = Complex(ev.at("re").get<double>(), ev.at("im").get<double>());
    r.hurwitz = j.at("hurwitz").get<bool>();
    r.order = j.at("order").get<std::size_t>();
    if (j.contains("weights")) r.weights = weight_set_from_json(j.at("weights"));
    return r;
}

json to_json(const StabilityVerdict& v) {
    return {{"kind", to_string(v.kind)},
            {"p", v.p},
            {"conditional", v.conditional},
            {"evidence", to_json(v.evidence)}};
}

StabilityVerdict verdict_from_json(const json& j) {
    StabilityVerdict v;
    v.kind = verdict_kind_from_string(j.at("kind").get<std::string>());
    v.p = j.at("p").get<int>();
    v.conditional = j.at("conditional").get<bool>();
    v.evidence = certificate_report_from_json(j.at("evidence"));
    return v;
}

json to_json(const OptimResult& r) {
    return {{"order", r.order},
            {"p", r.p},
            {"best_params", {{"order", r.best_params.order},
                             {"modes", r.best_params.modes},
                             {"values", vector_to_json(r.best_params.values)}}},
            {"best_mu", r.best_mu},
            {"verified_mu", r.verified_mu},
            {"best_weights", to_json(r.best_weights)},
            {"mu_trace", r.mu_trace},
            {"iterations", r.iterations},
            {"wall_time", r.wall_time}};
}

OptimResult optim_result_from_json(const json& j) {
    OptimResult r;
    r.order = j.at("order").get<int>();
    r.p = j.at("p").get<int>();
    const auto& bp = j.at("best_params");
    r.best_params.order = bp.at("order").get<int>();
    r.best_params.modes = bp.at("modes").get<int>();
    r.best_params.values = vector_from_json(bp.at("values"), "best_params.values");
    r.best_mu = j.at("best_mu").get<double>();
    r.verified_mu = j.at("verified_mu").get<double>();
    r.best_weights = weight_set_from_json(j.at("best_weights"));
    r.mu_trace = j.at("mu_trace").get<std::vector<std::vector<double>>>();
    r.iterations = j.at("iterations").get<int>();
    r.wall_time = j.at("wall_time").get<double>();
    return r;
}

json to_json(const TrajectoryStats& s) {
    return {{"times", s.times},
            {"mean_norm_p", s.mean_norm_p},
            {"stderr_norm_p", s.stderr_norm_p},
            {"lifted_moment", vectors_to_json(s.lifted_moment)},
            {"lifted_stderr", vectors_to_json(s.lifted_stderr)},
            {"mode_occupancy", vectors_to_json(s.mode_occupancy)},
            {"occupancy_stderr", vectors_to_json(s.occupancy_stderr)},
            {"trials_used", s.trials_used}};
}

TrajectoryStats trajectory_stats_from_json(const json& j) {
    TrajectoryStats s;
    s.times = j.at("times").get<std::vector<double>>();
    s.mean_norm_p = j.at("mean_norm_p").get<std::vector<double>>();
    s.stderr_norm_p = j.at("stderr_norm_p").get<std::vector<double>>();
    s.lifted_moment = vectors_from_json(j.at("lifted_moment"), "lifted_moment");
    s.lifted_stderr = vectors_from_json(j.at("lifted_stderr"), "lifted_stderr");
    s.mode_occupancy = vectors_from_json(j.at("mode_occupancy"), "mode_occupancy");
    s.occupancy_stderr = vectors_from_json(j.at("occupancy_stderr"), "occupancy_stderr");
    s.trials_used = j.at("trials_used").get<int>();
    return s;
}

json to_json(const Report& r) {
    json certs = json::array();
    for (const auto& c : r.certificates) certs.push_back(to_json(c));
    json out = {{"input", r.input},
                {"task", r.task},
                {"verdict", r.verdict ? to_json(*r.verdict) : json(nullptr)},
                {"certificates", certs},
                {"versions", r.versions},
                {"wall_time", r.wall_time}};
    if (r.optimization) out["optimization"] = to_json(*r.optimization);
    if (r.simulation) {
        out["simulation"] = {{"p", r.simulation->p},
                             {"window", r.simulation->window},
                             {"no_significant_decay", r.simulation->no_significant_decay},
                             {"stats", to_json(r.simulation->stats)}};
    }
    if (!r.sweep.empty()) {
        json rows = json::array();
        for (const auto& row : r.sweep) {
            rows.push_back({{"m", row.m}, {"best_mu", row.best_mu}, {"verdict", to_string(row.verdict)}});
        }
        out["sweep"] = rows;
    }
    return out;
}

Report report_from_json(const json& j) {
    Report r;
    r.input = j.at("input");
    r.task = j.at("task").get<std::string>();
    if (!j.at("verdict").is_null()) r.verdict = verdict_from_json(j.at("verdict"));
    for (const auto& c : j.at("certificates")) r.certificates.push_back(certificate_report_from_json(c));
    r.versions = j.at("versions");
    r.wall_time = j.at("wall_time").get<double>();
    if (j.contains("optimization")) r.optimization = optim_result_from_json(j.at("optimization"));
    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        SimulationSummary summary;
        summary.p = s.at("p").get<int>();
        summary.window = s.at("window").get<double>();
        summary.no_significant_decay = s.at("no_significant_decay").get<bool>();
        summary.stats = trajectory_stats_from_json(s.at("stats"));
        r.simulation = std::move(summary);
    }
    if (j.contains("sweep")) {
        for (const auto& row : j.at("sweep")) {
            r.sweep.push_back({row.at("m").get<int>(), row.at("best_mu").get<double>(),
                               verdict_kind_from_string(row.at("verdict").get<std::string>())});
        }
    }
    return r;
}

void write_csv(std::ostream& out, const TrajectoryStats& stats) {
    out << "time,mean_norm_p,stderr\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < stats.times.size(); ++k) {
        out << stats.times[k] << ',' << stats.mean_norm_p[k] << ',' << stats.stderr_norm_p[k] << '\n';
    }
}

}  // namespace mjls
