#include "mjls/config.hpp"
#include "mjls/report.hpp"
#include "mjls/run.hpp"

#include <doctest.h>

#include <sstream>
#include <string>

using namespace mjls;
using nlohmann::json;

namespace {

const std::string kRotations = R"({
  "system": {"modes": [[[0, -1], [1, 0]], [[0, 1], [-1, 0]]],
             "generator": [[-1, 1], [1, -1]]}
})";

json rotations_doc() { return json::parse(kRotations); }

std::string field_of(const std::string& text) {
    try {
        (void)parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

Report round_trip(const Report& r) { return report_from_json(json::parse(to_json(r).dump())); }

}  // namespace

TEST_CASE("config files in the repository parse") {
    const RunConfig cfg = parse_config(std::string(MJLS_CONFIG_DIR) + "/rotations.json");
    CHECK(cfg.system.mode_count() == 2);
    CHECK(cfg.system.state_dim() == 2);
    REQUIRE(cfg.weights.has_value());
    CHECK(cfg.weights->admissibility == Admissibility::SkewSymmetric);

    const RunConfig pair = parse_config(std::string(MJLS_CONFIG_DIR) + "/unstable_pair.json");
    CHECK(pair.m == 2);
    CHECK(pair.optimizer.restarts == 20);
    CHECK(pair.sim.trials == 10000);
    CHECK_THROWS_AS((void)parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("defaults") {
    const RunConfig cfg = parse_config_text(kRotations);
    CHECK_FALSE(cfg.task.has_value());
    CHECK(cfg.p == 1);
    CHECK(cfg.eps == kDefaultHurwitzMargin);
    CHECK(cfg.sim.x0.norm() == doctest::Approx(1.0));
    CHECK(cfg.sim.sample_times.front() == 0.0);
    CHECK(cfg.sim.sample_times.back() == cfg.sim.horizon);
    CHECK(cfg.source == rotations_doc());
}

TEST_CASE("schema errors name the field") {
    json doc = rotations_doc();
    doc["system"].erase("generator");
    try {
        (void)parse_config_json(doc);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "system.generator");
        CHECK(std::string(e.what()).find("missing required field") != std::string::npos);
    }

    doc = rotations_doc();
    doc["system"]["modes"][1] = json::array({json::array({0, 1, 2}), json::array({1, 0, 2})});
    CHECK(field_of(doc.dump()).rfind("system", 0) == 0);

    doc = rotations_doc();
    doc["p"] = 0;
    CHECK(field_of(doc.dump()) == "p");
    doc = rotations_doc();
    doc["task"] = "dance";
    CHECK(field_of(doc.dump()) == "task");
    doc = rotations_doc();
    doc["weights"] = {{"admissibility", "skew"}, {"matrices", {json::array({json::array({0, 1}), json::array({1, 0})})}}};
    CHECK(field_of(doc.dump()).rfind("weights", 0) == 0);
    doc = rotations_doc();
    doc["simulation"] = {{"trials", -3}};
    CHECK(field_of(doc.dump()).rfind("simulation", 0) == 0);
}

TEST_CASE("generator violations carry the row") {
    json doc = rotations_doc();
    doc["system"]["generator"] = json::array({json::array({-1, 0.5}), json::array({1, -1})});
    try {
        (void)parse_config_json(doc);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "system.generator");
        CHECK(std::string(e.what()).find("row 0") != std::string::npos);
    }
}

TEST_CASE("malformed JSON reports a line") {
    try {
        (void)parse_config_text("{\n  \"system\": {\n    \"modes\": [1,,]\n}");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("run reports and their round trip") {
    json doc = rotations_doc();
    doc["weights"] = {{"admissibility", "skew"},
                      {"matrices", {json::array({json::array({0, 1}), json::array({-1, 0})}),
                                    json::array({json::array({0, -1}), json::array({1, 0})})}}};
    doc["optimizer"] = {{"restarts", 2}, {"max_iters", 30}, {"threads", 1}};
    doc["simulation"] = {{"horizon", 4}, {"num_samples", 9}, {"trials", 200}, {"seed", 5}};
    doc["m_range"] = {1, 2};
    RunConfig cfg = parse_config_json(doc);
    std::ostringstream log;

    cfg.task = Task::Certify;
    const RunOutcome certify = run(cfg, log);
    REQUIRE(certify.report.verdict.has_value());
    CHECK(certify.report.verdict->kind == VerdictKind::NotPthMeanStable);
    CHECK(certify.report.certificates.size() == 3);
    CHECK(round_trip(certify.report) == certify.report);
    CHECK(certify.report.input.at("config") == doc);

    cfg.task = Task::Optimize;
    cfg.m = 2;
    const RunOutcome optimize = run(cfg, log);
    REQUIRE(optimize.report.optimization.has_value());
    CHECK(round_trip(optimize.report) == optimize.report);
    CHECK(optimize.report.input.at("effective").at("optimizer").at("seed") == cfg.optimizer.seed);

    cfg.task = Task::Simulate;
    const RunOutcome simulate = run(cfg, log);
    REQUIRE(simulate.report.simulation.has_value());
    CHECK(simulate.report.simulation->no_significant_decay);
    CHECK(round_trip(simulate.report) == simulate.report);

    cfg.task = Task::Sweep;
    const RunOutcome sweep = run(cfg, log);
    REQUIRE(sweep.report.sweep.size() == 2);
    CHECK(sweep.report.sweep[1].best_mu >= sweep.report.sweep[0].best_mu);
    CHECK(round_trip(sweep.report) == sweep.report);

    const json j = to_json(sweep.report);
    for (const char* key : {"input", "task", "verdict", "certificates", "versions", "wall_time"}) {
        CHECK(j.contains(key));
    }
}

TEST_CASE("strict mode maps Inconclusive to its exit code") {
    RunConfig cfg = parse_config_text(kRotations);
    cfg.task = Task::Certify;
    std::ostringstream log;
    CHECK(run(cfg, log).exit_code == kExitOk);
    cfg.strict = true;
    CHECK(run(cfg, log).exit_code == kExitInconclusiveStrict);

    RunConfig none = parse_config_text(kRotations);
    CHECK_THROWS_AS((void)run(none, log), ConfigError);
}

TEST_CASE("CSV output") {
    TrajectoryStats stats;
    stats.times = {0.0, 0.5};
    stats.mean_norm_p = {1.0, 0.25};
    stats.stderr_norm_p = {0.0, 0.125};
    std::ostringstream out;
    write_csv(out, stats);
    CHECK(out.str() == "time,mean_norm_p,stderr\n0,1,0\n0.5,0.25,0.125\n");
}
