#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "deconvar/errors.hpp"
#include "deconvar/monte_carlo.hpp"

// JSON bindings for the configuration and report types.  Malformed documents
// raise nlohmann exceptions whose messages name the offending field; callers
// translate those into configuration errors.

namespace deconvar {

using nlohmann::json;

inline std::string error_kind_name(ErrorKind k) {
    return k == ErrorKind::Laplace ? "laplace" : "gaussian";
}

inline ErrorKind error_kind_from_name(const std::string& s) {
    if (s == "laplace") return ErrorKind::Laplace;
    if (s == "gaussian") return ErrorKind::Gaussian;
    throw ConfigError("unknown error law '" + s + "' (expected laplace or gaussian)");
}

inline std::string weight_base_name(WeightBase b) { return b == WeightBase::N ? "n" : "sc"; }

inline WeightBase weight_base_from_name(const std::string& s) {
    if (s == "n") return WeightBase::N;
    if (s == "sc") return WeightBase::SC;
    throw ConfigError("unknown weight '" + s + "' (expected n or sc)");
}

inline void to_json(json& j, const ErrorModel& m) {
    j = json{{"kind", error_kind_name(m.kind)}, {"sigma_eps", m.sigma_eps}};
}

inline void from_json(const json& j, ErrorModel& m) {
    m.kind = error_kind_from_name(j.at("kind").get<std::string>());
    m.sigma_eps = j.at("sigma_eps").get<double>();
}

inline void to_json(json& j, const InnovationModel& m) {
    if (m.kind == InnovationKind::TwoPoint)
        j = json{{"kind", "two_point"}, {"c", m.param}};
    else
        j = json{{"kind", "gaussian"}, {"sigma_xi", m.param}};
}

inline void from_json(const json& j, InnovationModel& m) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "two_point") {
        m.kind = InnovationKind::TwoPoint;
        m.param = j.at("c").get<double>();
    } else if (kind == "gaussian") {
        m.kind = InnovationKind::Gaussian;
        m.param = j.at("sigma_xi").get<double>();
    } else {
        throw ConfigError("unknown innovation kind '" + kind + "'");
    }
}

inline void to_json(json& j, const RegressionModel& m) {
    if (m.family == RegressionFamily::Linear)
        j = json{{"family", "linear"}, {"a", m.p0}, {"b", m.p1}};
    else
        j = json{{"family", "cauchy"}, {"theta", m.p0}};
}

inline void from_json(const json& j, RegressionModel& m) {
    const auto family = j.at("family").get<std::string>();
    if (family == "linear")
        m = RegressionModel::linear(j.at("a").get<double>(), j.at("b").get<double>());
    else if (family == "cauchy")
        m = RegressionModel::cauchy(j.at("theta").get<double>());
    else
        throw ConfigError("unknown regression family '" + family + "'");
}

inline void to_json(json& j, const Scenario& s) {
    json init;
    if (s.init == InitKind::UniformUnit)
        init = json{{"kind", "uniform_unit"}};
    else
        init = json{{"kind", "fixed"}, {"value", s.init_value}};
    j = json{{"regression", s.regression}, {"innovation", s.innovation}, {"error", s.error},
             {"init", init},             {"burn_in", s.burn_in},        {"n", s.n}};
}

inline void from_json(const json& j, Scenario& s) {
    s.regression = j.at("regression").get<RegressionModel>();
    s.innovation = j.at("innovation").get<InnovationModel>();
    s.error = j.at("error").get<ErrorModel>();
    const auto& init = j.at("init");
    const auto kind = init.at("kind").get<std::string>();
    if (kind == "uniform_unit") {
        s.init = InitKind::UniformUnit;
        s.init_value = 0.0;
    } else if (kind == "fixed") {
        s.init = InitKind::FixedValue;
        s.init_value = init.at("value").get<double>();
    } else {
        throw ConfigError("unknown init kind '" + kind + "'");
    }
    s.burn_in = j.at("burn_in").get<long>();
    s.n = j.at("n").get<long>();
    s.validate();
}

inline void to_json(json& j, const MCConfig& cfg) {
    j = json{{"preset", cfg.preset},
             {"n", cfg.n},
             {"s2n", cfg.s2n},
             {"error", error_kind_name(cfg.error_kind)},
             {"reps", cfg.reps},
             {"seed", cfg.master_seed},
             {"points", cfg.setup.points},
             {"t_max", cfg.setup.t_max_override},
             {"mode", cfg.setup.mode == EvalMode::ClosedForm ? "closed" : "numeric"},
             {"general_weight", weight_base_name(cfg.setup.general_weight)},
             {"general_delta", cfg.setup.general_delta},
             {"threads", cfg.threads}};
    if (std::isinf(cfg.setup.general_cn))
        j["general_cn"] = nullptr;
    else
        j["general_cn"] = cfg.setup.general_cn;
    json est = json::array();
    for (const auto tag : cfg.estimators) est.push_back(estimator_name(tag));
    j["estimators"] = est;
    if (cfg.scenario) j["scenario"] = *cfg.scenario;
}

inline void from_json(const json& j, MCConfig& cfg) {
    cfg.preset = j.value("preset", std::string("case-a"));
    cfg.n = j.value("n", 1000L);
    cfg.s2n = j.value("s2n", 0.5);
    cfg.error_kind = error_kind_from_name(j.value("error", std::string("laplace")));
    cfg.reps = j.value("reps", 100);
    cfg.master_seed = j.value("seed", std::uint64_t{1});
    cfg.setup.points = j.value("points", 4096L);
    cfg.setup.t_max_override = j.value("t_max", 0.0);
    const auto mode = j.value("mode", std::string("closed"));
    if (mode != "closed" && mode != "numeric")
        throw ConfigError("unknown mode '" + mode + "' (expected closed or numeric)");
    cfg.setup.mode = mode == "closed" ? EvalMode::ClosedForm : EvalMode::NumericGrid;
    cfg.setup.general_weight = weight_base_from_name(j.value("general_weight", std::string("sc")));
    cfg.setup.general_delta = j.value("general_delta", 0.0);
    if (j.contains("general_cn") && !j.at("general_cn").is_null())
        cfg.setup.general_cn = j.at("general_cn").get<double>();
    else
        cfg.setup.general_cn = std::numeric_limits<double>::infinity();
    cfg.threads = j.value("threads", 0);
    cfg.estimators.clear();
    if (j.contains("estimators"))
        for (const auto& name : j.at("estimators"))
            cfg.estimators.push_back(estimator_from_name(name.get<std::string>()));
    if (j.contains("scenario"))
        cfg.scenario = j.at("scenario").get<Scenario>();
    else
        cfg.scenario.reset();
}

inline void to_json(json& j, const EstimateRecord& rec) {
    j = json{{"estimator", estimator_name(rec.tag)},
             {"family", rec.family == RegressionFamily::Linear ? "linear" : "cauchy"},
             {"theta", rec.theta_hat},
             {"diagnostics", rec.diagnostics}};
}

inline void to_json(json& j, const EstimatorSummary& s) {
    j = json{{"estimator", estimator_name(s.tag)},
             {"reps_used", s.reps_used},
             {"failures", s.failures},
             {"failed_reps", s.failed_reps},
             {"success_reps", s.success_reps},
             {"mean", s.mean},
             {"bias", s.bias},
             {"mse", s.mse},
             {"estimates", s.estimates}};
}

inline void to_json(json& j, const MCReport& report) {
    // wall_seconds stays out: reports must be byte-identical across reruns
    j = json{{"config", report.config},
             {"coords", report.coords},
             {"theta0", report.theta0},
             {"estimators", report.estimators}};
}

} // namespace deconvar
