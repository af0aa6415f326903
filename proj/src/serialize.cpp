#include "subg/serialize.hpp"

#include <cmath>
#include <limits>

namespace subg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_object(const Json& j, const char* what) {
    if (!j.is_object()) {
        throw SchemaError(std::string(what) + ": expected a JSON object");
    }
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const char* what) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw SchemaError(std::string(what) + ": unknown field \"" + item.key() +
                              "\"");
        }
    }
}

double require_number(const Json& j, const char* key, const char* what) {
    if (!j.contains(key)) {
        throw SchemaError(std::string(what) + ": missing field \"" + key + "\"");
    }
    if (!j.at(key).is_number()) {
        throw SchemaError(std::string(what) + ": field \"" + key +
                          "\" must be a number");
    }
    return j.at(key).get<double>();
}

std::string require_string(const Json& j, const char* key, const char* what) {
    if (!j.contains(key)) {
        throw SchemaError(std::string(what) + ": missing field \"" + key + "\"");
    }
    if (!j.at(key).is_string()) {
        throw SchemaError(std::string(what) + ": field \"" + key +
                          "\" must be a string");
    }
    return j.at(key).get<std::string>();
}

} // namespace

Json to_json(const Certificate& cert) {
    Json j;
    j["kind"] = kind_name(cert.kind);
    j["sigma_sq"] = cert.var_proxy;
    if (cert.log_prefactor == -kInf) {
        j["log_rho"] = nullptr;
    } else {
        j["log_rho"] = cert.log_prefactor;
    }
    return j;
}

Certificate certificate_from_json(const Json& j) {
    require_object(j, "certificate");
    reject_unknown_keys(j, {"kind", "sigma_sq", "log_rho"}, "certificate");
    Certificate cert{kind_from_name(require_string(j, "kind", "certificate")),
                     require_number(j, "sigma_sq", "certificate"), 0.0};
    if (!j.contains("log_rho")) {
        throw SchemaError("certificate: missing field \"log_rho\"");
    }
    if (j.at("log_rho").is_null()) {
        cert.log_prefactor = -kInf;
    } else if (j.at("log_rho").is_number()) {
        cert.log_prefactor = j.at("log_rho").get<double>();
    } else {
        throw SchemaError("certificate: field \"log_rho\" must be a number or null");
    }
    validate(cert);
    return cert;
}

Json to_json(const DistributionModel& model) {
    Json j;
    j["family"] = family_name(model);
    std::visit(
        [&j](const auto& m) {
            using Fam = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<Fam, GaussianModel>) {
                j["mean"] = m.mean;
                j["sd"] = m.sd;
            } else if constexpr (std::is_same_v<Fam, RademacherModel>) {
                j["scale"] = m.scale;
            } else if constexpr (std::is_same_v<Fam, UniformModel>) {
                j["a"] = m.a;
                j["b"] = m.b;
            } else {
                j["p"] = m.p;
                j["scale"] = m.scale;
            }
        },
        model.family);
    return j;
}

DistributionModel model_from_json(const Json& j) {
    require_object(j, "model");
    const std::string family = require_string(j, "family", "model");
    DistributionModel model;
    if (family == "gaussian") {
        reject_unknown_keys(j, {"family", "mean", "sd"}, "model");
        model.family = GaussianModel{require_number(j, "mean", "model"),
                                     require_number(j, "sd", "model")};
    } else if (family == "rademacher") {
        reject_unknown_keys(j, {"family", "scale"}, "model");
        model.family = RademacherModel{require_number(j, "scale", "model")};
    } else if (family == "uniform") {
        reject_unknown_keys(j, {"family", "a", "b"}, "model");
        model.family = UniformModel{require_number(j, "a", "model"),
                                    require_number(j, "b", "model")};
    } else if (family == "centered-bernoulli") {
        reject_unknown_keys(j, {"family", "p", "scale"}, "model");
        model.family = CenteredBernoulliModel{require_number(j, "p", "model"),
                                              require_number(j, "scale", "model")};
    } else {
        throw SchemaError("model: unknown family \"" + family +
                          "\" (expected gaussian|rademacher|uniform|centered-bernoulli)");
    }
    validate(model);
    return model;
}

Json to_json(const BoundReport& report) {
    Json j;
    j["threshold"] = report.threshold;
    j["raw_bound"] = report.raw_bound;
    j["log_raw_bound"] = report.log_raw_bound;
    j["clamped"] = report.clamped;
    Json params = Json::object();
    if (report.param_x.has_value()) params["x"] = *report.param_x;
    if (report.param_epsilon.has_value()) params["epsilon"] = *report.param_epsilon;
    j["params"] = params;
    return j;
}

Json to_json(const std::vector<BoundReport>& curve) {
    Json j = Json::array();
    for (const auto& r : curve) j.push_back(to_json(r));
    return j;
}

Json to_json(const VerificationReport& report) {
    Json j;
    j["certificate"] = to_json(report.certificate);
    j["violations"] = report.violations;
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        Json jc;
        jc["probe"] = c.probe;
        jc["bound"] = c.bound;
        jc["observed"] = c.observed;
        jc["slack_std_errors"] = c.slack_std_errors;
        jc["violation"] = c.violation;
        jc["method"] = probe_method_name(c.method);
        checks.push_back(jc);
    }
    j["checks"] = checks;
    return j;
}

Json to_json(const ConversionPath& path) {
    Json j;
    j["route"] = path.text();
    j["lambdas"] = path.lambdas;
    j["c_sq_total"] = path.c_sq_total;
    j["at_lambda_bound"] = path.at_lambda_bound;
    return j;
}

Json to_json(const CenteringResult& result) {
    Json j;
    j["certificate"] = to_json(result.certificate);
    j["branch"] = branch_name(result.branch);
    return j;
}

} // namespace subg
