#include "subg/pipeline.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <variant>

namespace subg {

namespace {

const char* const kVerbs[] = {"convert",  "best-convert", "center",
                              "shift",    "sum",          "sum-indep",
                              "max",      "psi-combine",  "chernoff",
                              "martingale-bound", "verify", "tail-curve"};

bool known_verb(const std::string& verb) {
    for (const char* v : kVerbs) {
        if (verb == v) return true;
    }
    return false;
}

void require_object(const Json& j, const std::string& what) {
    if (!j.is_object()) throw SchemaError(what + ": expected a JSON object");
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& what) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw SchemaError(what + ": unknown field \"" + item.key() + "\"");
        }
    }
}

const Json& require_field(const Json& args, const char* key, const std::string& what) {
    if (!args.contains(key)) {
        throw SchemaError(what + ": missing field \"" + key + "\"");
    }
    return args.at(key);
}

std::string arg_string(const Json& args, const char* key, const std::string& what) {
    const Json& v = require_field(args, key, what);
    if (!v.is_string()) {
        throw SchemaError(what + ": field \"" + key + "\" must be a string");
    }
    return v.get<std::string>();
}

double arg_number(const Json& args, const char* key, const std::string& what) {
    const Json& v = require_field(args, key, what);
    if (!v.is_number()) {
        throw SchemaError(what + ": field \"" + key + "\" must be a number");
    }
    return v.get<double>();
}

std::int64_t arg_integer(const Json& args, const char* key, const std::string& what) {
    const Json& v = require_field(args, key, what);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        throw SchemaError(what + ": field \"" + key + "\" must be an integer");
    }
    return v.get<std::int64_t>();
}

std::vector<std::string> arg_name_list(const Json& args, const char* key,
                                       const std::string& what) {
    const Json& v = require_field(args, key, what);
    if (!v.is_array()) {
        throw SchemaError(what + ": field \"" + key + "\" must be an array of names");
    }
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string()) {
            throw SchemaError(what + ": field \"" + key +
                              "\" must contain only strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

using RuntimeValue = std::variant<Certificate, DistributionModel, BoundReport,
                                  std::vector<BoundReport>, VerificationReport>;
using Store = std::map<std::string, RuntimeValue>;

const RuntimeValue& lookup(const Store& store, const std::string& name,
                           const std::string& what) {
    auto it = store.find(name);
    if (it == store.end()) {
        throw ReferenceError(what + ": name \"" + name + "\" is not defined");
    }
    return it->second;
}

Certificate as_certificate(const Store& store, const std::string& name,
                           const std::string& what) {
    const RuntimeValue& v = lookup(store, name, what);
    if (const auto* cert = std::get_if<Certificate>(&v)) return *cert;
    throw SchemaError(what + ": name \"" + name + "\" does not hold a certificate");
}

DistributionModel as_model(const Store& store, const std::string& name,
                           const std::string& what) {
    const RuntimeValue& v = lookup(store, name, what);
    if (const auto* model = std::get_if<DistributionModel>(&v)) return *model;
    throw SchemaError(what + ": name \"" + name + "\" does not hold a model");
}

std::vector<Certificate> gather_certs(const Store& store, const Json& args,
                                      const std::string& what) {
    std::vector<Certificate> certs;
    for (const auto& name : arg_name_list(args, "certs", what)) {
        certs.push_back(as_certificate(store, name, what));
    }
    return certs;
}

SignConstraint arg_regime(const Json& args, const std::string& what) {
    if (!args.contains("regime")) return SignConstraint::Unconstrained;
    return sign_from_name(arg_string(args, "regime", what));
}

std::optional<double> opt_number(const Json& args, const char* key,
                                 const std::string& what) {
    if (!args.contains(key)) return std::nullopt;
    return arg_number(args, key, what);
}

std::vector<double> arg_thresholds(const Json& args, const std::string& what) {
    const Json& v = require_field(args, "thresholds", what);
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& item : v) {
            if (!item.is_number()) {
                throw SchemaError(what + ": field \"thresholds\" must contain "
                                         "only numbers");
            }
            out.push_back(item.get<double>());
        }
        return out;
    }
    if (v.is_object()) {
        reject_unknown_keys(v, {"start", "stop", "count"}, what + ".thresholds");
        const double start = arg_number(v, "start", what + ".thresholds");
        const double stop = arg_number(v, "stop", what + ".thresholds");
        const auto count = arg_integer(v, "count", what + ".thresholds");
        if (count < 1) {
            throw SchemaError(what + ".thresholds: field \"count\" must be >= 1");
        }
        if (count == 1) {
            out.push_back(start);
            return out;
        }
        for (std::int64_t i = 0; i < count; ++i) {
            out.push_back(i == count - 1
                              ? stop
                              : start + (stop - start) * static_cast<double>(i) /
                                            static_cast<double>(count - 1));
        }
        return out;
    }
    throw SchemaError(what + ": field \"thresholds\" must be an array or a "
                             "{start, stop, count} object");
}

MartingaleSpec martingale_spec_from_args(const Json& args, const std::string& what) {
    MartingaleSpec spec;
    spec.assumption = assumption_from_name(arg_string(args, "assumption", what));
    const auto d = arg_integer(args, "d", what);
    if (d < 1 || d > 1000000) {
        throw SchemaError(what + ": field \"d\" must lie in [1, 1000000]");
    }
    spec.dimension = static_cast<int>(d);
    if (args.contains("step_proxies")) {
        const Json& sp = args.at("step_proxies");
        if (!sp.is_array() || sp.empty()) {
            throw SchemaError(what + ": field \"step_proxies\" must be a non-empty "
                                     "array of numbers");
        }
        for (const auto& item : sp) {
            if (!item.is_number()) {
                throw SchemaError(what + ": field \"step_proxies\" must contain "
                                         "only numbers");
            }
            spec.step_proxies.push_back(item.get<double>());
        }
    } else {
        spec.step_proxies = {1.0};
    }
    return spec;
}

struct OpResult {
    RuntimeValue value;
    std::vector<std::string> warnings;
};

OpResult run_op(const Store& store, const PipelineOp& op) {
    const std::string what = "op \"" + op.out + "\" (" + op.verb + ")";
    OpResult result{Certificate{CertKind::Mgf, 1.0, 0.0}, {}};

    if (op.verb == "convert") {
        reject_unknown_keys(op.args, {"cert", "target", "regime", "lambda"}, what);
        const Certificate cert = as_certificate(store, arg_string(op.args, "cert", what), what);
        const CertKind target = kind_from_name(arg_string(op.args, "target", what));
        result.value = direct_convert(cert, target, arg_regime(op.args, what),
                                      opt_number(op.args, "lambda", what));
        return result;
    }

    if (op.verb == "best-convert") {
        reject_unknown_keys(op.args, {"cert", "target", "regime", "objective"}, what);
        const Certificate cert = as_certificate(store, arg_string(op.args, "cert", what), what);
        const CertKind target = kind_from_name(arg_string(op.args, "target", what));
        const Json& jo = require_field(op.args, "objective", what);
        require_object(jo, what + ".objective");
        const std::string type = arg_string(jo, "type", what + ".objective");
        Objective objective;
        if (type == "min-var-proxy") {
            reject_unknown_keys(jo, {"type"}, what + ".objective");
            objective = Objective::min_var_proxy();
        } else if (type == "min-prefactor") {
            reject_unknown_keys(jo, {"type", "cap"}, what + ".objective");
            objective = Objective::min_prefactor(
                opt_number(jo, "cap", what + ".objective"));
        } else if (type == "min-tail-at") {
            reject_unknown_keys(jo, {"type", "t"}, what + ".objective");
            objective = Objective::min_tail_at(arg_number(jo, "t", what + ".objective"));
        } else {
            throw SchemaError(what + ".objective: unknown type \"" + type +
                              "\" (expected min-var-proxy|min-prefactor|min-tail-at)");
        }
        BestConversion best = best_convert(cert, target, arg_regime(op.args, what),
                                           objective);
        if (best.path.at_lambda_bound) {
            result.warnings.push_back(what + ": a route lambda landed on the open-"
                                             "interval search clamp");
        }
        result.value = best.certificate;
        return result;
    }

    if (op.verb == "center") {
        reject_unknown_keys(op.args, {"cert", "regime", "mean_is_zero", "route"}, what);
        const Certificate cert = as_certificate(store, arg_string(op.args, "cert", what), what);
        VariableContext ctx;
        ctx.sign = arg_regime(op.args, what);
        ctx.mean_is_zero = true;
        if (op.args.contains("mean_is_zero")) {
            if (!op.args.at("mean_is_zero").is_boolean()) {
                throw SchemaError(what + ": field \"mean_is_zero\" must be a boolean");
            }
            ctx.mean_is_zero = op.args.at("mean_is_zero").get<bool>();
        }
        std::string route = "direct";
        if (op.args.contains("route")) route = arg_string(op.args, "route", what);
        if (route == "direct") {
            result.value = center(cert, ctx).certificate;
        } else if (route == "best") {
            result.value = center_via_best_route(cert, ctx).best.certificate;
        } else {
            throw SchemaError(what + ": field \"route\" must be direct|best");
        }
        return result;
    }

    if (op.verb == "shift") {
        reject_unknown_keys(op.args, {"cert", "c", "x", "t"}, what);
        const Certificate cert = as_certificate(store, arg_string(op.args, "cert", what), what);
        ShiftParams params;
        params.c = arg_number(op.args, "c", what);
        if (op.args.contains("x")) {
            const Json& jx = op.args.at("x");
            if (jx.is_string()) {
                if (jx.get<std::string>() != "auto") {
                    throw SchemaError(what + ": field \"x\" must be a number or "
                                             "\"auto\"");
                }
            } else if (jx.is_number()) {
                params.x = jx.get<double>();
            } else {
                throw SchemaError(what + ": field \"x\" must be a number or \"auto\"");
            }
        }
        params.threshold = opt_number(op.args, "t", what);
        ShiftResult shifted = shift(cert, params);
        if (shifted.x_at_bound) {
            result.warnings.push_back(what + ": automatic x landed on the (0, 64] "
                                             "search boundary");
        }
        result.value = shifted.certificate;
        return result;
    }

    if (op.verb == "sum" || op.verb == "sum-indep" || op.verb == "max") {
        reject_unknown_keys(op.args, {"certs"}, what);
        const std::vector<Certificate> certs = gather_certs(store, op.args, what);
        if (op.verb == "sum") result.value = sum_dependent(certs);
        else if (op.verb == "sum-indep") result.value = sum_independent(certs);
        else result.value = max_of(certs);
        return result;
    }

    if (op.verb == "psi-combine") {
        reject_unknown_keys(op.args, {"certs", "mode"}, what);
        const std::vector<Certificate> certs = gather_certs(store, op.args, what);
        result.value = psi_combine(
            certs, psi_combine_mode_from_name(arg_string(op.args, "mode", what)));
        return result;
    }

    if (op.verb == "chernoff") {
        reject_unknown_keys(op.args, {"cert", "t", "side"}, what);
        const Certificate cert = as_certificate(store, arg_string(op.args, "cert", what), what);
        TailSide side = TailSide::Upper;
        if (op.args.contains("side")) {
            side = tail_side_from_name(arg_string(op.args, "side", what));
        }
        result.value = chernoff_tail(cert, arg_number(op.args, "t", what), side);
        return result;
    }

    if (op.verb == "martingale-bound") {
        reject_unknown_keys(
            op.args, {"assumption", "d", "lambda", "threshold", "step_proxies", "eps", "x"},
            what);
        const MartingaleSpec spec = martingale_spec_from_args(op.args, what);
        const bool has_lambda = op.args.contains("lambda");
        const bool has_threshold = op.args.contains("threshold");
        if (has_lambda == has_threshold) {
            throw SchemaError(what + ": exactly one of \"lambda\" (normalized) and "
                                     "\"threshold\" (absolute) is required");
        }
        const double lambda =
            has_lambda ? arg_number(op.args, "lambda", what)
                       : arg_number(op.args, "threshold", what) /
                             std::sqrt(total_proxy(spec));
        result.value = martingale_norm_bound(spec, lambda,
                                             opt_number(op.args, "eps", what),
                                             opt_number(op.args, "x", what));
        return result;
    }

    if (op.verb == "verify") {
        reject_unknown_keys(op.args, {"model", "cert", "probes", "mc_samples", "seed"},
                            what);
        const DistributionModel model =
            as_model(store, arg_string(op.args, "model", what), what);
        const Certificate cert = as_certificate(store, arg_string(op.args, "cert", what), what);
        VerificationBudget budget;
        if (op.args.contains("probes")) {
            budget.probes = static_cast<int>(arg_integer(op.args, "probes", what));
        }
        if (op.args.contains("mc_samples")) {
            budget.mc_samples = arg_integer(op.args, "mc_samples", what);
        }
        if (op.args.contains("seed")) {
            const auto seed = arg_integer(op.args, "seed", what);
            if (seed < 0) {
                throw SchemaError(what + ": field \"seed\" must be a non-negative "
                                         "integer");
            }
            budget.seed = static_cast<std::uint64_t>(seed);
        }
        result.value = verify_certificate(model, cert, budget);
        return result;
    }

    if (op.verb == "tail-curve") {
        reject_unknown_keys(op.args, {"cert", "martingale", "thresholds", "side",
                                      "eps", "x"},
                            what);
        const std::vector<double> thresholds = arg_thresholds(op.args, what);
        const bool has_cert = op.args.contains("cert");
        const bool has_mart = op.args.contains("martingale");
        if (has_cert == has_mart) {
            throw SchemaError(what + ": exactly one of \"cert\" and \"martingale\" "
                                     "is required");
        }
        if (has_cert) {
            reject_unknown_keys(op.args, {"cert", "thresholds", "side"}, what);
            const Certificate cert =
                as_certificate(store, arg_string(op.args, "cert", what), what);
            TailSide side = TailSide::Upper;
            if (op.args.contains("side")) {
                side = tail_side_from_name(arg_string(op.args, "side", what));
            }
            result.value = tail_curve(cert, thresholds, side);
        } else {
            const Json& jm = op.args.at("martingale");
            require_object(jm, what + ".martingale");
            reject_unknown_keys(jm, {"assumption", "d", "step_proxies"},
                                what + ".martingale");
            const MartingaleSpec spec =
                martingale_spec_from_args(jm, what + ".martingale");
            result.value = tail_curve(spec, thresholds,
                                      opt_number(op.args, "eps", what),
                                      opt_number(op.args, "x", what));
        }
        return result;
    }

    throw SchemaError(what + ": unknown verb \"" + op.verb + "\"");
}

} // namespace

PipelineDoc parse_pipeline(const Json& j) {
    require_object(j, "document");
    reject_unknown_keys(j, {"version", "vars", "ops", "outputs"}, "document");

    PipelineDoc doc;
    if (!j.contains("version") || !j.at("version").is_string()) {
        throw SchemaError("document: field \"version\" must be a string");
    }
    doc.version = j.at("version").get<std::string>();
    if (doc.version != "1") {
        throw SchemaError("document: unsupported version \"" + doc.version +
                          "\" (expected \"1\")");
    }

    if (j.contains("vars")) {
        require_object(j.at("vars"), "document.vars");
        for (const auto& item : j.at("vars").items()) {
            if (item.key().empty()) {
                throw SchemaError("document.vars: names must be non-empty");
            }
            require_object(item.value(), "document.vars." + item.key());
            const bool has_kind = item.value().contains("kind");
            const bool has_family = item.value().contains("family");
            if (has_kind == has_family) {
                throw SchemaError("document.vars." + item.key() +
                                  ": must hold either a certificate (\"kind\") or a "
                                  "model (\"family\")");
            }
            doc.vars[item.key()] = item.value();
        }
    }

    if (j.contains("ops")) {
        if (!j.at("ops").is_array()) {
            throw SchemaError("document: field \"ops\" must be an array");
        }
        std::size_t index = 0;
        for (const auto& jop : j.at("ops")) {
            const std::string where = "document.ops[" + std::to_string(index) + "]";
            require_object(jop, where);
            reject_unknown_keys(jop, {"verb", "args", "out"}, where);
            PipelineOp op;
            if (!jop.contains("verb") || !jop.at("verb").is_string()) {
                throw SchemaError(where + ": field \"verb\" must be a string");
            }
            op.verb = jop.at("verb").get<std::string>();
            if (!known_verb(op.verb)) {
                throw SchemaError(where + ": unknown verb \"" + op.verb + "\"");
            }
            if (!jop.contains("out") || !jop.at("out").is_string() ||
                jop.at("out").get<std::string>().empty()) {
                throw SchemaError(where + ": field \"out\" must be a non-empty string");
            }
            op.out = jop.at("out").get<std::string>();
            op.args = Json::object();
            if (jop.contains("args")) {
                require_object(jop.at("args"), where + ".args");
                op.args = jop.at("args");
            }
            doc.ops.push_back(std::move(op));
            ++index;
        }
    }

    if (j.contains("outputs")) {
        if (!j.at("outputs").is_array()) {
            throw SchemaError("document: field \"outputs\" must be an array");
        }
        for (const auto& item : j.at("outputs")) {
            if (!item.is_string() || item.get<std::string>().empty()) {
                throw SchemaError("document.outputs: entries must be non-empty "
                                  "strings");
            }
            doc.outputs.push_back(item.get<std::string>());
        }
    }

    // Names are single-assignment across vars and op results.
    std::map<std::string, bool> seen;
    for (const auto& [name, unused] : doc.vars) seen[name] = true;
    for (const auto& op : doc.ops) {
        if (seen.count(op.out)) {
            throw SchemaError("document: duplicate name \"" + op.out + "\"");
        }
        seen[op.out] = true;
    }
    return doc;
}

RunReport run_pipeline(const PipelineDoc& doc) {
    Store store;
    for (const auto& [name, jvar] : doc.vars) {
        if (jvar.contains("kind")) {
            store.emplace(name, certificate_from_json(jvar));
        } else {
            store.emplace(name, model_from_json(jvar));
        }
    }

    RunReport report;
    for (const auto& op : doc.ops) {
        OpResult r = run_op(store, op);
        for (auto& w : r.warnings) report.warnings.push_back(std::move(w));
        store.insert_or_assign(op.out, std::move(r.value));
    }

    for (const auto& name : doc.outputs) {
        const RuntimeValue& v = lookup(store, name, "document.outputs");
        report.outputs[name] =
            std::visit([](const auto& value) { return to_json(value); }, v);
    }
    return report;
}

std::string render_report(const RunReport& report, bool pretty) {
    Json root;
    root["outputs"] = report.outputs;
    root["warnings"] = report.warnings;
    return (pretty ? root.dump(2) : root.dump()) + "\n";
}

void emit_curve_csv(const std::vector<BoundReport>& curve, const std::string& path) {
    if (curve.empty()) {
        throw DomainError("emit_curve_csv: curve must be non-empty");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("emit_curve_csv: cannot open \"" + path + "\" for writing");
    }
    out << "threshold,raw_bound,clamped\n";
    char buf[128];
    for (const auto& r : curve) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r.threshold,
                      r.raw_bound, r.clamped);
        out << buf;
    }
    out.flush();
    if (!out) {
        throw IoError("emit_curve_csv: write failed for \"" + path + "\"");
    }
}

} // namespace subg
