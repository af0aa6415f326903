#pragma once

#include <map>
#include <string>
#include <vector>

#include "subg/serialize.hpp"

namespace subg {

// =====================================================================
// Pipeline documents
// =====================================================================
//
// A document declares named inputs (certificates and reference models),
// a list of ops threaded through named results, and which names to print:
//
//   {
//     "version": "1",
//     "vars": {
//       "c0": {"kind": "mgf", "sigma_sq": 1.0, "log_rho": 0.0},
//       "g":  {"family": "gaussian", "mean": 0.0, "sd": 1.0}
//     },
//     "ops": [
//       {"verb": "convert", "args": {"cert": "c0", "target": "psi",
//        "lambda": 0.5}, "out": "c1"}
//     ],
//     "outputs": ["c1"]
//   }
//
// Verbs: convert, best-convert, center, shift, sum, sum-indep, max,
// psi-combine, chernoff, martingale-bound, verify, tail-curve.

struct PipelineOp {
    std::string verb;
    Json args;
    std::string out;
};

struct PipelineDoc {
    std::string version;
    std::map<std::string, Json> vars; // raw JSON; typed on first use
    std::vector<PipelineOp> ops;
    std::vector<std::string> outputs;
};

/// Structural validation only; numeric domain checks happen when ops run.
/// Throws SchemaError naming the offending field.
PipelineDoc parse_pipeline(const Json& j);

struct RunReport {
    Json outputs = Json::object();    // one entry per requested name
    std::vector<std::string> warnings;
};

/// Executes the ops in order. Deterministic: rerunning the same document
/// yields byte-identical rendered output.
RunReport run_pipeline(const PipelineDoc& doc);

/// Stable rendering of a run report ({"outputs": ..., "warnings": ...}).
std::string render_report(const RunReport& report, bool pretty);

/// Writes "threshold,raw_bound,clamped" rows with 17 significant digits and
/// LF line endings. Refuses an empty curve; IoError if the file cannot open.
void emit_curve_csv(const std::vector<BoundReport>& curve, const std::string& path);

} // namespace subg
