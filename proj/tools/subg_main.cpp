// subg: command-line front end for the certificate toolkit.
//
// Exit codes: 0 success, 2 malformed document, 3 unresolved name,
// 4 domain violation, 5 filesystem failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "subg/convert.hpp"
#include "subg/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw subg::IoError("cannot open \"" + path + "\" for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw subg::IoError("read failed for \"" + path + "\"");
    }
    return buf.str();
}

bool looks_like_curve(const subg::Json& value) {
    return value.is_array() && !value.empty() && value.front().is_object() &&
           value.front().contains("threshold") &&
           value.front().contains("raw_bound");
}

std::vector<subg::BoundReport> curve_from_json(const subg::Json& value) {
    std::vector<subg::BoundReport> curve;
    for (const auto& item : value) {
        subg::BoundReport r;
        r.threshold = item.at("threshold").get<double>();
        r.raw_bound = item.at("raw_bound").get<double>();
        r.log_raw_bound = item.at("log_raw_bound").get<double>();
        r.clamped = item.at("clamped").get<double>();
        curve.push_back(r);
    }
    return curve;
}

int run_doc(const std::string& doc_path, const std::string& csv_dir, bool pretty) {
    subg::Json j;
    try {
        j = subg::Json::parse(slurp(doc_path));
    } catch (const subg::Json::parse_error& e) {
        throw subg::SchemaError(std::string("document: ") + e.what());
    }
    const subg::PipelineDoc doc = subg::parse_pipeline(j);
    const subg::RunReport report = subg::run_pipeline(doc);

    if (!csv_dir.empty()) {
        std::error_code ec;
        fs::create_directories(csv_dir, ec);
        if (ec) {
            throw subg::IoError("cannot create directory \"" + csv_dir + "\": " +
                                ec.message());
        }
        for (const auto& item : report.outputs.items()) {
            if (!looks_like_curve(item.value())) continue;
            const fs::path target = fs::path(csv_dir) / (item.key() + ".csv");
            subg::emit_curve_csv(curve_from_json(item.value()), target.string());
        }
    }

    std::fputs(subg::render_report(report, pretty).c_str(), stdout);
    return 0;
}

int print_tables(const std::string& regime_name, bool check) {
    const subg::SignConstraint regime = subg::sign_from_name(regime_name);
    const auto& table = subg::conversion_table(regime);

    std::printf("conversion table, %s regime (%zu entries)\n", regime_name.c_str(),
                table.size());
    std::printf("kinds: (1) two-sided tail  (2) even moments  (3) psi bound"
                "  (4) mgf  (5) one-sided tail\n\n");
    for (const auto& edge : table) {
        const std::string c = "C = " + subg::c_factor_text(edge.c);
        const std::string phi = "phi = " + subg::phi_form_text(edge.phi);
        std::printf("  (%d) <- (%d)   %-20s %-52s %s\n", static_cast<int>(edge.to),
                    static_cast<int>(edge.from), c.c_str(), phi.c_str(),
                    edge.dagger ? "proved" : "derived");
    }

    if (!check) return 0;

    const subg::TableConsistencyReport report =
        subg::table_consistency_report(regime, subg::default_table_samples());
    std::printf("\nconsistency check (%zu samples per entry)\n",
                subg::default_table_samples().size());
    for (const auto& entry : report.entries) {
        std::printf("  (%d) <- (%d)   %-4s %s (max rel err %.3e)\n",
                    static_cast<int>(entry.to), static_cast<int>(entry.from),
                    entry.pass ? "ok" : "FAIL", entry.witness.c_str(),
                    entry.max_rel_err);
    }
    std::printf("%s\n", report.all_pass ? "all derived entries reproduced"
                                        : "INCONSISTENT TABLE");
    return report.all_pass ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"subgaussian certificate toolkit"};
    app.require_subcommand(1);

    std::string doc_path;
    std::string csv_dir;
    bool pretty = false;
    CLI::App* run = app.add_subcommand("run", "execute a pipeline document");
    run->add_option("doc", doc_path, "pipeline JSON document")->required();
    run->add_option("--csv", csv_dir, "directory that receives one CSV per curve output");
    run->add_flag("--pretty", pretty, "indent the JSON report");

    std::string regime_name = "unsigned";
    bool check = false;
    CLI::App* tables = app.add_subcommand("tables", "print the conversion table");
    tables->add_option("--regime", regime_name, "sign regime (unsigned|signed)")
        ->check(CLI::IsMember({"unsigned", "signed"}));
    tables->add_flag("--check", check, "reverify derived entries against proved ones");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) {
            return run_doc(doc_path, csv_dir, pretty);
        }
        return print_tables(regime_name, check);
    } catch (const subg::SchemaError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const subg::ReferenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const subg::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    } catch (const subg::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
