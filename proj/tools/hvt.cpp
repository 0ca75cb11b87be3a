#include "hvt/corpus.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int emit(const hvt::json& report, const std::string& output) {
    std::string text = report.dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) {
        std::cerr << "hvt: cannot write " << output << "\n";
        return 2;
    }
    out << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact joint-distribution feasibility and hidden-variable checks"};
    app.set_version_flag("--version", std::string("hvt ") + hvt::engine_version());
    app.require_subcommand(1);

    std::string path, output;
    std::size_t atom_cap = 0;
    double tol = -1;
    bool oracle = false, as_json = false;
    std::vector<std::string> which;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("file", path, "problem file (hvt-problem/1 JSON)")->required();
        sub->add_option("--atom-cap", atom_cap, "maximum number of atoms for the exact LP");
        sub->add_option("--tol", tol, "eigenvalue tolerance for gaussian problems");
        sub->add_option("-o,--output", output, "write the report to a file instead of stdout");
    };

    auto* decide = app.add_subcommand("decide", "decide whether a joint distribution exists");
    add_common(decide);
    decide->add_flag("--oracle", oracle, "cross-check with the independent elimination oracle");
    auto* hidden = app.add_subcommand("hidden-variable", "construct and verify a deterministic hidden variable");
    add_common(hidden);
    auto* ineq = app.add_subcommand("inequalities", "evaluate closed-form inequalities");
    add_common(ineq);
    ineq->add_option("--which", which, "inequality ids to evaluate (default: all that apply)")->delimiter(',');
    auto* corpus = app.add_subcommand("corpus", "run the golden corpus");
    corpus->add_flag("--json", as_json, "print a machine-readable summary");
    corpus->add_option("--dir", path, "corpus directory (default: $HVT_CORPUS_DIR or the bundled corpus)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (corpus->parsed()) {
        try {
            auto summary = path.empty() ? hvt::run_corpus() : hvt::run_corpus(path);
            if (as_json) {
                std::cout << hvt::corpus_json(summary).dump(2) << "\n";
            } else {
                for (const auto& r : summary.rows) {
                    std::cout << (r.pass ? "PASS " : "FAIL ") << r.anchor;
                    if (!r.detail.empty()) std::cout << "  [" << r.detail << "]";
                    std::cout << "\n";
                }
                std::cout << summary.rows.size() - summary.failed() << " passed, " << summary.failed() << " failed\n";
            }
            return summary.failed() == 0 ? 0 : 1;
        } catch (const std::exception& e) {
            std::cerr << "hvt: " << e.what() << "\n";
            return 2;
        }
    }

    hvt::RunOptions run;
    if (atom_cap > 0) run.atom_cap = atom_cap;
    if (tol >= 0) run.tol = tol;
    run.oracle = oracle;
    std::string command = decide->parsed() ? "decide" : hidden->parsed() ? "hidden-variable" : "inequalities";
    auto out = hvt::run_problem_command(command, path, run, which);
    if (out.report.contains("error")) std::cerr << "hvt: " << out.report["error"].get<std::string>() << "\n";
    if (int rc = emit(out.report, output); rc != 0) return rc;
    return out.exit;
}
