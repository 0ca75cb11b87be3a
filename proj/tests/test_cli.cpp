#include "hvt/corpus.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace hvt;
namespace fs = std::filesystem;

namespace {

struct Run {
    int exit = -1;
    std::string out;
};

Run run_cli(const std::string& args, const std::string& env = {}) {
    std::string cmd = env + (env.empty() ? "" : " ") + "'" HVT_CLI_PATH "' " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string corpus_file(const std::string& name) { return std::string(HVT_DEFAULT_CORPUS_DIR) + "/" + name; }

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("hvt-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    static inline int counter_ = 0;
};

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

json problem(const std::string& body) {
    return json::parse(R"({"schema": "hvt-problem/1", "kind": "finite-moment", )" + body + "}");
}

} // namespace

TEST(Parse, FiniteProblem) {
    auto pf = parse_problem(problem(R"("variables": [{"name": "X", "support": ["-1", "1"]}],
                                       "constraints": [{"moment": {"X": 1}, "target": "1/2"}])"));
    ASSERT_EQ(pf.problem.variables.size(), 1u);
    EXPECT_EQ(pf.problem.constraints[0].target, Rational(1, 2));
    EXPECT_TRUE(pf.exact);
}

TEST(Parse, RejectsBadInput) {
    auto bad = [](const std::string& body) { return parse_problem(problem(body)); };
    const std::string x = R"("variables": [{"name": "X", "support": ["-1", "1"]}], )";
    EXPECT_THROW(bad(x + R"("constraints": [{"moment": {"X": 1}, "target": "1/0"}])"), ValidationError);
    EXPECT_THROW(bad(x + R"("constraints": [{"moment": {"X": 1}, "target": 0.5}])"), ValidationError);
    EXPECT_THROW(bad(x + R"("constraints": [], "colour": 1)"), ValidationError);
    EXPECT_THROW(bad(x + R"("constraints": [{"moment": {"X": 1}, "target": "0", "relation": "!="}])"), ValidationError);
    EXPECT_THROW(bad(x + R"("constraints": [{"moment": {"W": 1}, "target": "0"}])"), ValidationError);
    EXPECT_THROW(parse_problem(json::parse(R"({"schema": "other/1", "kind": "finite-moment"})")), ValidationError);
    EXPECT_THROW(parse_problem(json::parse(R"({"schema": "hvt-problem/1", "kind": "mystery"})")), ValidationError);
    EXPECT_THROW(load_problem("/nonexistent/file.json"), Error);
}

TEST(Parse, AlgebraicTargets) {
    auto pf = parse_problem(problem(R"("variables": [{"name": "X", "support": ["-1", "1"]}, {"name": "Y", "support": ["-1", "1"]}],
                                       "constraints": [{"moment": {"X": 1, "Y": 1}, "target": {"neg_cos_deg": 30}}])"));
    EXPECT_FALSE(pf.exact);
    ASSERT_EQ(pf.targets.size(), 1u);
    EXPECT_EQ(pf.targets[0].second, neg_cos_degrees(30));
    EXPECT_THROW(cmd_decide(pf), ValidationError);
}

TEST(Commands, DecideExitCodes) {
    EXPECT_EQ(run_problem_command("decide", corpus_file("pm1_triple_all_minus_half.json")).exit, 1);
    EXPECT_EQ(run_problem_command("decide", corpus_file("three_valued_counterexample.json")).exit, 0);
    EXPECT_EQ(run_problem_command("decide", corpus_file("malformed.json")).exit, 2);
    EXPECT_EQ(run_problem_command("decide", corpus_file("gaussian_violation.json")).exit, 1);
    EXPECT_EQ(run_problem_command("bogus", corpus_file("point_mass.json")).exit, 2);
}

TEST(Commands, DecideWithOracle) {
    RunOptions run;
    run.oracle = true;
    auto out = run_problem_command("decide", corpus_file("pm1_triple_all_minus_half.json"), run);
    EXPECT_EQ(out.report["oracle"]["agrees"], true);
    EXPECT_EQ(out.report["certificate"]["verified"], true);
    EXPECT_EQ(out.report["schema"], "hvt-report/1");
}

TEST(Commands, HiddenVariableReport) {
    auto out = run_problem_command("hidden-variable", corpus_file("three_valued_counterexample.json"));
    ASSERT_EQ(out.exit, 0) << out.report.dump();
    EXPECT_EQ(out.report["factorization"]["full"]["holds"], true);
    EXPECT_EQ(out.report["recomposes"], true);
    auto bad = run_problem_command("hidden-variable", corpus_file("ghz_default.json"));
    EXPECT_EQ(bad.exit, 1);
}

TEST(Commands, InequalityRows) {
    auto out = run_problem_command("inequalities", corpus_file("bell_not_necessary.json"));
    ASSERT_NE(out.exit, 2) << out.report.dump();
    auto zero = run_problem_command("inequalities", corpus_file("zero_moments.json"));
    EXPECT_EQ(zero.exit, 0) << zero.report.dump();
    auto quantum = run_problem_command("inequalities", corpus_file("quantum_bell_30_60_30.json"), {}, {"bell-original"});
    EXPECT_EQ(quantum.exit, 1) << quantum.report.dump();
    auto unknown = run_problem_command("inequalities", corpus_file("zero_moments.json"), {}, {"no-such-row"});
    EXPECT_EQ(unknown.exit, 2);
}

TEST(Corpus, PristineCorpusPasses) {
    auto s = run_corpus();
    for (const auto& r : s.rows) EXPECT_TRUE(r.pass) << r.anchor << ": " << r.detail;
    EXPECT_GE(s.rows.size(), 30u);
}

TEST(Binary, VersionAndUsage) {
    auto v = run_cli("--version");
    EXPECT_EQ(v.exit, 0);
    EXPECT_NE(v.out.find("hvt "), std::string::npos);
    EXPECT_EQ(run_cli("").exit, 2);
    EXPECT_EQ(run_cli("decide").exit, 2);
    EXPECT_EQ(run_cli("decide --no-such-flag x.json").exit, 2);
}

TEST(Binary, ExitStatuses) {
    EXPECT_EQ(run_cli("decide " + corpus_file("three_valued_counterexample.json")).exit, 0);
    EXPECT_EQ(run_cli("decide " + corpus_file("pm1_triple_all_minus_half.json")).exit, 1);
    EXPECT_EQ(run_cli("decide " + corpus_file("malformed.json")).exit, 2);
    EXPECT_EQ(run_cli("decide --oracle " + corpus_file("ghz_default.json")).exit, 1);
    EXPECT_EQ(run_cli("inequalities --which chsh " + corpus_file("chsh_sqrt2.json")).exit, 1);
    EXPECT_EQ(run_cli("hidden-variable " + corpus_file("gaussian_equicorrelation.json")).exit, 0);
}

TEST(Binary, AtomCapIsEnforced) {
    auto r = run_cli("decide --atom-cap 16 " + corpus_file("ghz_default.json"));
    EXPECT_EQ(r.exit, 2);
    EXPECT_NE(r.out.find("error"), std::string::npos);
}

TEST(Binary, ReportsAreByteIdentical) {
    for (const char* cmd : {"decide --oracle", "hidden-variable", "inequalities"}) {
        for (const char* f : {"three_valued_counterexample.json", "ghz_default.json", "gaussian_completion.json"}) {
            auto a = run_cli(std::string(cmd) + " " + corpus_file(f));
            auto b = run_cli(std::string(cmd) + " " + corpus_file(f));
            EXPECT_EQ(a.exit, b.exit);
            EXPECT_EQ(a.out, b.out) << cmd << " " << f;
            EXPECT_FALSE(a.out.empty());
        }
    }
}

TEST(Binary, OutputFile) {
    TempDir dir;
    auto path = dir.path() / "report.json";
    auto r = run_cli("decide -o " + path.string() + " " + corpus_file("point_mass.json"));
    EXPECT_EQ(r.exit, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(json::parse(ss.str())["verdict"], "feasible");
}

TEST(Binary, CorpusPassesAndJsonSummary) {
    auto text = run_cli("corpus");
    EXPECT_EQ(text.exit, 0) << text.out;
    EXPECT_EQ(text.out.find("FAIL"), std::string::npos);
    auto j = run_cli("corpus --json");
    EXPECT_EQ(j.exit, 0);
    auto summary = json::parse(j.out);
    EXPECT_EQ(summary["failed"], 0);
    for (const auto& row : summary["entries"]) EXPECT_EQ(row["status"], "PASS") << row.dump();
}

TEST(Binary, EditedTargetMakesThatRowFail) {
    TempDir dir;
    for (const auto& e : fs::directory_iterator(HVT_DEFAULT_CORPUS_DIR)) fs::copy(e.path(), dir.path() / e.path().filename());
    auto file = dir.path() / "pm1_triple_all_minus_half.json";
    auto j = read_json_file(file.string());
    for (auto& c : j["constraints"])
        if (c["target"] == "-1/2") c["target"] = "1/2";
    write(file, j.dump(2));

    std::set<std::string> touched;
    auto manifest = read_json_file((dir.path() / "manifest.json").string());
    for (const auto& e : manifest["entries"])
        if (e.value("file", "") == file.filename().string()) touched.insert(e["anchor"].get<std::string>());
    ASSERT_FALSE(touched.empty());

    auto r = run_cli("corpus --json", "HVT_CORPUS_DIR='" + dir.path().string() + "'");
    EXPECT_EQ(r.exit, 1);
    auto summary = json::parse(r.out);
    for (const auto& row : summary["entries"]) {
        bool edited = touched.count(row["anchor"].get<std::string>()) != 0;
        EXPECT_EQ(row["status"], edited ? "FAIL" : "PASS") << row.dump();
    }
    EXPECT_EQ(summary["failed"], touched.size());

    // the untouched copy still passes everywhere else
    auto pristine = run_cli("corpus --dir " + std::string(HVT_DEFAULT_CORPUS_DIR));
    EXPECT_EQ(pristine.exit, 0);
}

TEST(Binary, MissingCorpusDirectory) {
    EXPECT_EQ(run_cli("corpus --dir /nonexistent-hvt-corpus").exit, 2);
}
