#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nirenberg/cli.hpp"
#include "nirenberg/configuration.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace nirenberg;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "nirenberg-cli");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = cli_dispatch((int)argv.size(), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch()
{
    fs::path d = fs::temp_directory_path() / "nirenberg_cli_test";
    fs::create_directories(d);
    return d;
}

std::string write(const std::string& name, const std::string& text)
{
    fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string tilted_k(int n)
{
    return write("k" + std::to_string(n) + ".json", CurvatureField::affine(2.0, Vec::Unit(n + 1, n)).to_json_text());
}

std::string single_config(int n, double lambda)
{
    Configuration c;
    c.n = n;
    c.entries = {Entry{1.0, Bubble{pole(n, n), lambda}}};
    return write("c" + std::to_string(n) + ".json", config_to_json_text(c));
}

} // namespace

TEST_CASE("constants and the audit")
{
    auto r = run({"constants", "--dim", "4"});
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j.is_array());
    CHECK(j.size() > 20);

    auto one = run({"constants", "--dim", "4", "--name", "bar_c0"});
    CHECK(one.code == 0);
    CHECK(nlohmann::json::parse(one.out)[0]["value"].get<double>() == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-10));

    auto v = run({"verify-constants", "--dim", "4", "--tol", "1e-9"});
    CHECK(v.code == 0);
    CHECK(v.out.find("FLAG") != std::string::npos);
    CHECK(v.out.find("FAIL") == std::string::npos);

    CHECK(run({"constants", "--dim", "4", "--name", "no_such"}).code == 2);
    CHECK(run({"constants", "--dim", "2"}).code == 2);
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"expand"}).code == 2);
    CHECK(run({"expand", "--config", "/nonexistent/missing.json"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    std::string bad = write("bad.json", "{\"n\": 4, \"entries\": [");
    CHECK(run({"expand", "--config", bad, "--k", tilted_k(4)}).code == 2);
    CHECK(run({"compare", "--config", single_config(4, 10), "--k", tilted_k(4), "--lambda-schedule", "10,x"}).code == 2);
}

TEST_CASE("expand, oracle, compare")
{
    auto e = run({"expand", "--config", single_config(5, 20), "--k", tilted_k(5), "--gradient"});
    REQUIRE(e.code == 0);
    auto j = nlohmann::json::parse(e.out);
    CHECK(j.contains("J"));
    CHECK(j.contains("error_budget"));
    CHECK(j["gradient"].size() == 1);

    auto o = run({"oracle", "--config", single_config(5, 20), "--k", tilted_k(5), "--level", "2"});
    REQUIRE(o.code == 0);
    auto jo = nlohmann::json::parse(o.out);
    CHECK(jo["J"].get<double>() == doctest::Approx(j["J"].get<double>()).epsilon(1e-3));

    auto c = run({"compare", "--config", single_config(5, 10), "--k", tilted_k(5), "--lambda-schedule", "10,20", "--level", "2"});
    REQUIRE(c.code == 0);
    CHECK(c.out.rfind("lambda,J_direct,J_reduced,gap,budget,ratio\n", 0) == 0);
}

TEST_CASE("solve")
{
    auto s = run({"solve", "--config", tilted_k(6), "--points", "auto", "--tau", "1e-4"});
    REQUIRE(s.code == 0);
    auto j = nlohmann::json::parse(s.out);
    CHECK(j.contains("prediction"));
    CHECK(j["refinement"]["status"] == "Converged");

    auto pinned = run({"solve", "--config", tilted_k(6), "--points", "0,0,0,0,0,0,1", "--tau", "1e-4"});
    CHECK(pinned.code == 0);
    CHECK(run({"solve", "--config", tilted_k(6), "--points", "1,0,0,0,0,0,0", "--tau", "1e-4"}).code == 2);
    CHECK(run({"solve", "--config", tilted_k(6), "--points", "auto", "--tau", "0"}).code == 2);
    // lambda of order one is outside the bubble regime
    auto far = run({"solve", "--config", tilted_k(6), "--points", "auto", "--tau", "0.3"});
    CHECK(far.code == 3);
    CHECK(nlohmann::json::parse(far.out)["refinement"]["status"] == "LeftRegime");
}

TEST_CASE("scan and decompose")
{
    std::string summary = (scratch() / "summary.json").string();
    auto s = run({"scan", "--scenario", "tower", "--dim", "6", "--tau", "1e-4", "--k", tilted_k(6), "--summary", summary});
    REQUIRE(s.code == 0);
    CHECK(s.out.rfind("kind,lambda_ratio,base,separation,tau,gradient_norm,lower_bound,ratio\n", 0) == 0);
    std::ifstream in(summary);
    auto js = nlohmann::json::parse(in);
    CHECK(js["min_ratio"].get<double>() > 0);
    CHECK(run({"scan", "--scenario", "nebula", "--dim", "6", "--k", tilted_k(6)}).code == 2);

    std::string u = write("u.json", R"({"n":4,"bubbles":[{"alpha":1,"a":[0,0,0,0,1],"lambda":10}],"constant":0.01})");
    auto d = run({"decompose", "--input", u, "--q", "1", "--level", "2"});
    REQUIRE(d.code == 0);
    auto jd = nlohmann::json::parse(d.out);
    CHECK(jd["v_norm_sq"].get<double>() >= 0);
    CHECK(jd["ortho_residuals"].size() == 1);
}

TEST_CASE("the installed binary reports exit codes")
{
    const char* bin = std::getenv("NIRENBERG_CLI");
    if (!bin) {
        MESSAGE("NIRENBERG_CLI not set, skipping the subprocess check");
        return;
    }
    auto code = [&](const std::string& args) {
        int st = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    };
    CHECK(code("verify-constants --dim 4 --tol 1e-9") == 0);
    CHECK(code("expand --config /nonexistent/missing.json") == 2);
    CHECK(code("frobnicate") == 2);
    CHECK(code("solve --config " + tilted_k(6) + " --tau 0.3") == 3);
}
