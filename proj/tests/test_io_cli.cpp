#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hyperlap/cli.hpp"
#include "hyperlap/error.hpp"
#include "hyperlap/io.hpp"
#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace hyperlap;
namespace fs = std::filesystem;

namespace {

const std::string data_dir = HYPERLAP_DATA_DIR;

struct RunResult
{
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "hyperlap");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string error_code(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.tag();
    }
    return "none";
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("hyperlap_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

} // namespace

TEST_CASE("JSON output is key-sorted with 17 significant digits")
{
    io::json j;
    j["zeta"] = 1.0 / 3.0;
    j["alpha"] = {1.0, 2.5};
    const std::string s = io::dump_json(j);
    CHECK(s.find("\"alpha\"") < s.find("\"zeta\""));
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::parse_json(s, "test")["zeta"].get<double>() == 1.0 / 3.0);
}

TEST_CASE("io error codes")
{
    CHECK(error_code([] { io::read_file("/nonexistent/file.json"); }) == "io/FileNotFound");
    CHECK(error_code([] { io::parse_json("{not json", "inline"); }) == "io/ParseError");
    CHECK(io::parse_exponent(io::json("inf"), "q") == kInf);
    CHECK(io::parse_exponent(io::json(4.5), "q") == 4.5);
}

TEST_CASE("trajectory CSV round-trips exactly")
{
    std::mt19937_64 rng(71);
    const TimeGrid grid{0.7, 37};
    const Path p = testsupport::smooth_path(rng, grid, 4, 0, 1.3);
    const Trajectory back = io::parse_trajectory_csv(io::path_csv(grid, p));
    CHECK(back.grid.K == grid.K);
    CHECK(back.grid.T == grid.T);
    CHECK(testsupport::sup_distance(back.x, p) == 0.0);
}

TEST_CASE("problem files load with defaults, shorthands and overrides")
{
    const io::ProblemFile pf = io::load_problem(data_dir + "/zero_problem.json");
    CHECK(pf.G.N() == 5);
    CHECK(pf.params.p == 4.0);
    CHECK(pf.grid.K == 10);
    CHECK(pf.grid.T == doctest::Approx(0.1));
    CHECK(pf.lambda == 0.001);
    CHECK(pf.M == 1e12);

    io::Overrides ov;
    ov.q = 8.0;
    ov.steps = 20;
    const io::ProblemFile po = io::load_problem(data_dir + "/zero_problem.json", ov);
    CHECK(po.params.q == 8.0);
    CHECK(po.grid.K == 20);
    CHECK(po.h.size() == 21);

    const fs::path dir = scratch_dir("problem");
    write_text(dir / "p.json", R"({"hypergraph": {"n": 1, "m": 1, "edges": [{"v": [1, 2], "w": 1}]},
        "p": 5, "T": 1, "steps": 4, "x0": [0.5], "a": [3], "h": [[1, 0]], "x_target": [0, 0]})");
    const io::ProblemFile pi = io::load_problem((dir / "p.json").string());
    CHECK(pi.params.q == 5.0);
    CHECK(pi.lambda == 0.1);
    CHECK(pi.x0 == Eigen::Vector2d(0.5, 3.0));
    CHECK(pi.a.size() == 5);
    CHECK(pi.a[4] == Eigen::Vector2d(0.0, 3.0));
    CHECK(pi.h[2] == Eigen::Vector2d(1.0, 0.0));
    CHECK(pi.z_target == Eigen::Vector2d::Zero());

    write_text(dir / "bad.json", R"({"hypergraph": {"n": 1, "m": 1, "edges": [{"v": [1, 2], "w": 1}]},
        "p": 5, "T": 1, "steps": 4, "x0": [0.5, 1, 2]})");
    CHECK(error_code([&] { io::load_problem((dir / "bad.json").string()); }) != "none");
}

TEST_CASE("write_file_atomic creates directories and leaves no temporaries")
{
    const fs::path dir = scratch_dir("atomic");
    const fs::path target = dir / "a" / "b" / "out.txt";
    io::write_file_atomic(target.string(), "hello");
    CHECK(io::read_file(target.string()) == "hello");
    int files = 0;
    for (const auto& e : fs::directory_iterator(target.parent_path()))
        files += e.is_regular_file() ? 1 : 0;
    CHECK(files == 1);
}

TEST_CASE("cli validate")
{
    const RunResult ok = run_cli({"validate", data_dir + "/two_edges.json"});
    CHECK(ok.code == 0);
    const io::json j = io::parse_json(ok.out, "stdout");
    CHECK(j["N"] == 5);
    CHECK(j["connected"] == true);

    const RunResult bad = run_cli({"validate", data_dir + "/bad_edge.json"});
    CHECK(bad.code == 1);
    CHECK(bad.err.rfind("hypergraph/EdgeTooSmall", 0) == 0);
    CHECK(std::count(bad.err.begin(), bad.err.end(), '\n') == 1);

    CHECK(run_cli({"validate", data_dir + "/missing.json"}).code == 1);
}

TEST_CASE("cli usage errors exit with 2")
{
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"bogus"}).code == 2);
    CHECK(run_cli({"energy", data_dir + "/two_edges.json", "--p"}).code == 2);
    CHECK(run_cli({"simulate", data_dir + "/zero_problem.json", "--scheme", "sideways"}).code == 2);
}

TEST_CASE("cli energy")
{
    const RunResult r = run_cli({"energy", data_dir + "/single_edge.json", "--p", "2", "--q", "2", "--x", "[1,0]"});
    REQUIRE(r.code == 0);
    const io::json j = io::parse_json(r.out, "stdout");
    CHECK(j["phi_p"].get<double>() == doctest::Approx(0.5));
    CHECK(j["gradient"][0].get<double>() == doctest::Approx(1.0));

    const RunResult bad = run_cli({"energy", data_dir + "/single_edge.json", "--p", "0.5", "--q", "2", "--x", "[1,0]"});
    CHECK(bad.code == 1);
    CHECK(bad.err.rfind("energy/DegenerateExponent", 0) == 0);
}

TEST_CASE("cli simulate on the zero equilibrium")
{
    for (const char* scheme : {"penalized", "constrained", "free"}) {
        const RunResult r = run_cli({"simulate", data_dir + "/zero_problem.json", "--scheme", scheme});
        REQUIRE(r.code == 0);
        const Trajectory tr = io::parse_trajectory_csv(r.out);
        CHECK(tr.grid.K == 10);
        for (const auto& x : tr.x)
            CHECK(x.isZero());
    }
    const fs::path dir = scratch_dir("simulate");
    const RunResult r = run_cli({"simulate", data_dir + "/zero_problem.json", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(io::parse_trajectory_csv(io::read_file((dir / "trajectory.csv").string())).x.size() == 11);
}

TEST_CASE("cli control and sweep write their artifacts")
{
    const fs::path dir = scratch_dir("control");
    const RunResult c = run_cli({"control", data_dir + "/zero_problem.json", "--out", (dir / "c").string()});
    REQUIRE(c.code == 0);
    for (const char* f : {"result.json", "control.csv", "trajectory.csv", "adjoint.csv"})
        CHECK(fs::exists(dir / "c" / f));
    CHECK(io::load_json((dir / "c" / "result.json").string())["converged"] == true);
    for (const char* f : {"control.csv", "trajectory.csv", "adjoint.csv"})
        CHECK(io::parse_trajectory_csv(io::read_file((dir / "c" / f).string())).x.size() == 11);

    const RunResult s = run_cli({"sweep", data_dir + "/zero_problem.json", "--q-list", "4,8", "--lambda-list",
                                 "0.1,0.01", "--out", (dir / "s").string()});
    REQUIRE(s.code == 0);
    const io::json summary = io::load_json((dir / "s" / "summary.json").string());
    CHECK(summary["stages"].size() == 2);
    CHECK(summary["distances"].size() == 1);
    CHECK(fs::is_directory(dir / "s" / summary["stages"][0]["dir"].get<std::string>()));

    CHECK(run_cli({"sweep", data_dir + "/zero_problem.json", "--q-list", "4,8", "--lambda-list", "0.1"}).code != 0);
    CHECK(run_cli({"control", data_dir + "/zero_problem.json", "--p", "3", "--out", (dir / "x").string()}).code == 1);
}

TEST_CASE("cli spectral report")
{
    const RunResult r =
        run_cli({"spectral", data_dir + "/single_edge.json", "--p", "2", "--q", "2", "--samples", "3"});
    REQUIRE(r.code == 0);
    const io::json j = io::parse_json(r.out, "stdout");
    CHECK(j["eigen"]["lambda1q"].get<double>() == doctest::Approx(2.0));
    CHECK(j["poincare"]["gamma"].get<double>() == doctest::Approx(0.25));
    CHECK(j["resolvent_gaps"].size() == 3);
}

TEST_CASE("cli verify is deterministic and passes on the sample instance")
{
    const std::vector<std::string> args = {"verify", data_dir + "/two_edges.json", "--p", "4", "--q", "4", "--seed", "7"};
    const RunResult a = run_cli(args), b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("FAIL") == std::string::npos);
    const RunResult c = run_cli({"verify", data_dir + "/two_edges.json", "--p", "4", "--q", "4", "--seed", "8"});
    CHECK(c.code == 0);
}
