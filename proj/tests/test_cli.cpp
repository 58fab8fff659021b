#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_cli;

int run(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("tsc_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("simulate then fit reaches the measurement-noise floor") {
    TempDir tmp("pipeline");
    REQUIRE(run("simulate --d 20 --T 40 --tau 8 --rank 2 --seed 7 --out " + tmp.sub("sim")) == 0);
    REQUIRE(run("fit --obs " + tmp.sub("sim") + "/observations.csv --structure periodic --tau 8"
                " --rank 2 --seed 7 --rows 20 --cols 40 --out " + tmp.sub("fit")) == 0);
    const nlohmann::json fit = read_json(tmp.path / "fit" / "fit.json");
    // xi ~ N(0, 0.01^2): the fitted risk must sit below three times the floor
    CHECK(fit["fitted_risk"].get<double>() < 3.0 * 1e-4);
    CHECK(fit["k"] == 2);
    CHECK(fit["tau"] == 8);
    CHECK(fit["structure"] == "periodic");
    CHECK(fit["config"]["command"] == "fit");
}

TEST_CASE("identity fit equals periodic fit with tau = T") {
    TempDir tmp("equiv");
    REQUIRE(run("simulate --d 15 --T 12 --tau 12 --rank 2 --seed 3 --sigma-eps 0.2 --out " +
                tmp.sub("sim")) == 0);
    const std::string obs = tmp.sub("sim") + "/observations.csv";
    REQUIRE(run("fit --obs " + obs + " --structure identity --rank 2 --seed 5 --rows 15 --cols 12"
                " --out " + tmp.sub("a")) == 0);
    REQUIRE(run("fit --obs " + obs + " --structure periodic --tau 12 --rank 2 --seed 5 --rows 15"
                " --cols 12 --out " + tmp.sub("b")) == 0);
    const double ra = read_json(tmp.path / "a" / "fit.json")["fitted_risk"].get<double>();
    const double rb = read_json(tmp.path / "b" / "fit.json")["fitted_risk"].get<double>();
    CHECK(ra == doctest::Approx(rb).epsilon(1e-10));
}

TEST_CASE("select-rank writes the trace files") {
    TempDir tmp("select");
    REQUIRE(run("simulate --d 30 --T 20 --tau 5 --rank 2 --seed 11 --out " + tmp.sub("sim")) == 0);
    REQUIRE(run("select-rank --obs " + tmp.sub("sim") + "/observations.csv --structure periodic"
                " --tau 5 --rank-max 4 --seed 11 --rows 30 --cols 20 --out " +
                tmp.sub("sel")) == 0);
    const nlohmann::json sel = read_json(tmp.path / "sel" / "selection.json");
    CHECK(sel["selected_k"].get<int>() >= 1);
    CHECK(sel["selected_k"].get<int>() <= 4);
    CHECK(sel.contains("c_tilde"));
    const std::string path_csv = slurp(tmp.path / "sel" / "rank_path.csv");
    CHECK(path_csv.find("k,risk,criterion\n") == 0);
    CHECK(std::count(path_csv.begin(), path_csv.end(), '\n') == 5);  // header + 4 ranks
    CHECK(fs::exists(tmp.path / "sel" / "heuristic.csv"));

    // a fixed penalty constant bypasses the heuristic
    REQUIRE(run("select-rank --obs " + tmp.sub("sim") + "/observations.csv --structure periodic"
                " --tau 5 --rank-max 4 --c-pen 0 --seed 11 --rows 30 --cols 20 --out " +
                tmp.sub("pen")) == 0);
    const nlohmann::json pen = read_json(tmp.path / "pen" / "selection.json");
    CHECK(!pen.contains("c_tilde"));
    CHECK(!fs::exists(tmp.path / "pen" / "heuristic.csv"));
}

TEST_CASE("holdout evaluation reports a validation risk") {
    TempDir tmp("holdout");
    REQUIRE(run("simulate --d 25 --T 20 --tau 5 --rank 2 --seed 21 --sigma-eps 0.1 --out " +
                tmp.sub("sim")) == 0);
    REQUIRE(run("fit --obs " + tmp.sub("sim") + "/observations.csv --structure periodic --tau 5"
                " --rank 2 --seed 21 --rows 25 --cols 20 --holdout 0.2 --out " +
                tmp.sub("fit")) == 0);
    const nlohmann::json fit = read_json(tmp.path / "fit" / "fit.json");
    CHECK(fit.contains("validation_risk"));
    CHECK(fit["validation_risk"].get<double>() > 0.0);
    CHECK(fit["train_n"].get<int>() + fit["validation_n"].get<int>() == 150);
}

TEST_CASE("dense matrices with missing cells fit directly") {
    TempDir tmp("matrix");
    {
        std::ofstream m(tmp.path / "m.csv", std::ios::binary);
        m << "1.0,2.0,1.1,2.1\n0.5,,0.6,NaN\n2.0,1.0,2.2,1.2\n";
    }
    REQUIRE(run("fit --matrix " + tmp.sub("m.csv") + " --structure periodic --tau 2 --rank 1"
                " --seed 3 --out " + tmp.sub("fit")) == 0);
    const nlohmann::json fit = read_json(tmp.path / "fit" / "fit.json");
    CHECK(fit["fitted_risk"].get<double>() >= 0.0);
    CHECK(fit["tau"] == 2);
    // --obs and --matrix are mutually exclusive, and one is required
    CHECK(run("fit --matrix " + tmp.sub("m.csv") + " --obs " + tmp.sub("m.csv") +
              " --structure identity --rank 1") != 0);
    CHECK(run("fit --structure identity --rank 1") != 0);
    // dropping the odd columns halves the horizon
    REQUIRE(run("fit --matrix " + tmp.sub("m.csv") + " --structure identity --rank 1"
                " --drop-cols 1,3 --seed 3 --out " + tmp.sub("drop")) == 0);
    CHECK(read_json(tmp.path / "drop" / "fit.json")["tau"] == 2);
}

TEST_CASE("conflicting or missing flags exit nonzero") {
    TempDir tmp("usage");
    REQUIRE(run("simulate --d 10 --T 8 --tau 4 --rank 1 --seed 1 --out " + tmp.sub("sim")) == 0);
    CHECK(run("fit --obs " + tmp.sub("sim") + "/observations.csv --structure periodic --rank 1") !=
          0);  // periodic without --tau
    CHECK(run("fit --structure identity --rank 1") != 0);  // missing --obs
    CHECK(run("reproduce nosuchtarget --out " + tmp.sub("x")) != 0);
    CHECK(run("fit --obs /nonexistent.csv --structure identity --rank 1") != 0);
}

TEST_CASE("config file values compose with flags winning") {
    TempDir tmp("config");
    {
        std::ofstream cfg(tmp.path / "sim.cfg");
        cfg << "d=18\nT=10\ntau=5\nrank=2\nseed=5\nout=" << tmp.sub("a") << "\n";
    }
    REQUIRE(run("simulate --config " + tmp.sub("sim.cfg")) == 0);
    const nlohmann::json a = read_json(tmp.path / "a" / "simulate.json");
    CHECK(a["config"]["d"] == "18");
    // the flag overrides the file value
    REQUIRE(run("simulate --config " + tmp.sub("sim.cfg") + " --d 12 --out " + tmp.sub("b")) == 0);
    const nlohmann::json b = read_json(tmp.path / "b" / "simulate.json");
    CHECK(b["config"]["d"] == "12");
}

TEST_CASE("reruns are byte-identical") {
    TempDir tmp("determinism");
    const std::string sim_flags = "simulate --d 16 --T 20 --tau 5 --rank 2 --seed 9 --out ";
    REQUIRE(run(sim_flags + tmp.sub("s1")) == 0);
    REQUIRE(run(sim_flags + tmp.sub("s2")) == 0);
    for (const char* name : {"observations.csv", "theta0.csv", "t0.csv"}) {
        CHECK(slurp(tmp.path / "s1" / name) == slurp(tmp.path / "s2" / name));
    }
    const std::string fit_flags = "fit --obs " + tmp.sub("s1") + "/observations.csv"
                                  " --structure periodic --tau 5 --rank 2 --seed 9"
                                  " --rows 16 --cols 20 --out ";
    REQUIRE(run(fit_flags + tmp.sub("f1")) == 0);
    REQUIRE(run(fit_flags + tmp.sub("f2")) == 0);
    for (const char* name : {"reconstruction.csv", "U.csv", "V.csv"}) {
        CHECK(slurp(tmp.path / "f1" / name) == slurp(tmp.path / "f2" / name));
    }
}

int main(int argc, char** argv) {
    if (argc < 2 || argv[argc - 1][0] == '-') {
        std::fprintf(stderr, "usage: test_cli [doctest flags] <path-to-cli>\n");
        return 1;
    }
    g_cli = argv[argc - 1];
    doctest::Context context;
    context.applyCommandLine(argc - 1, argv);
    return context.run();
}
