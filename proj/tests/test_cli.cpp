#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef GIBBSLAB_CLI_PATH
#define GIBBSLAB_CLI_PATH "gibbslab"
#endif

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args, const fs::path& cwd) {
    std::string cmd = "cd " + cwd.string() + " && " + GIBBSLAB_CLI_PATH + " " +
                      args + " > cli_stdout.txt 2> cli_stderr.txt";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("gibbslab_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("cli exact writes marginals and summary") {
    auto dir = fresh_dir("exact");
    int rc = run_cli("exact --box 3x3 --bc free --q 2 --beta 1 "
                     "--dlr-subbox 1x1 --out res",
                     dir);
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "res" / "marginals.csv"));
    CHECK(fs::exists(dir / "res" / "summary.json"));
    auto summary = slurp(dir / "res" / "summary.json");
    CHECK(summary.find("log_partition") != std::string::npos);
    CHECK(summary.find("dlr_max_discrepancy") != std::string::npos);
    auto csv = slurp(dir / "res" / "marginals.csv");
    CHECK(csv.rfind("site,color,probability", 0) == 0);
}

TEST_CASE("cli exact rejects caps and bad input with exit 2") {
    auto dir = fresh_dir("caps");
    CHECK(run_cli("exact --box 9x9 --q 3 --beta 1", dir) == 2);
    CHECK(run_cli("exact --box 4x4 --bc nonsense", dir) == 2);
    // bad bc file
    {
        std::ofstream bad(dir / "bad.json");
        bad << "{\"schema_version\": 1, \"kind\": \"martian\"}";
    }
    CHECK(run_cli("exact --box 4x4 --bc file:bad.json", dir) == 2);
}

TEST_CASE("cli sample runs are byte-identical for a fixed seed") {
    auto dir = fresh_dir("determinism");
    std::string args =
        "sample --box 4x4 --bc dobrushin --q 2 --beta 1.2 --sweeps 2000 "
        "--chains 2 --seed 5 --svg --out ";
    CHECK(run_cli(args + "a", dir) == 0);
    CHECK(run_cli(args + "b", dir) == 0);
    for (const char* f :
         {"estimates.csv", "batches.csv", "config.json", "snapshot.svg"}) {
        CAPTURE(f);
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
        CHECK(!slurp(dir / "a" / f).empty());
    }
}

TEST_CASE("cli sample accepts a config file with flag overrides") {
    auto dir = fresh_dir("config");
    {
        std::ofstream cfg(dir / "run.json");
        cfg << R"({"schema_version": 1,
                   "box": {"schema_version": 1, "ranges": [[0,3],[0,3]]},
                   "bc": {"schema_version": 1, "kind": "pure", "color": 1},
                   "model": {"q": 2, "beta": 0.9},
                   "sampler": "heatbath", "sweeps": 1500, "chains": 2,
                   "seed": 9})";
    }
    CHECK(run_cli("sample --config run.json --out c1", dir) == 0);
    auto cfg_out = slurp(dir / "c1" / "config.json");
    CHECK(cfg_out.find("\"sampler\": \"heatbath\"") != std::string::npos);
    CHECK(cfg_out.find("\"seed\": 9") != std::string::npos);
    // flag overrides the config's sampler
    CHECK(run_cli("sample --config run.json --sampler sw --out c2", dir) == 0);
    CHECK(slurp(dir / "c2" / "config.json").find("\"sampler\": \"sw\"") !=
          std::string::npos);
}

TEST_CASE("cli check commands and exit codes") {
    auto dir = fresh_dir("check");
    CHECK(run_cli("check fkg-mixture --box 2x2x4 --beta 2 --z 0 --out w", dir) ==
          0);
    CHECK(slurp(dir / "w" / "witness.json").find("\"witness\": true") !=
          std::string::npos);
    CHECK(run_cli("check vdberg --random 25 --seed 7 --out v", dir) == 0);
    CHECK(fs::exists(dir / "v" / "vdberg.jsonl"));
    CHECK(run_cli("check corr-ab --random 10 --q 3 --seed 3 --out f", dir) == 0);
    CHECK(run_cli("check bicolor --random 10 --seed 5 --out b", dir) == 0);
    CHECK(run_cli("check unknown-id", dir) == 2);
}

TEST_CASE("cli steiner and env overrides") {
    auto dir = fresh_dir("steiner");
    CHECK(run_cli("steiner --norm euclidean --side 1 --svg fig.svg", dir) == 0);
    CHECK(fs::exists(dir / "fig.svg"));
    auto out = slurp(dir / "cli_stdout.txt");
    CHECK(out.find("2.73205") != std::string::npos);
    // GIBBSLAB_OUT_DIR steers outputs when --out is omitted
    std::string cmd = "cd " + dir.string() + " && GIBBSLAB_OUT_DIR=envout " +
                      GIBBSLAB_CLI_PATH +
                      " exact --box 2x2 --q 2 --beta 0.5 > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir / "envout" / "summary.json"));
}
