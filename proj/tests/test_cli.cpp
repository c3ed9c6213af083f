#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const char* kBin = TREELIMIT_BIN_PATH;
const char* kConfigDir = TREELIMIT_CONFIG_DIR;

int run_command(const std::string& args) {
    std::string cmd = std::string(kBin) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("treelimit_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("run executes the bundled config") {
    fs::path out = fresh_dir("run");
    std::string config = (fs::path(kConfigDir) / "diag_stretch.json").string();
    int code = run_command("run " + config + " --out " + out.string());
    CHECK(code == 0);
    std::string csv = slurp(out / "diag_stretch.csv");
    CHECK(count_lines(csv) == 9);  // header + 8 schedule steps
    CHECK(csv.rfind("t,energy,delta,diameter,len_a,len_b,len_aa,len_ab,len_aB,len_bb", 0) == 0);
    CHECK(fs::exists(out / "diag_stretch_tree.json"));
}

TEST_CASE("run is deterministic for a fixed seed") {
    fs::path out1 = fresh_dir("det1"), out2 = fresh_dir("det2");
    std::string config = (fs::path(kConfigDir) / "diag_stretch.json").string();
    REQUIRE(run_command("run " + config + " --out " + out1.string() + " --seed 11") == 0);
    REQUIRE(run_command("run " + config + " --out " + out2.string() + " --seed 11") == 0);
    CHECK(slurp(out1 / "diag_stretch.csv") == slurp(out2 / "diag_stretch.csv"));
    CHECK(slurp(out1 / "diag_stretch_tree.json") == slurp(out2 / "diag_stretch_tree.json"));
}

TEST_CASE("run rejects schema violations with exit 3") {
    fs::path dir = fresh_dir("schema");
    fs::path config = dir / "bad.json";
    {
        std::ofstream f(config);
        f << R"({"family": {"name": "diag-stretch"},
                 "graph": {"vertices": 1, "edges": [{"tail":0,"head":0,"holonomy":"a"}]},
                 "schedule": []})";
    }
    CHECK(run_command("run " + config.string()) == 3);
    CHECK(run_command("run " + (dir / "missing.json").string()) == 1);
}

TEST_CASE("run exits 2 when the final metric is not tree-like") {
    fs::path dir = fresh_dir("nottree");
    fs::path config = dir / "short.json";
    {
        std::ofstream f(config);
        f << R"({"family": {"name": "diag-stretch"},
                 "graph": {"vertices": 1, "edges": [
                    {"tail":0,"head":0,"weight":1.0,"holonomy":"a"},
                    {"tail":0,"head":0,"weight":1.0,"holonomy":"b"}]},
                 "schedule": [0.4],
                 "solver": {"tol": 1e-8, "max_iter": 50000}})";
    }
    CHECK(run_command("run " + config.string() + " --out " + dir.string()) == 2);
}

TEST_CASE("tree command reconstructs tree metrics and rejects square ones") {
    fs::path dir = fresh_dir("treecmd");
    fs::path good = dir / "tree_metric.json";
    {
        std::ofstream f(good);
        f << R"({"dist": [[0, 2, 3], [2, 0, 3], [3, 3, 0]]})";
    }
    CHECK(run_command("tree " + good.string() + " --out " + (dir / "t.json").string()) == 0);
    CHECK(fs::exists(dir / "t.json"));

    fs::path square = dir / "square.json";
    {
        std::ofstream f(square);
        double s = std::sqrt(2.0);
        std::ofstream& o = f;
        o << "{\"dist\": [[0,1," << s << ",1],[1,0,1," << s << "],[" << s << ",1,0,1],[1," << s << ",1,0]]}";
    }
    CHECK(run_command("tree " + square.string()) == 2);
}

TEST_CASE("check suites run and the fault hook trips") {
    CHECK(run_command("check lengths") == 0);
    CHECK(run_command("check no-such-suite") == 3);
    CHECK(run_command("check hyperbolic --inject-fault") == 1);
}

TEST_CASE("check hyperbolic passes within its time budget") {
    auto start = std::chrono::steady_clock::now();
    CHECK(run_command("check hyperbolic") == 0);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(elapsed < 5.0);
}
