#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kCli = RESOPT_CLI_PATH;

int exit_code(const std::string& args)
{
    const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("resopt_cli_" + std::to_string(std::rand())))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("preset and run write the expected files")
{
    TempDir tmp;
    const std::string scen = (tmp.path / "case3.json").string();
    REQUIRE(exit_code("preset case3 --out " + scen) == 0);
    REQUIRE(fs::exists(scen));
    CHECK(exit_code("check " + scen) == 0);

    const fs::path out = tmp.path / "run";
    CHECK(exit_code("run " + scen + " --out " + out.string() + " --set sim.horizon=2 --seed 4") == 0);
    for (const char* f : {"trajectory.csv", "report.csv", "events.csv", "conditions.csv"}) {
        CHECK(fs::exists(out / f));
    }
    CHECK(slurp(out / "report.csv").find("algorithm,event_based") != std::string::npos);
}

TEST_CASE("repeated runs produce identical files")
{
    TempDir tmp;
    const std::string scen = (tmp.path / "case2.json").string();
    REQUIRE(exit_code("preset case2 --out " + scen) == 0);
    const fs::path a = tmp.path / "a";
    const fs::path b = tmp.path / "b";
    REQUIRE(exit_code("run " + scen + " --out " + a.string() + " --set sim.horizon=5") == 0);
    REQUIRE(exit_code("run " + scen + " --out " + b.string() + " --set sim.horizon=5") == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));
}

TEST_CASE("sweep writes one directory per value and a summary")
{
    TempDir tmp;
    const std::string scen = (tmp.path / "case1.json").string();
    REQUIRE(exit_code("preset case1 --out " + scen) == 0);
    const fs::path out = tmp.path / "sweep";
    CHECK(exit_code("sweep --param beta --values 0.5,1.5 " + scen + " --out " + out.string() +
                    " --set sim.horizon=2") == 0);
    CHECK(fs::exists(out / "beta=0.5" / "report.csv"));
    CHECK(fs::exists(out / "beta=1.5" / "report.csv"));
    const std::string summary = slurp(out / "sweep.csv");
    CHECK(summary.rfind("param,value,final_error,fitted_rate,final_spread\nbeta,0.5,", 0) == 0);
}

TEST_CASE("exit codes")
{
    TempDir tmp;
    const std::string scen = (tmp.path / "case1.json").string();
    REQUIRE(exit_code("preset case1 --out " + scen) == 0);

    CHECK(exit_code("check " + scen + " --set params.gamma=1") == 2);
    CHECK(exit_code("check " + scen + " --set params.beta=-1") == 2);
    CHECK(exit_code("preset case7 --out " + (tmp.path / "x.json").string()) == 2);
    CHECK(exit_code("run " + scen + " --out " + (tmp.path / "d").string() + " --set sim.step=0.5") == 3);
    CHECK(exit_code("check " + (tmp.path / "missing.json").string()) == 4);
    CHECK(exit_code("run " + scen + " --out /proc/nope --set sim.horizon=1") == 4);
    CHECK(exit_code("") != 0);
}
