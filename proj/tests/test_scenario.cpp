#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "doctest.h"
#include "resopt/errors.hpp"
#include "resopt/outputs.hpp"
#include "resopt/scenario.hpp"
#include "support.hpp"

using namespace resopt;
using nlohmann::json;

namespace {

std::string bundled(const std::string& name)
{
    return std::string(RESOPT_SCENARIO_DIR) + "/" + name + ".json";
}

std::string load_error(json doc)
{
    try {
        build_scenario(scenario_file_from_json(doc));
    } catch (const ValidationError& e) {
        return e.what();
    } catch (const std::exception& e) {
        return std::string("other: ") + e.what();
    }
    return "";
}

bool contains(const std::string& s, const std::string& part)
{
    return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("bundled scenario files match the presets")
{
    for (const auto& name : preset_names()) {
        const json file = read_json_file(bundled(name));
        CHECK(file == to_json(preset(name)));
    }
}

TEST_CASE("scenario documents round-trip through JSON")
{
    for (const auto& name : preset_names()) {
        const json doc = to_json(preset(name));
        const json again = to_json(scenario_file_from_json(json::parse(doc.dump())));
        CHECK(doc == again);
    }
}

TEST_CASE("bundled scenarios load")
{
    const Scenario c1 = load_scenario(bundled("case1"));
    CHECK(c1.num_agents() == 3);
    CHECK(c1.attacks.empty());
    const Scenario c2 = load_scenario(bundled("case2"));
    CHECK(c2.algorithm == Algorithm::time_based);
    CHECK(attack_metrics(c2.attacks, 0.0, c2.horizon).frequency <= 0.01);
    const Scenario c3 = load_scenario(bundled("case3"));
    CHECK(c3.algorithm == Algorithm::event_based);
    CHECK(c3.attacks.intervals() == c2.attacks.intervals());
    CHECK(c3.budget.has_value());
}

TEST_CASE("schema errors name the offending path")
{
    json doc = to_json(preset("case2"));

    json gen = doc;
    auto& cell = gen["graph_process"]["generator"][1][0];
    cell = cell.get<double>() + 0.1;
    CHECK(contains(load_error(gen), "generator row 1"));

    json overlap = doc;
    overlap["attacks"].erase("periodic");
    overlap["attacks"]["intervals"] = json::array({json::array({0.0, 3.0}), json::array({2.0, 1.0})});
    CHECK(contains(load_error(overlap), "overlapping"));

    json unknown = doc;
    unknown["params"]["gamma"] = 1.0;
    CHECK(contains(load_error(unknown), "params.gamma"));

    json kind = doc;
    kind["costs"][0]["kind"] = "cubic";
    CHECK(contains(load_error(kind), "costs[0].kind"));

    json count = doc;
    count["costs"].erase(count["costs"].begin());
    CHECK_FALSE(load_error(count).empty());

    json hurwitz = doc;
    hurwitz["agents"][0]["K"] = json::array({json::array({0.0, 0.0}), json::array({0.0, 0.0})});
    CHECK(contains(load_error(hurwitz), "Hurwitz"));
}

TEST_CASE("overrides")
{
    json doc = to_json(preset("case2"));
    apply_override(doc, "params.beta=1.5");
    CHECK(doc["params"]["beta"] == 1.5);
    apply_override(doc, "costs.0.params", "[1, -0.5, 0.5, 0.3]");
    CHECK(doc["costs"][0]["params"][0] == 1.0);
    apply_override(doc, "attacks.duty=1");
    const Scenario s = build_scenario(scenario_file_from_json(doc));
    CHECK(s.params.beta == 1.5);
    REQUIRE(s.attacks.intervals().size() == 1);
    CHECK(s.attacks.intervals()[0].duration == doctest::Approx(s.horizon - s.attacks.intervals()[0].start));
    CHECK_THROWS_AS(apply_override(doc, "no equals sign"), ValidationError);
    json c1 = to_json(preset("case1"));
    CHECK_THROWS_AS(apply_override(c1, "attacks.duty=0.5"), ValidationError);
    CHECK_THROWS_AS(preset("case9"), ValidationError);
}

TEST_CASE("format_number round-trips doubles")
{
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> exponent(-300.0, 300.0);
    for (int k = 0; k < 2000; ++k) {
        const double v = std::pow(10.0, exponent(gen)) * (k % 2 ? -1.0 : 1.0);
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("trajectory header layout")
{
    const Trajectory t = run(testing_support::preset_scenario("case3", {"sim.horizon=0.01"}));
    CHECK(trajectory_header(t) ==
          "t,x1_1,x1_2,y1,rho1,z1,u1_1,u1_2,eta_g1,eta_h1,"
          "x2_1,x2_2,y2,rho2,z2,u2_1,u2_2,eta_g2,eta_h2,"
          "x3_1,x3_2,x3_3,y3,rho3,z3,u3_1,u3_2,eta_g3,eta_h3,r_state,attack_active");
    const std::string csv = trajectory_csv(t);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(t.times.size()) + 1);
    CHECK(events_csv(t).rfind("agent,time,outcome\n1,0,success\n", 0) == 0);
}

TEST_CASE("condition rows for the bundled attack environment")
{
    const Rows rows = condition_rows(load_scenario(bundled("case2")));
    auto get = [&](const std::string& key) {
        for (const auto& [k, v] : rows) {
            if (k == key) {
                return v;
            }
        }
        return std::string("missing");
    };
    CHECK(get("attack_count") == "1");
    CHECK(get("attack_frequency") == "0.01");
    CHECK(get("frequency_pass") == "true");
    CHECK(get("duration_pass") == "true");
    CHECK(get("budget") == "missing");
    CHECK(rows_csv({{"a", "1"}}) == "key,value\na,1\n");

    const Rows none = condition_rows(load_scenario(bundled("case1")));
    CHECK(none.back() == std::make_pair(std::string("budget"), std::string("none")));
}

TEST_CASE("atomic writes")
{
    const auto dir = std::filesystem::temp_directory_path() / "resopt_atomic_test";
    std::filesystem::create_directories(dir);
    const std::string target = (dir / "out.csv").string();
    write_file_atomic(target, "first\n");
    write_file_atomic(target, "second\n");
    std::ifstream in(target);
    std::string line;
    std::getline(in, line);
    CHECK(line == "second");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) {
        ++entries;
    }
    CHECK(entries == 1);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(write_file_atomic("/proc/nope/out.csv", "x"), IoError);
    CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), IoError);
}
