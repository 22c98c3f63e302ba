// Runs the built command-line tool and checks exit codes, reports and written files.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "hgr/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh scratch directory named after the running test.
fs::path scratch()
{
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    const fs::path dir = fs::temp_directory_path() / (std::string("hgr_cli_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Run cli(const std::string& args)
{
    const fs::path dir = fs::temp_directory_path() / "hgr_cli_streams";
    fs::create_directories(dir);
    const fs::path out = dir / "stdout", err = dir / "stderr";
    const std::string cmd = std::string("'") + HGR_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string group_file(const std::string& name) { return std::string(HGR_DATA_DIR) + "/groups/" + name + ".json"; }

} // namespace

TEST(Cli, HelpListsEveryCommand)
{
    const auto r = cli("--help");
    EXPECT_EQ(r.code, 0);
    for (const char* c : {"check-group", "compile-law", "grass-net", "cg-estimate", "tangent-fit", "blowup", "density", "tube-check",
                          "area-check", "lipschitz-cover", "gen-fixture", "equiv-suite", "suite"})
        EXPECT_NE(r.out.find(c), std::string::npos) << c;
}

TEST(Cli, CheckGroupPrintsPassingReport)
{
    const auto r = cli("check-group --group '" + group_file("engel") + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["command"], "check-group");
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["config"]["group"], group_file("engel"));
    EXPECT_TRUE(j["timestamps"].contains("wall_seconds"));
}

TEST(Cli, MissingGroupFileIsInputError)
{
    const auto r = cli("check-group --group /nonexistent/group.json");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("/nonexistent/group.json"), std::string::npos) << r.err;
}

TEST(Cli, CorruptGroupFileIsNamed)
{
    const auto dir = scratch();
    const auto bad = dir / "broken.json";
    std::ofstream(bad) << "{\"name\": \"broken\", \"step\": 2, \"layers\": [2, 1], \"brackets\": [[1, 2";
    const auto r = cli("check-group --group '" + bad.string() + "'");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(bad.string()), std::string::npos) << r.err;
}

TEST(Cli, MalformedArgumentsAreInputErrors)
{
    EXPECT_EQ(cli("density --fixture no-such-fixture").code, 1);
    EXPECT_EQ(cli("density --fixture lifted-curve --params '[1, 2]'").code, 1);
    EXPECT_EQ(cli("density --fixture lifted-curve --params '{oops'").code, 1);
    EXPECT_EQ(cli("check-group --norm no-such-norm").code, 1);
    EXPECT_EQ(cli("no-such-command").code, 1);
    EXPECT_EQ(cli("").code, 1);
}

TEST(Cli, NonEmptyConeIsQuantitativeFailure)
{
    // A segment almost orthogonal to T puts its own samples in each other's vertical cones.
    const auto r = cli("lipschitz-cover --fixture horizontal-segment --params '{\"spacing\": 1e-3, \"angle\": 1.5}' --opening 0.5");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("ConeNotEmpty"), std::string::npos) << r.err;
}

TEST(Cli, LipschitzCoverWithinBound)
{
    const auto r = cli("lipschitz-cover --fixture horizontal-segment --params '{\"spacing\": 1e-3, \"angle\": 0.9}' --opening 0.5");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_LE(j["results"]["constant"].get<double>(), 2.0 + 1e-6);
}

TEST(Cli, GenFixtureWritesLoadableMeasure)
{
    const auto dir = scratch();
    const auto r = cli("gen-fixture --group '" + group_file("abelian2") +
                       "' --fixture four-corner-cantor --params '{\"generations\": 3}' --out '" + dir.string() + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto file = dir / "four-corner-cantor.json";
    ASSERT_TRUE(fs::exists(file));
    ASSERT_TRUE(fs::exists(dir / "gen-fixture.json"));
    const auto report = json::parse(slurp(dir / "gen-fixture.json"));
    EXPECT_EQ(report["results"]["points"], 64);
    EXPECT_TRUE(report["results"]["purely_unrectifiable"].get<bool>());

    // The written file feeds back in through --measure. Three generations are too coarse
    // for the density band, so only the exit code's class matters here.
    const auto d = cli("density --group '" + group_file("abelian2") + "' --measure '" + file.string() + "' --points 4 --r0 0.5 --count 2");
    ASSERT_NE(d.code, 1) << d.err;
    EXPECT_EQ(json::parse(d.out)["results"]["points"].size(), 4u);

    const auto wrong = cli("density --measure '" + file.string() + "' --points 4");
    EXPECT_EQ(wrong.code, 1);
    EXPECT_NE(wrong.err.find("DimensionMismatch"), std::string::npos) << wrong.err;
}

TEST(Cli, DensityWritesTablesAndPlots)
{
    const auto dir = scratch();
    const auto r = cli("density --fixture tilted-graph --params '{\"spacing\": 1e-3}' --point 500 --out '" + dir.string() + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("report written"), std::string::npos);
    const std::string csv = slurp(dir / "density_500.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "scale,excess,density,blowup_discrepancy");
    const std::string svg = slurp(dir / "density_500.svg");
    EXPECT_NE(svg.find("<g id=\"density\">"), std::string::npos);
    EXPECT_TRUE(json::parse(slurp(dir / "density.json"))["passed"].get<bool>());
}

TEST(Cli, PointOutsideMeasureIsRejected)
{
    const auto r = cli("density --fixture horizontal-segment --params '{\"spacing\": 1e-2}' --point 100000");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("outside"), std::string::npos) << r.err;
}

TEST(Cli, RerunFromReportConfigIsIdentical)
{
    const auto dir = scratch();
    const std::string args = "blowup --fixture lifted-curve --params '{\"spacing\": 1e-4}' --r0 0.03125 --points 3 --seed 7";
    const auto first = cli(args);
    ASSERT_EQ(first.code, 0) << first.err;
    std::ofstream(dir / "report.json") << first.out;

    const auto second = cli("blowup --config '" + (dir / "report.json").string() + "'");
    ASSERT_EQ(second.code, 0) << second.err;
    EXPECT_EQ(hgr::deterministic_dump(json::parse(first.out)), hgr::deterministic_dump(json::parse(second.out)));

    // Flags on the command line override the loaded config.
    const auto third = cli("blowup --config '" + (dir / "report.json").string() + "' --seed 8");
    ASSERT_EQ(third.code, 0) << third.err;
    const auto j = json::parse(third.out);
    EXPECT_EQ(j["config"]["seed"], 8);
    EXPECT_EQ(j["config"]["fixture"], "lifted-curve");
}

TEST(Cli, UnreadableConfigIsInputError)
{
    const auto r = cli("blowup --config /nonexistent/config.json");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("/nonexistent/config.json"), std::string::npos) << r.err;
}

TEST(Cli, EquivSuiteSeparatesCurveFromCantorSet)
{
    const auto curve = cli("equiv-suite --fixture lifted-curve --params '{\"spacing\": 1e-4}' --points 4 --r0 0.03125");
    ASSERT_EQ(curve.code, 0) << curve.err;
    const auto c = json::parse(curve.out);
    EXPECT_EQ(c["results"]["verdict"], "rectifiable-consistent");

    const auto cantor = cli("equiv-suite --group '" + group_file("abelian2") +
                            "' --fixture four-corner-cantor --params '{\"generations\": 6}' --points 4 --r0 0.125");
    ASSERT_EQ(cantor.code, 0) << cantor.err;
    const auto k = json::parse(cantor.out);
    EXPECT_EQ(k["results"]["verdict"], "unrectifiable-consistent");
    EXPECT_EQ(k["results"]["expected"], "unrectifiable-consistent");
}

TEST(Cli, AreaCheckOnHorizontalSegment)
{
    const auto r = cli("area-check --fixture horizontal-segment --params '{\"spacing\": 1e-3}' --delta 0.01");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["results"]["ratio"].get<double>(), 1.0, 0.1);
}

TEST(CliSuite, ListsTwelveCriteria)
{
    const auto r = cli("suite --list");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        EXPECT_EQ(line.rfind(std::to_string(n) + " ", 0), 0u) << line;
    }
    EXPECT_EQ(n, 12);
}

TEST(CliSuite, SelectedCriterionReport)
{
    const auto dir = scratch();
    const auto r = cli("suite --criteria 3 --out '" + dir.string() + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("[PASS] 3"), std::string::npos) << r.err;
    const auto j = json::parse(slurp(dir / "suite.json"));
    ASSERT_EQ(j["results"]["criteria"].size(), 1u);
    EXPECT_EQ(j["results"]["criteria"][0]["id"], 3);
    for (const auto& v : j["verdicts"]) EXPECT_EQ(v["name"].get<std::string>().rfind("3.", 0), 0u);
}

TEST(CliSuite, UnknownCriterionIsInputError)
{
    EXPECT_EQ(cli("suite --criteria 13").code, 1);
    EXPECT_EQ(cli("suite --criteria 0").code, 1);
}

TEST(CliSuite, CorruptDataDirectoryNamesTheFile)
{
    const auto dir = scratch();
    fs::copy(std::string(HGR_DATA_DIR), dir / "data", fs::copy_options::recursive);
    const auto bad = dir / "data" / "groups" / "heisenberg.json";
    std::ofstream(bad, std::ios::trunc) << "{\"name\": \"heisenberg\", \"step\": 2, \"layers\": [2, 1], \"brackets\": [[1, 2, 3, \"x\"]]}";
    const auto r = cli("suite --criteria 1 --data '" + (dir / "data").string() + "'");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(bad.string()), std::string::npos) << r.err;
}
