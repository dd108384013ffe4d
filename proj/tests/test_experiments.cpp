#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "aplab/errors.hpp"
#include "aplab/experiments.hpp"
#include "doctest.h"

using namespace aplab;
namespace fs = std::filesystem;

namespace {

Scenario tiny_scenario() {
    Scenario s;
    s.name = "tiny1d";
    s.dim = 1;
    s.gamma = 1.5;
    s.shape = "interval";
    s.resolution = 64;
    s.generator = "profile";
    s.solve.tol_residual = 1e-9;
    s.weiss_radii = {0.5, 1.0};
    s.growth_radii = {0.125, 0.25, 0.5, 1.0};
    s.blowup_radii = {0.25, 0.5};
    s.contact_radii = {0.25, 0.5};
    s.directions = {"e_1"};
    s.nondeg_a_rel = 0.01;
    s.run_transform_w = true;
    s.run_first_integral = true;
    s.gradient_at_origin = true;
    return s;
}

struct TempDir {
    fs::path root;
    explicit TempDir(const std::string& name) : root(fs::path("tmp_test") / name) {
        fs::create_directories(root);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all("tmp_test", ec);
    }
};

} // namespace

TEST_CASE("run_scenario produces a complete report") {
    TempDir td("report");
    nlohmann::json rep = run_scenario(tiny_scenario(), td.root.string());

    CHECK(rep["format_version"] == kReportFormatVersion);
    CHECK(rep["scenario"]["name"] == "tiny1d");
    CHECK(rep["operator_audit"]["convexity_violations"] == 0);

    REQUIRE(rep.contains("solve"));
    CHECK(!rep["solve"].contains("error_code"));
    CHECK(rep["solve"]["sweeps"].get<long>() > 0);
    CHECK(rep["solve"]["final_residual"].get<double>() <=
          rep["solve"]["effective_tol"].get<double>());
    CHECK(rep["solve"]["energy"]["nonincreasing"] == true);

    CHECK(rep["growth"]["slope"].get<double>() == doctest::Approx(4.0).epsilon(0.02));
    CHECK(rep["weiss"]["values"].size() == 2);
    CHECK(rep["nondegeneracy"]["holds"] == true);
    CHECK(rep["monotonicity"]["directions"][0]["monotone"] == true);
    CHECK(rep["transform_w"]["A"] == 0.75);
    CHECK(rep["first_integral"]["sup_abs"].get<double>() <= 1e-4);
    CHECK(rep["gradient_at_origin"]["value"].get<double>() <= 1e-4);
    CHECK(rep["profile_overlay"]["x"].size() == rep["profile_overlay"]["oracle"].size());

    // artifacts land on disk
    const fs::path dir = td.root / "tiny1d";
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "field.csv"));
    for (const auto& name : rep["artifacts"]["plots"]) {
        CHECK(fs::exists(dir / name.get<std::string>()));
    }

    // the written report parses back to the same content
    std::ifstream in(dir / "report.json");
    nlohmann::json back = nlohmann::json::parse(in);
    CHECK(back == rep);
}

TEST_CASE("reports are deterministic") {
    TempDir td("determinism");
    nlohmann::json a = run_scenario(tiny_scenario(), (td.root / "a").string());
    nlohmann::json b = run_scenario(tiny_scenario(), (td.root / "b").string());
    CHECK(a == b);
}

TEST_CASE("svg plots are well formed") {
    TempDir td("plots");
    nlohmann::json rep = run_scenario(tiny_scenario(), td.root.string());
    for (const auto& name : rep["artifacts"]["plots"]) {
        std::ifstream in(td.root / "tiny1d" / name.get<std::string>());
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(text.rfind("<svg", 0) == 0);
        CHECK(text.find("</svg>") != std::string::npos);
    }
}

TEST_CASE("suite runs scenarios and evaluates assertions") {
    TempDir td("suite");
    // manifest and scenario files live side by side
    {
        std::ofstream scn(td.root / "tiny.cfg");
        scn << "name = tiny\n"
               "dim = 1\n"
               "gamma = 1.5\n"
               "[domain]\n"
               "shape = interval\n"
               "resolution = 64\n"
               "[boundary]\n"
               "generator = profile\n"
               "[solver]\n"
               "tol = 1e-9\n"
               "[analysis]\n"
               "growth_radii = 0.125, 0.25, 0.5, 1.0\n"
               "weiss_radii = 0.5, 1.0\n";
        std::ofstream man(td.root / "suite.manifest");
        man << "# demo manifest\n"
               "scenario tiny.cfg\n"
               "assert tiny growth.slope between 3.8 4.2\n"
               "assert tiny solve.sweeps > 0\n"
               "assert tiny weiss.max_drop <= 1e-5\n"
               "assert tiny solve.energy.nonincreasing == true\n";
    }
    SuiteResult res = run_suite((td.root / "suite.manifest").string(), (td.root / "out").string());
    CHECK(res.all_passed);
    CHECK(res.summary["assertions"].size() == 4);
    for (const auto& a : res.summary["assertions"]) CHECK(a["status"] == "pass");
    CHECK(fs::exists(td.root / "out" / "summary.json"));
    CHECK(fs::exists(td.root / "out" / "tiny" / "report.json"));

    // a failing assertion flips the suite result
    {
        std::ofstream man(td.root / "failing.manifest");
        man << "scenario tiny.cfg\n"
               "assert tiny growth.slope > 100\n";
    }
    SuiteResult bad = run_suite((td.root / "failing.manifest").string(),
                                (td.root / "out2").string());
    CHECK_FALSE(bad.all_passed);
}

TEST_CASE("weiss monotonicity assertions are downgraded off the laplacian") {
    TempDir td("downgrade");
    {
        std::ofstream scn(td.root / "pt.cfg");
        scn << "name = pt\n"
               "dim = 1\n"
               "[operator]\n"
               "kind = perturbed_trace\n"
               "theta = 0.1\n"
               "[domain]\n"
               "shape = interval\n"
               "resolution = 64\n"
               "[solver]\n"
               "tol = 1e-8\n"
               "[analysis]\n"
               "weiss_radii = 0.5, 1.0\n";
        std::ofstream man(td.root / "m.manifest");
        man << "scenario pt.cfg\n"
               "assert pt weiss.max_drop <= 1e-9\n";
    }
    SuiteResult res = run_suite((td.root / "m.manifest").string(), (td.root / "out").string());
    CHECK(res.all_passed); // downgraded, not failed
    bool saw_downgrade = false;
    for (const auto& a : res.summary["assertions"])
        if (a["status"] == "reported_not_asserted") saw_downgrade = true;
    CHECK(saw_downgrade);
}

TEST_CASE("malformed manifests are rejected") {
    TempDir td("badman");
    {
        std::ofstream man(td.root / "bad.manifest");
        man << "frobnicate tiny.cfg\n";
    }
    CHECK_THROWS_AS(run_suite((td.root / "bad.manifest").string(), (td.root / "o").string()),
                    ManifestError);
    {
        std::ofstream man(td.root / "empty.manifest");
        man << "# nothing\n";
    }
    CHECK_THROWS_AS(run_suite((td.root / "empty.manifest").string(), (td.root / "o2").string()),
                    ManifestError);
    {
        std::ofstream man(td.root / "unknown.manifest");
        man << "assert ghost solve.sweeps > 0\n";
    }
    CHECK_THROWS_AS(run_suite((td.root / "unknown.manifest").string(), (td.root / "o3").string()),
                    ManifestError);
    CHECK_THROWS_AS(run_suite("no_such.manifest", (td.root / "o4").string()), ManifestError);
}

TEST_CASE("solve failures are recorded in the report instead of aborting") {
    TempDir td("failrec");
    Scenario s = tiny_scenario();
    s.name = "capped";
    s.solve.max_sweeps = 2; // cannot converge
    nlohmann::json rep = run_scenario(s, td.root.string());
    REQUIRE(rep["solve"].contains("error_code"));
    CHECK(rep["solve"]["error_code"] == "convergence");
    CHECK(fs::exists(td.root / "capped" / "report.json"));
}
