#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fracext/experiments.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fracext;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config parsing: round trip, lists, comments, unknown keys") {
    ExperimentConfig c = parse_config_text(
        "# comment\n"
        "kind = rate_vs_n\n"
        "geometry = interval\n"
        "s = 0.5\n"
        "n = 1e1, 1e2, 1e3\n"
        "target_dofs = 120\n"
        "outdir = /tmp/fracext_cfg_test\n");
    CHECK(c.kind == ExperimentConfig::Kind::RateVsN);
    CHECK(c.n_values.size() == 3);
    CHECK(c.n_values[2] == doctest::Approx(1e3));

    CHECK_THROWS(parse_config_text("bogus_key = 1\n"));
    CHECK_THROWS(parse_config_text("kind = unknown_kind\n"));
    CHECK_THROWS(parse_config_text("s = 1.7\n"));
    CHECK_THROWS(parse_config_text("n = 0.5\n"));
    CHECK_THROWS(parse_config_text("no equals sign here\n"));
}

TEST_CASE("slope fitting: exact powers, scale invariance, row minimum") {
    std::vector<std::pair<double, double>> rows;
    for (double p : {10.0, 100.0, 1000.0, 10000.0}) rows.emplace_back(p, 3.0 * std::pow(p, -0.5));
    RateReport r = fit_rate(rows);
    CHECK(r.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(r.r_squared == doctest::Approx(1.0).epsilon(1e-10));

    // doubling every parameter leaves the slope invariant
    std::vector<std::pair<double, double>> scaled;
    for (auto [p, e] : rows) scaled.emplace_back(2.0 * p, e);
    CHECK(std::abs(fit_rate(scaled).slope - r.slope) < 0.02);

    rows.resize(2);
    CHECK_THROWS(fit_rate(rows));
}

TEST_CASE("rate_vs_n writes reproducible artifacts with a manifest") {
    TempDir dir("fracext_test_rate_n");
    ExperimentConfig c;
    c.kind = ExperimentConfig::Kind::RateVsN;
    c.geometry = "interval";
    c.target_dofs = 120;
    c.n_values = {1e2, 1e3, 1e4};
    c.outdir = (dir.path / "a").string();
    RateReport r1 = run_rate_vs_n(c);
    CHECK(r1.rows.size() == 3);
    CHECK(r1.slope < -0.85);
    CHECK(r1.slope > -1.15);
    // errors positive and decreasing in n
    for (size_t k = 0; k + 1 < r1.rows.size(); ++k) {
        CHECK(r1.rows[k].second > 0.0);
        CHECK(r1.rows[k + 1].second < r1.rows[k].second);
    }
    std::string csv1 = slurp(c.outdir + "/rates.csv");
    CHECK(csv1.rfind("param,error\n", 0) == 0);
    std::string manifest = slurp(c.outdir + "/manifest.txt");
    CHECK(manifest.find("kind = rate_vs_n") != std::string::npos);
    CHECK(manifest.find("version = ") != std::string::npos);

    c.outdir = (dir.path / "b").string();
    run_rate_vs_n(c);
    CHECK(csv1 == slurp(c.outdir + "/rates.csv"));  // bitwise reproducible
}

TEST_CASE("rate_vs_dofs on a 1D benchmark produces decreasing errors") {
    TempDir dir("fracext_test_rate_dofs");
    ExperimentConfig c;
    c.kind = ExperimentConfig::Kind::RateVsDofs;
    c.geometry = "interval";
    c.target_dofs = 160;
    c.refinements = 2;
    c.n_values = {1e5};
    c.outdir = dir.path.string();
    std::vector<RateCurve> curves = run_rate_vs_dofs(c);
    REQUIRE(curves.size() == 1);
    const auto& rows = curves.front().report.rows;
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].second < rows[0].second);
    CHECK(rows[2].second < rows[1].second);
    CHECK(curves.front().report.slope < -0.3);

    ExperimentConfig bad = c;
    bad.refinements = 1;
    CHECK_THROWS(run_rate_vs_dofs(bad));
}

TEST_CASE("source identification smoke run writes fields and summaries") {
    TempDir dir("fracext_test_source");
    ExperimentConfig c;
    c.kind = ExperimentConfig::Kind::SourceId;
    c.geometry = "square_in_disk";
    c.target_h = 0.2;
    c.s_values = {0.3};
    c.xi_values = {1e-4, 1e-8};
    c.n_values = {1e5};
    c.max_iterations = 60;
    c.outdir = dir.path.string();
    std::vector<SourceIdRow> rows = run_source_identification(c);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(std::isfinite(r.control_norm));
        CHECK(r.control_norm > 0.0);
        CHECK(r.iterations > 0);
    }
    // smaller xi gives at least as large a recovered control
    CHECK(rows[1].control_norm >= rows[0].control_norm * (1.0 - 1e-9));
    CHECK(fs::exists(dir.path / "controls.csv"));
    CHECK(fs::exists(dir.path / "manifest.txt"));
    int fields = 0;
    for (const auto& e : fs::directory_iterator(dir.path))
        if (e.path().extension() == ".field") ++fields;
    CHECK(fields == 4);  // control + state per (s, xi)
}

TEST_CASE("dirichlet control smoke run beats the uncontrolled baseline") {
    TempDir dir("fracext_test_dctl");
    ExperimentConfig c;
    c.kind = ExperimentConfig::Kind::DirichletControl;
    c.geometry = "disk";
    c.target_h = 0.22;
    c.s_values = {0.3};
    c.xi_values = {1e-6};
    c.n_values = {1e4};
    c.max_iterations = 60;
    c.outdir = dir.path.string();
    std::vector<ControlExampleRow> rows = run_dirichlet_control(c);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].tracking_error < rows[0].baseline_error);
    CHECK(rows[0].control_norm > 0.0);
}

TEST_CASE("gaussian noise generator is seeded and deterministic") {
    auto a = gaussian_samples(42, 1001, 0.02);
    auto b = gaussian_samples(42, 1001, 0.02);
    CHECK(a == b);
    auto c = gaussian_samples(43, 1001, 0.02);
    CHECK(a != c);
    double mean = 0.0, var = 0.0;
    for (double v : a) mean += v;
    mean /= a.size();
    for (double v : a) var += (v - mean) * (v - mean);
    var /= a.size();
    CHECK(std::abs(mean) < 0.003);
    CHECK(std::abs(std::sqrt(var) - 0.02) < 0.003);
}
