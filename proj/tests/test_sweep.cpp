#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "retroscope/sweep.hpp"
#include "support/oracles.hpp"

using namespace retroscope;
namespace fs = std::filesystem;

namespace {

SweepConfig config(const std::string& task, int loops, double lo, double hi, int steps) {
    SweepConfig c;
    c.task = task;
    c.loops = loops;
    c.theta_min = lo;
    c.theta_max = hi;
    c.steps = steps;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("retroscope_test_" + name); }

}  // namespace

TEST(Sweep, ConfigValidation) {
    EXPECT_THROW(run_sweep(config("nope", 2, 0, 0.5, 3)), std::invalid_argument);
    EXPECT_THROW(run_sweep(config("srm", 4, 0, 0.5, 3)), std::invalid_argument);
    EXPECT_THROW(run_sweep(config("srm", 2, 0, 0.5, 1)), std::invalid_argument);
    EXPECT_THROW(run_sweep(config("srm", 2, 0.5, 0.1, 3)), std::invalid_argument);
    EXPECT_THROW(run_sweep(config("srm", 2, 0, 1.0, 3)), std::invalid_argument);
    EXPECT_THROW(run_sweep(config("eliminate", 3, 0.4, 0.7, 3)), std::invalid_argument);
    EXPECT_THROW(run_sweep(config("eliminate", 2, 0.0, 0.7, 3)), NumericalError);
}

TEST(Sweep, GridEndsExactly) {
    const auto t = config("srm", 2, 0.1, kQuarterPi, 7).thetas();
    EXPECT_EQ(t.front(), 0.1);
    EXPECT_EQ(t.back(), kQuarterPi);
}

TEST(Sweep, RetrodictFirstPosition) {
    const auto t = run_sweep(config("retrodict-1", 2, 0, kQuarterPi, 5));
    const double expected[] = {0.5, 0.676776695297, 0.75, 0.676776695297, 0.5};
    ASSERT_EQ(t.rows.size(), 5u);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(t.rows[i].value, expected[i], 1e-11);
}

TEST(Sweep, SquareRootSinglePoint) {
    const auto t = run_sweep(config("srm", 2, kEighthPi, kEighthPi, 2));
    EXPECT_NEAR(t.rows[0].value, 0.46338834764, 1e-10);
}

TEST(Sweep, ThreeLoopOptimumAtFullStrength) {
    const auto t = run_sweep(config("optimize", 3, kQuarterPi, kQuarterPi, 2));
    EXPECT_NEAR(t.rows[0].value, 0.25, 1e-6);
    EXPECT_EQ(t.extra_columns.size(), 9u);
    EXPECT_EQ(t.rows[0].extras.size(), 9u);
}

TEST(Sweep, BayesColumns) {
    const auto t = run_sweep(config("bayes", 2, 0, kQuarterPi, 11));
    for (const auto& r : t.rows) {
        const double s = std::sin(2 * r.theta), c = std::cos(2 * r.theta);
        EXPECT_NEAR(r.value, 0.5 * (1 + s), 1e-10);
        EXPECT_NEAR(r.extras[0], 0.5 * (1 - s * c), 1e-12);
        EXPECT_GE(r.value, r.extras[0]);
        EXPECT_NEAR(r.extras[1], 0.5 * (1 - s), 1e-10);
        EXPECT_NEAR(r.extras[3], 0.5 * (1 + s * c), 1e-10);
        EXPECT_NEAR(r.extras[4], 0.5 * (1 - s * c), 1e-10);
    }
}

TEST(Sweep, EliminationResiduals) {
    const auto t = run_sweep(config("eliminate", 2, kEighthPi, kQuarterPi, 9));
    for (const auto& r : t.rows) {
        EXPECT_NEAR(r.value + r.extras[0], 1.0, 1e-12);
        EXPECT_LT(r.extras[1], 1e-10);
        EXPECT_LT(r.extras[2], 1e-12);
    }
}

TEST(Csv, HeaderRowsAndFormatting) {
    auto t = run_sweep(config("angles", 2, 0, kQuarterPi, 2));
    const std::string csv = csv_text(t);
    EXPECT_EQ(csv, "theta,task,loops,value,phi2\n0,angles,2,0,0\n0.785398163397,angles,2,0,1.57079632679\n");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Csv, ByteIdenticalAcrossRuns) {
    const auto a = temp_path("a.csv"), b = temp_path("b.csv");
    emit_csv(run_sweep(config("optimize", 3, 0.1, 0.7, 3)), a.string());
    emit_csv(run_sweep(config("optimize", 3, 0.1, 0.7, 3)), b.string());
    EXPECT_EQ(slurp(a), slurp(b));
    fs::remove(a);
    fs::remove(b);
}

TEST(Csv, EmptyTableCreatesNoFile) {
    const auto p = temp_path("empty.csv");
    fs::remove(p);
    ResultTable t;
    t.task = "srm";
    EXPECT_THROW(emit_csv(t, p.string()), std::invalid_argument);
    EXPECT_THROW(emit_svg(t, p.string()), std::invalid_argument);
    EXPECT_FALSE(fs::exists(p));
}

TEST(Csv, UnwritablePath) {
    const auto t = run_sweep(config("srm", 2, 0, 0.5, 2));
    EXPECT_THROW(emit_csv(t, "/nonexistent-dir/x.csv"), std::runtime_error);
}

TEST(Svg, AnglesPlotHasDottedAndSolidSeries) {
    const std::string svg = svg_text(run_sweep(config("angles", 2, 0, kQuarterPi, 21)));
    EXPECT_NE(svg.find("viewBox=\"0 0 800 500\""), std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++polylines;
    EXPECT_EQ(polylines, 2u);
    const auto phi1 = svg.find("<title>phi1</title>");
    const auto phi2 = svg.find("<title>phi2</title>");
    ASSERT_NE(phi1, std::string::npos);
    ASSERT_NE(phi2, std::string::npos);
    const auto line1 = svg.rfind("<polyline", phi1);
    const auto line2 = svg.rfind("<polyline", phi2);
    EXPECT_NE(svg.substr(line1, phi1 - line1).find("stroke-dasharray=\"2 4\""), std::string::npos);
    EXPECT_EQ(svg.substr(line2, phi2 - line2).find("stroke-dasharray"), std::string::npos);
    EXPECT_NE(svg.find("theta (rad)"), std::string::npos);
}
