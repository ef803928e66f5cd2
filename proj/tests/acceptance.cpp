// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "retroscope/retroscope.hpp"
#include "support/oracles.hpp"

using namespace retroscope;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail = what;
        ok = ok && cond;
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os.precision(15);
        os << what << ": got " << got << ", want " << want << " +- " << tol;
        require(std::abs(got - want) <= tol, os.str());
    }
    void at_least(double got, double bound, const std::string& what) {
        std::ostringstream os;
        os.precision(15);
        os << what << ": " << got << " < " << bound;
        require(got >= bound, os.str());
    }
};

std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(lo + (hi - lo) * i / (n - 1));
    t.back() = hi;
    return t;
}

TrajectoryTable loops(int n, double theta) { return enumerate_trajectories(build_circuit(n, theta)); }

std::vector<ComplexVec> weighted(const std::vector<PureHypothesis>& hs) {
    std::vector<ComplexVec> u;
    for (const auto& h : hs) u.push_back(std::sqrt(h.prior) * h.state);
    return u;
}

Check criterion1() {
    Check c;
    for (double t : grid(0, kQuarterPi, 101)) {
        const auto tab = loops(2, t);
        c.near(retrodict_position(tab, 2).success_probability, 0.5 * (1 + std::sin(2 * t)), 1e-10, "position 2");
        c.near(retrodict_position(tab, 1).success_probability, 0.5 + 0.25 * std::sin(4 * t), 1e-10, "position 1");
    }
    c.near(retrodict_position(loops(2, kEighthPi), 1).success_probability, 0.75, 1e-10, "P_s(pi/8, 1)");
    c.near(retrodict_position(loops(2, kQuarterPi), 2).success_probability, 1.0, 1e-10, "P_s(pi/4, 2)");
    return c;
}

Check criterion2() {
    Check c;
    for (double t : grid(0, kQuarterPi, 101)) {
        const double s = std::sin(2 * t), k = std::cos(2 * t);
        const auto a = two_loop_bayes(t, 2, "+"), b = two_loop_bayes(t, 2, "-");
        const auto d = two_loop_bayes(t, 1, "+"), e = two_loop_bayes(t, 1, "-");
        c.near(a.posterior_plus, 0.5 * (1 + s), 1e-10, "P(2+|+)");
        c.near(b.posterior_plus, 0.5 * (1 - s), 1e-10, "P(2+|-)");
        c.near(d.posterior_plus, 0.5 * (1 + s * k), 1e-10, "P(1+|+)");
        c.near(e.posterior_plus, 0.5 * (1 - s * k), 1e-10, "P(1+|-)");
        c.near(a.prior_plus, 0.5 * (1 - s * k), 1e-10, "P(2+)");
        c.at_least(a.posterior_plus, a.prior_plus, "monotone update");
    }
    return c;
}

Check criterion3() {
    Check c;
    for (double t : grid(0, kQuarterPi, 101)) {
        const double s = std::sin(2 * t);
        c.near(square_root_povm(trajectory_hypotheses(loops(2, t))).success_probability,
               0.25 * (1 + s + s * s - s * s * s), 1e-10, "square-root success");
    }
    c.near(square_root_povm(trajectory_hypotheses(loops(2, 0))).success_probability, 0.25, 1e-10, "theta=0");
    c.near(square_root_povm(trajectory_hypotheses(loops(2, kQuarterPi))).success_probability, 0.5, 1e-10,
           "theta=pi/4");
    return c;
}

Check criterion4() {
    Check c;
    for (double t : grid(0, kQuarterPi, 51)) {
        const double srm = square_root_povm(trajectory_hypotheses(loops(2, t))).success_probability;
        c.at_least(optimize_2loop(t).success, srm - 1e-9, "2-loop dominance");
    }
    c.near(optimize_2loop(kQuarterPi).success, 0.5, 1e-6, "2-loop at pi/4");

    SweepConfig cfg;
    cfg.task = "optimize";
    cfg.loops = 3;
    cfg.steps = 51;
    const auto start = std::chrono::steady_clock::now();
    const auto table = run_sweep(cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(seconds <= 60.0, "3-loop sweep took " + std::to_string(seconds) + " s");
    std::size_t best = 0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        c.at_least(table.rows[i].value, table.rows[i].extras[0] - 1e-9, "3-loop dominance");
        if (table.rows[i].value > table.rows[best].value) best = i;
    }
    c.near(table.rows.back().value, 0.25, 1e-6, "3-loop at pi/4");
    c.require(best > 0 && best + 1 < table.rows.size(), "3-loop maximum not interior");
    std::printf("  3-loop sweep: 51 points in %.2f s, maximum %.6f at theta=%.6f\n", seconds, table.rows[best].value,
                table.rows[best].theta);
    return c;
}

Check criterion5() {
    Check c;
    for (double t : grid(kEighthPi, kQuarterPi, 51)) {
        const auto e = elimination_povm(t);
        const Povm p = e.povm();
        c.require(p.completeness_error() <= 1e-10, "completeness");
        c.require(p.min_eigenvalue() >= -1e-12, "PSD");
        c.require(e.c1 >= 0 && e.c2 >= 0, "weights");
        const auto tab = loops(2, t);
        for (const auto& el : e.elements)
            c.near(std::abs(inner(el.gamma, *tab.at(el.label).output_state)), 0.0, 1e-12, "overlap " + el.label);
    }
    int cases = 0;
    const std::vector<std::string> labels{"++", "-+", "+-", "--"};
    for (const auto& out : labels)
        for (const auto& truth : labels) {
            if (truth == out) continue;
            const auto g = elimination_guess(out);
            c.require(g[0] == truth[0] || g[1] == truth[1], "guess rule " + out + " vs " + truth);
            ++cases;
        }
    c.require(cases == 12, "12 guess cases");
    return c;
}

Check criterion6() {
    Check c;
    oracle::Random r(20260101);
    const std::vector<std::string> labels{"++", "-+", "+-", "--"};
    for (int i = 0; i < 1000; ++i) {
        const std::size_t dim = 2 + i % 2;
        const auto psi = r.state(dim);
        const auto k = r.kraus_pair(dim);
        const auto q = r.projective(dim, 1 + i % (dim - 1));
        const Povm in = r.povm(labels, dim);
        const auto hyps = two_measurement_hypotheses(psi, k, q);
        c.at_least(success_probability(hyps, povm_block_projection(in, q)), success_probability(hyps, in) - 1e-10,
                   "block projection");
    }
    for (int i = 0; i < 100; ++i) {
        const auto psi = r.state(2);
        const auto k = r.kraus_pair(2);
        const auto q = r.projective(2, 1);
        const double best = oracle::optimal_success(weighted(two_measurement_hypotheses(psi, k, q)), false, 50);
        c.near(projective_second_strategy(psi, k, q).success_probability, best, 1e-6, "sequential strategy");
    }
    return c;
}

Check criterion7() {
    Check c;
    oracle::Random r(77);
    for (int i = 0; i < 10000; ++i) {
        const auto psi = r.state(2);
        const auto k = r.kraus_pair(2);
        const auto q = r.projective(2, 1);
        c.near(qubit_lambda_factorized(psi, k, q), two_measurement_lambda(psi, k, q), 1e-12, "qubit equality");
    }
    for (int i = 0; i < 10000; ++i) {
        const auto psi = r.state(3);
        const auto k = r.kraus_pair(3);
        const auto q = r.projective(3, 1);
        c.require(qubit_lambda_factorized(psi, k, q) <= two_measurement_lambda(psi, k, q) + 1e-12, "lower bound");
    }
    return c;
}

Check criterion8() {
    Check c;
    for (double t : grid(0, kQuarterPi, 101)) {
        for (int n = 1; n <= 3; ++n) {
            const auto tab = loops(n, t);
            c.near(tab.total_probability(), 1.0, 1e-10, "normalization");
            for (const auto& e : tab.entries) c.near(e.amplitude.squared_norm(), e.probability, 1e-12, "norm");
        }
        for (const auto& e : loops(3, t).entries) {
            const auto ref = oracle::three_loop_amplitude(t, e.label());
            for (std::size_t i = 0; i < 2; ++i) c.near(std::abs(e.amplitude[i] - ref[i]), 0.0, 1e-12, "3-loop amplitude");
        }
        for (const auto& e : loops(2, t).entries)
            c.near(e.probability, oracle::two_loop_probability(t, e.label()), 1e-12, "2-loop probability");
    }
    return c;
}

Check criterion9() {
    Check c;
    oracle::Random r(9);
    for (int trial = 0; trial < 100; ++trial) {
        CircuitDescription circ;
        for (int i = 0; i <= trial % 4; ++i) {
            const double a = r.uniform(0, 1.5);
            circ.steps.emplace_back(MeasureStep::custom(KrausPair(
                ComplexMat::diagonal({std::cos(a), std::sin(a)}), ComplexMat::diagonal({std::sin(a), std::cos(a)}))));
        }
        for (const auto& e : enumerate_trajectories(circ).entries)
            if (e.output_state) c.near(fidelity(*e.output_state, states::zero()), 1.0, 1e-12, "diagonal fidelity");
    }
    for (int trial = 0; trial < 100; ++trial) {
        const ComplexVec a = r.state(2);
        const ComplexVec b{-std::conj(a[1]), std::conj(a[0])};
        const ComplexMat id = ComplexMat::identity(2);
        CircuitDescription circ;
        circ.initial = r.state(4);
        circ.initial_label.clear();
        circ.steps.emplace_back(MeasureStep::custom(KrausPair(kron(projector(a), id), kron(projector(b), id))));
        circ.steps.emplace_back(MeasureStep::custom(KrausPair(kron(id, projector(a)), kron(id, projector(b)))));
        const auto tab = enumerate_trajectories(circ);
        for (std::size_t i = 0; i < tab.entries.size(); ++i)
            for (std::size_t j = i + 1; j < tab.entries.size(); ++j)
                c.require(std::abs(inner(tab.entries[i].amplitude, tab.entries[j].amplitude)) <= 1e-12,
                          "two-qubit orthogonality");
    }
    return c;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(RETROSCOPE_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header) {
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(f, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col != 1) row.push_back(std::stod(cell));
            ++col;
        }
        rows.push_back(row);  // theta, loops, value, extras...
    }
    return rows;
}

Check criterion10() {
    Check c;
    const fs::path dir = fs::temp_directory_path() / "retroscope_acceptance";
    fs::create_directories(dir);
    auto sweep = [&](const std::string& task, int n, const std::string& name, const std::string& fmt) {
        const fs::path out = dir / name;
        fs::remove(out);
        const std::string args = "sweep --task " + task + " --loops " + std::to_string(n) +
                                 " --theta-min 0 --theta-max 0.7853981633974483 --steps 51 --out " + out.string() +
                                 " --format " + fmt;
        c.require(cli(args) == 0 && fs::exists(out), "retroscope " + args);
        return out;
    };

    for (const auto& [task, n, stem] : {std::tuple{"angles", 2, "fig1"}, std::tuple{"optimize", 2, "fig2"},
                                        std::tuple{"optimize", 3, "fig3"}}) {
        const auto svg = sweep(task, n, std::string(stem) + ".svg", "svg");
        std::ifstream f(svg);
        std::stringstream s;
        s << f.rdbuf();
        c.require(s.str().find("viewBox=\"0 0 800 500\"") != std::string::npos, "svg viewBox");
        c.require(s.str().find("<polyline") != std::string::npos, "svg polyline");
        if (std::string(task) == "angles")
            c.require(s.str().find("stroke-dasharray=\"2 4\"") != std::string::npos, "dotted phi1");
    }

    std::string header;
    const auto fig1 = read_csv(sweep("angles", 2, "fig1.csv", "csv"), &header);
    c.require(header == "theta,task,loops,value,phi2", "fig1 header");
    c.require(fig1.size() == 51, "fig1 rows");
    c.near(fig1.back()[3], kHalfPi, 1e-11, "phi2 at pi/4");

    const auto fig2 = read_csv(sweep("optimize", 2, "fig2.csv", "csv"), &header);
    for (const auto& r : fig2) c.at_least(r[2], r[3] - 1e-9, "fig2 dominance");
    c.near(fig2.front()[2], 0.25, 1e-9, "fig2 at 0");
    c.near(fig2.back()[2], 0.5, 1e-6, "fig2 at pi/4");

    const auto fig3 = read_csv(sweep("optimize", 3, "fig3.csv", "csv"), &header);
    std::size_t best = 0;
    for (std::size_t i = 0; i < fig3.size(); ++i) {
        c.at_least(fig3[i][2], fig3[i][3] - 1e-9, "fig3 dominance");
        if (fig3[i][2] > fig3[best][2]) best = i;
    }
    c.near(fig3.front()[2], 0.125, 1e-9, "fig3 at 0");
    c.near(fig3.back()[2], 0.25, 1e-6, "fig3 at pi/4");
    c.require(best > 0 && best + 1 < fig3.size(), "fig3 interior maximum");
    fs::remove_all(dir);
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
        {"marginal retrodiction curves", criterion1},
        {"Bayes posterior tables", criterion2},
        {"square-root measurement", criterion3},
        {"optimizer dominance, endpoints, interior maximum, runtime", criterion4},
        {"elimination measurement and guess rule", criterion5},
        {"block projection and sequential strategy", criterion6},
        {"trace-norm formula equivalences", criterion7},
        {"trajectory bookkeeping", criterion8},
        {"diagonal and two-qubit simple cases", criterion9},
        {"figure sweeps through the CLI", criterion10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %zu: %s%s%s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    c.ok ? "" : " -- ", c.detail.c_str());
        std::fflush(stdout);
        failed += c.ok ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
