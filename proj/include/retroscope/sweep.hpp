#pragma once

// Parameter sweeps over the measurement strength and their CSV / SVG output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "retroscope/discrimination.hpp"
#include "retroscope/error.hpp"
#include "retroscope/interferometer.hpp"
#include "retroscope/measurement.hpp"
#include "retroscope/optimizer.hpp"

namespace retroscope {

inline const std::vector<std::string>& sweep_tasks() {
    static const std::vector<std::string> tasks{"angles", "retrodict-1", "retrodict-2", "bayes",
                                                "srm",    "optimize",    "eliminate"};
    return tasks;
}

struct SweepConfig {
    std::string task;
    int loops = 2;
    double theta_min = 0.0;
    double theta_max = kQuarterPi;
    int steps = 51;
    std::uint64_t seed = 42;

    void validate() const {
        if (std::find(sweep_tasks().begin(), sweep_tasks().end(), task) == sweep_tasks().end())
            throw std::invalid_argument("unknown task '" + task + "'");
        if (loops != 2 && loops != 3) throw std::invalid_argument("loops must be 2 or 3");
        if (steps < 2) throw std::invalid_argument("steps must be at least 2");
        if (!(theta_min >= 0.0 && theta_max <= kQuarterPi && theta_min <= theta_max))
            throw std::invalid_argument("need 0 <= theta-min <= theta-max <= pi/4");
        if ((task == "angles" || task == "bayes" || task == "eliminate") && loops != 2)
            throw std::invalid_argument("task " + task + " is defined for loops=2 only");
    }

    std::vector<double> thetas() const {
        std::vector<double> t(static_cast<std::size_t>(steps));
        for (int i = 0; i < steps; ++i)
            t[static_cast<std::size_t>(i)] = theta_min + (theta_max - theta_min) * i / (steps - 1);
        t.back() = theta_max;
        return t;
    }
};

enum class LineStyle { Solid, Dotted, Dashed };

/// A curve in the SVG output. column < 0 plots the value column, otherwise
/// extras[column].
struct Series {
    std::string name;
    int column = -1;
    LineStyle style = LineStyle::Solid;
};

struct ResultRow {
    double theta = 0.0;
    double value = 0.0;
    std::vector<double> extras;
};

struct ResultTable {
    std::string task;
    int loops = 2;
    std::string value_name;
    std::vector<std::string> extra_columns;
    std::vector<ResultRow> rows;
    std::vector<Series> series;
};

/// Measurement of the two-loop output that guesses the result of the
/// measurement at `position` (1 or 2): "+" on |1> for the first, "+" on |-x>
/// for the second. At theta = 0 the second-position ensembles coincide, every
/// measurement is optimal, and the uninformative {I/2, I/2} is returned so
/// that neither outcome is impossible.
inline Povm two_loop_output_povm(std::size_t position, double theta) {
    require_strength(theta);
    if (position == 1) return Povm({{"+", projector(states::one())}, {"-", projector(states::zero())}});
    if (position != 2) throw std::invalid_argument("position must be 1 or 2");
    if (theta == 0.0) {
        const ComplexMat half = ComplexMat::identity(2) * Complex{0.5, 0.0};
        return Povm({{"+", half}, {"-", half}});
    }
    return Povm({{"+", projector(states::minus_x())}, {"-", projector(states::plus_x())}});
}

/// P(result at `position` = + | output measurement = `observed`) together with
/// the prior P(result = +).
struct BayesEntry {
    double prior_plus = 0.0;
    double posterior_plus = 0.0;
};

inline BayesEntry two_loop_bayes(double theta, std::size_t position, const std::string& observed) {
    const auto table = enumerate_trajectories(build_circuit(2, theta));
    const auto hyps = marginal_hypotheses(marginal_density(table, position));
    const auto post = bayes_update(hyps, two_loop_output_povm(position, theta), observed);
    return {hyps[0].prior, post[0].probability};
}

inline ResultTable run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    ResultTable t;
    t.task = cfg.task;
    t.loops = cfg.loops;
    const std::string& task = cfg.task;

    if (task == "angles") {
        t.value_name = "phi1";
        t.extra_columns = {"phi2"};
        t.series = {{"phi1", -1, LineStyle::Dotted}, {"phi2", 0, LineStyle::Solid}};
    } else if (task == "retrodict-1" || task == "retrodict-2") {
        t.value_name = "success";
        t.extra_columns = {"prior_plus"};
        t.series = {{"success", -1, LineStyle::Solid}};
    } else if (task == "bayes") {
        t.value_name = "post2_plus_given_plus";
        t.extra_columns = {"prior2_plus", "post2_plus_given_minus", "prior1_plus", "post1_plus_given_plus",
                           "post1_plus_given_minus"};
        t.series = {{"P(2+|+)", -1, LineStyle::Solid},
                    {"P(2+)", 0, LineStyle::Dashed},
                    {"P(1+|+)", 3, LineStyle::Dotted}};
    } else if (task == "srm") {
        t.value_name = "success";
        t.series = {{"square-root", -1, LineStyle::Solid}};
    } else if (task == "optimize") {
        t.value_name = "success";
        t.extra_columns = {"srm"};
        if (cfg.loops == 2) {
            for (const char* n : {"mu1", "mu2", "c1", "c2"}) t.extra_columns.push_back(n);
        } else {
            for (const char* n : {"mu1", "mu2", "mu3", "mu4", "c1", "c2", "c3", "c4"}) t.extra_columns.push_back(n);
        }
        t.series = {{"optimized", -1, LineStyle::Solid}, {"square-root", 0, LineStyle::Dashed}};
    } else if (task == "eliminate") {
        t.value_name = "c1";
        t.extra_columns = {"c2", "completeness_error", "max_overlap"};
        t.series = {{"c1", -1, LineStyle::Solid}, {"c2", 0, LineStyle::Dashed}};
    }

    for (double theta : cfg.thetas()) {
        ResultRow row;
        row.theta = theta;
        if (task == "angles") {
            const auto a = output_angles(theta);
            row.value = a.phi1;
            row.extras = {a.phi2};
        } else if (task == "retrodict-1" || task == "retrodict-2") {
            const std::size_t pos = task == "retrodict-1" ? 1 : 2;
            const auto table = enumerate_trajectories(build_circuit(cfg.loops, theta));
            row.value = retrodict_position(table, pos).success_probability;
            row.extras = {marginal_density(table, pos).plus.prior};
        } else if (task == "bayes") {
            const auto a = two_loop_bayes(theta, 2, "+");
            const auto b = two_loop_bayes(theta, 2, "-");
            const auto c = two_loop_bayes(theta, 1, "+");
            const auto d = two_loop_bayes(theta, 1, "-");
            row.value = a.posterior_plus;
            row.extras = {a.prior_plus, b.posterior_plus, c.prior_plus, c.posterior_plus, d.posterior_plus};
        } else if (task == "srm") {
            const auto table = enumerate_trajectories(build_circuit(cfg.loops, theta));
            row.value = square_root_povm(trajectory_hypotheses(table)).success_probability;
        } else if (task == "optimize") {
            const auto table = enumerate_trajectories(build_circuit(cfg.loops, theta));
            const double srm = square_root_povm(trajectory_hypotheses(table)).success_probability;
            if (cfg.loops == 2) {
                const auto o = optimize_2loop(theta);
                const auto w = o.params.weights();
                row.value = o.success;
                row.extras = {srm, o.params.mu1, o.params.mu2, w[0], w[1]};
            } else {
                Optimize3Options opt;
                opt.seed = cfg.seed;
                const auto o = optimize_3loop(theta, opt);
                row.value = o.success;
                row.extras = {srm};
                for (double m : o.params.mu) row.extras.push_back(m);
                for (double c : o.weights) row.extras.push_back(c);
            }
        } else if (task == "eliminate") {
            const auto e = elimination_povm(theta);
            const auto table = enumerate_trajectories(build_circuit(2, theta));
            double overlap = 0.0;
            for (const auto& el : e.elements) {
                const auto& state = table.at(el.label).output_state;
                if (state) overlap = std::max(overlap, std::abs(inner(el.gamma, *state)));
            }
            row.value = e.c1;
            row.extras = {e.c2, e.povm().completeness_error(), overlap};
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace detail {

inline std::string fmt12(double x) {
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline void require_rows(const ResultTable& t) {
    if (t.rows.empty()) throw std::invalid_argument("result table is empty");
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    f.close();
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

inline double series_value(const ResultRow& r, int column) {
    return column < 0 ? r.value : r.extras.at(static_cast<std::size_t>(column));
}

}  // namespace detail

inline std::string csv_text(const ResultTable& t) {
    detail::require_rows(t);
    std::string out = "theta,task,loops,value";
    for (const auto& c : t.extra_columns) out += "," + c;
    out += "\n";
    const std::string loops = std::to_string(t.loops);
    for (const auto& r : t.rows) {
        out += detail::fmt12(r.theta) + "," + t.task + "," + loops + "," + detail::fmt12(r.value);
        for (double x : r.extras) out += "," + detail::fmt12(x);
        out += "\n";
    }
    return out;
}

inline std::string svg_text(const ResultTable& t) {
    detail::require_rows(t);
    if (t.series.empty()) throw std::invalid_argument("result table has no series to plot");

    constexpr double width = 800, height = 500;
    constexpr double left = 80, right = 160, top = 40, bottom = 70;
    const double pw = width - left - right, ph = height - top - bottom;

    double xmin = t.rows.front().theta, xmax = t.rows.back().theta;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : t.series)
        for (const auto& r : t.rows) {
            const double y = detail::series_value(r, s.column);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(ymin) || !std::isfinite(ymax)) throw std::invalid_argument("non-finite values in table");
    if (xmax - xmin < 1e-12) { xmin -= 0.01; xmax += 0.01; }
    if (ymax - ymin < 1e-12) { ymin -= 0.05; ymax += 0.05; }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto px = [&](double x) { return left + pw * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return top + ph * (1.0 - (y - ymin) / (ymax - ymin)); };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    s += "<g stroke=\"black\" stroke-width=\"1\">\n";
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(left + pw) + "\" y2=\"" +
         num(top + ph) + "\"/>\n";
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(top + ph) +
         "\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        s += "<line x1=\"" + num(px(xv)) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(px(xv)) + "\" y2=\"" +
             num(top + ph + 5) + "\"/>\n";
        s += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" + num(left) + "\" y2=\"" +
             num(py(yv)) + "\"/>\n";
    }
    s += "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        s += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + ph + 20) + "\" text-anchor=\"middle\">" +
             detail::fmt12(std::round(xv * 1e4) / 1e4) + "</text>\n";
        s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" +
             detail::fmt12(std::round(yv * 1e4) / 1e4) + "</text>\n";
    }
    s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 20) +
         "\" text-anchor=\"middle\">theta (rad)</text>\n";
    s += "<text x=\"20\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         num(top + ph / 2) + ")\">" + t.value_name + "</text>\n";
    s += "<text x=\"" + num(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\">" + t.task + ", " +
         std::to_string(t.loops) + " loops</text>\n";
    s += "</g>\n";

    for (std::size_t k = 0; k < t.series.size(); ++k) {
        const auto& ser = t.series[k];
        std::string dash;
        if (ser.style == LineStyle::Dotted) dash = " stroke-dasharray=\"2 4\"";
        if (ser.style == LineStyle::Dashed) dash = " stroke-dasharray=\"8 4\"";
        s += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\"" + dash + " points=\"";
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            if (i) s += " ";
            s += num(px(t.rows[i].theta)) + "," + num(py(detail::series_value(t.rows[i], ser.column)));
        }
        s += "\"><title>" + ser.name + "</title></polyline>\n";
        const double ly = top + 20 + 20.0 * static_cast<double>(k);
        s += "<line x1=\"" + num(left + pw + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + pw + 45) +
             "\" y2=\"" + num(ly) + "\" stroke=\"black\" stroke-width=\"2\"" + dash + "/>\n";
        s += "<text x=\"" + num(left + pw + 50) + "\" y=\"" + num(ly + 4) +
             "\" font-family=\"sans-serif\" font-size=\"12\">" + ser.name + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

/// Writes the table; an empty table is rejected before the file is touched.
inline void emit_csv(const ResultTable& t, const std::string& path) { detail::write_file(path, csv_text(t)); }
inline void emit_svg(const ResultTable& t, const std::string& path) { detail::write_file(path, svg_text(t)); }

}  // namespace retroscope
