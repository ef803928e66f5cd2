// retroscope: sweeps over the measurement strength and single-circuit runs.
//
// Exit status: 0 success, 1 usage or input error, 2 numerical infeasibility.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "retroscope/retroscope.hpp"

namespace {

using namespace retroscope;

std::string g(double x) {
    if (x == 0.0) x = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read circuit file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void run_circuit(const std::string& path, const std::string& task) {
    const auto circuit = parse_circuit(read_file(path));
    const auto table = enumerate_trajectories(circuit);

    if (task == "trajectories") {
        std::cout << "trajectory,probability,amp0_re,amp0_im,amp1_re,amp1_im\n";
        for (const auto& e : table.entries) {
            std::cout << (e.outcomes.empty() ? std::string("(none)") : e.label()) << "," << g(e.probability);
            for (std::size_t i = 0; i < e.amplitude.size(); ++i)
                std::cout << "," << g(e.amplitude[i].real()) << "," << g(e.amplitude[i].imag());
            std::cout << "\n";
        }
        return;
    }
    if (task.rfind("retrodict-", 0) == 0) {
        std::size_t pos = 0;
        try {
            pos = std::stoul(task.substr(10));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad task '" + task + "'");
        }
        const auto m = marginal_density(table, pos);
        const auto r = retrodict_position(table, pos);
        std::cout << "position,success,prior_plus,prior_minus\n"
                  << pos << "," << g(r.success_probability) << "," << g(m.plus.prior) << "," << g(m.minus.prior)
                  << "\n";
        return;
    }
    if (task == "srm") {
        const auto hyps = trajectory_hypotheses(table);
        const auto r = square_root_povm(hyps);
        std::cout << "trajectory,prior,success\n";
        for (const auto& h : hyps) std::cout << h.label << "," << g(h.prior) << "," << g(r.per_hypothesis_success.at(h.label)) << "\n";
        std::cout << "total,1," << g(r.success_probability) << "\n";
        return;
    }
    throw std::invalid_argument("unknown run task '" + task + "' (trajectories, retrodict-<k>, srm)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Retrodiction of path measurements in Hadamard interferometers"};
    app.require_subcommand(1);

    SweepConfig cfg;
    std::string out_path, format = "csv";
    auto* sweep = app.add_subcommand("sweep", "Evaluate a task on a grid of measurement strengths");
    sweep->add_option("--task", cfg.task, "angles, retrodict-1, retrodict-2, bayes, srm, optimize, eliminate")
        ->required();
    sweep->add_option("--loops", cfg.loops, "Number of loops (2 or 3)")->required();
    sweep->add_option("--theta-min", cfg.theta_min, "Smallest theta (radians)")->required();
    sweep->add_option("--theta-max", cfg.theta_max, "Largest theta (radians)")->required();
    sweep->add_option("--steps", cfg.steps, "Number of grid points (>= 2)")->required();
    sweep->add_option("--seed", cfg.seed, "Optimizer start scrambling")->default_val(42);
    sweep->add_option("--out", out_path, "Output file")->required();
    sweep->add_option("--format", format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}))->default_val("csv");

    std::string circuit_path, run_task;
    auto* run = app.add_subcommand("run", "Analyse one circuit file");
    run->add_option("--circuit", circuit_path, "Circuit description")->required();
    run->add_option("--task", run_task, "trajectories, retrodict-<k> or srm")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*sweep) {
            const auto table = run_sweep(cfg);
            if (format == "svg") emit_svg(table, out_path);
            else emit_csv(table, out_path);
        } else {
            run_circuit(circuit_path, run_task);
        }
    } catch (const NumericalError& e) {
        std::cerr << "retroscope: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "retroscope: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
