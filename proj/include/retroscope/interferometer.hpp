#pragma once

// n-loop Hadamard interferometers with a path measurement inside each loop,
// and exhaustive enumeration of the measurement trajectories they produce.
//
// Outcome sequences are always stored chronologically: element 0 is the
// result of the first measurement the qubit meets.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "retroscope/linalg.hpp"
#include "retroscope/measurement.hpp"

namespace retroscope {

/// Enumeration refuses circuits with more measurements than this.
inline constexpr std::size_t kMaxMeasurements = 20;

struct GateStep {
    std::string name;
    ComplexMat unitary;

    static GateStep hadamard() { return {"H", retroscope::hadamard()}; }
};

enum class MeasureKind { Eta, ProjectiveZ, ProjectiveX, Custom };

struct MeasureStep {
    KrausPair kraus;
    MeasureKind kind = MeasureKind::Custom;
    double theta = 0.0;  // meaningful for MeasureKind::Eta only

    static MeasureStep eta(double theta) { return {eta_kraus(theta), MeasureKind::Eta, theta}; }
    static MeasureStep projective_z() { return {projective_z_kraus(), MeasureKind::ProjectiveZ, 0.0}; }
    static MeasureStep projective_x() { return {projective_x_kraus(), MeasureKind::ProjectiveX, 0.0}; }
    static MeasureStep custom(KrausPair k) { return {std::move(k), MeasureKind::Custom, 0.0}; }
};

using Step = std::variant<GateStep, MeasureStep>;

struct CircuitDescription {
    ComplexVec initial = states::zero();
    std::string initial_label = "0";  // "0", "1", "+x", "-x", or empty for a custom state
    std::vector<Step> steps;

    std::size_t dim() const { return initial.size(); }

    std::size_t measurement_count() const {
        std::size_t n = 0;
        for (const auto& s : steps) n += std::holds_alternative<MeasureStep>(s) ? 1 : 0;
        return n;
    }

    /// Checks normalization, dimensions and gate unitarity (1e-12).
    void validate() const {
        if (initial.size() == 0) throw std::invalid_argument("circuit has no initial state");
        if (std::abs(initial.squared_norm() - 1.0) > 1e-12)
            throw std::invalid_argument("initial state is not normalized");
        for (const auto& s : steps) {
            if (const auto* g = std::get_if<GateStep>(&s)) {
                if (g->unitary.dim() != dim()) throw std::invalid_argument("gate " + g->name + " has wrong dimension");
                const double err = (g->unitary.adjoint() * g->unitary - ComplexMat::identity(dim())).max_abs();
                if (err > 1e-12) throw std::invalid_argument("gate " + g->name + " is not unitary");
            } else if (std::get<MeasureStep>(s).kraus.dim() != dim()) {
                throw std::invalid_argument("measurement has wrong dimension");
            }
        }
    }
};

/// H, then per loop a path measurement of the given strength followed by H.
inline CircuitDescription build_circuit(std::span<const double> loop_thetas) {
    if (loop_thetas.empty()) throw std::invalid_argument("interferometer needs at least one loop");
    CircuitDescription c;
    c.steps.emplace_back(GateStep::hadamard());
    for (double theta : loop_thetas) {
        c.steps.emplace_back(MeasureStep::eta(theta));
        c.steps.emplace_back(GateStep::hadamard());
    }
    return c;
}

inline CircuitDescription build_circuit(int n_loops, double theta) {
    if (n_loops < 1) throw std::invalid_argument("interferometer needs at least one loop");
    const std::vector<double> thetas(static_cast<std::size_t>(n_loops), theta);
    return build_circuit(thetas);
}

inline std::string trajectory_label(std::span<const Outcome> outcomes) {
    std::string s;
    s.reserve(outcomes.size());
    for (Outcome o : outcomes) s.push_back(symbol(o));
    return s;
}

struct Trajectory {
    std::vector<Outcome> outcomes;           // chronological
    double probability = 0.0;                // = amplitude.squared_norm()
    ComplexVec amplitude;                    // unnormalized output vector
    std::optional<ComplexVec> output_state;  // normalized; empty for impossible trajectories

    std::string label() const { return trajectory_label(outcomes); }
};

/// All 2^m trajectories of a circuit with m measurements. Entry index bit i
/// holds the outcome of measurement i (0 = "+"), so the first measurement
/// varies fastest: ++, -+, +-, -- for two measurements.
struct TrajectoryTable {
    std::size_t measurements = 0;
    std::size_t dim = 0;
    std::vector<Trajectory> entries;

    const Trajectory& at(const std::string& label) const {
        for (const auto& e : entries)
            if (e.label() == label) return e;
        throw std::out_of_range("no trajectory labelled '" + label + "'");
    }

    double total_probability() const {
        double s = 0.0;
        for (const auto& e : entries) s += e.probability;
        return s;
    }
};

namespace detail {

inline void enumerate_from(const CircuitDescription& c, std::size_t step, std::size_t depth,
                           std::size_t index, const ComplexVec& amp, std::vector<Outcome>& path,
                           std::vector<Trajectory>& out) {
    if (step == c.steps.size()) {
        Trajectory t;
        t.outcomes = path;
        t.amplitude = amp;
        t.probability = amp.squared_norm();
        if (t.probability > kZeroProbability) t.output_state = amp.normalized();
        out[index] = std::move(t);
        return;
    }
    if (const auto* g = std::get_if<GateStep>(&c.steps[step])) {
        enumerate_from(c, step + 1, depth, index, g->unitary * amp, path, out);
        return;
    }
    const auto& m = std::get<MeasureStep>(c.steps[step]);
    for (Outcome o : {Outcome::Plus, Outcome::Minus}) {
        path.push_back(o);
        const std::size_t bit = o == Outcome::Minus ? (std::size_t{1} << depth) : 0;
        enumerate_from(c, step + 1, depth + 1, index | bit, m.kraus[o] * amp, path, out);
        path.pop_back();
    }
}

}  // namespace detail

inline TrajectoryTable enumerate_trajectories(const CircuitDescription& c) {
    c.validate();
    const std::size_t m = c.measurement_count();
    if (m > kMaxMeasurements)
        throw std::invalid_argument("circuit has " + std::to_string(m) + " measurements; at most " +
                                    std::to_string(kMaxMeasurements) + " can be enumerated");
    TrajectoryTable table;
    table.measurements = m;
    table.dim = c.dim();
    table.entries.resize(std::size_t{1} << m);
    std::vector<Outcome> path;
    path.reserve(m);
    detail::enumerate_from(c, 0, 0, 0, c.initial, path, table.entries);
    return table;
}

struct MarginalEntry {
    double prior = 0.0;
    ComplexMat density;  // unit trace; I/d placeholder when prior is zero
};

/// Output ensembles grouped by the outcome of one measurement, ignoring all
/// others. Position is 1-based, 1 = earliest measurement.
struct MarginalPair {
    std::size_t position = 0;
    MarginalEntry plus;
    MarginalEntry minus;

    const MarginalEntry& operator[](Outcome o) const { return o == Outcome::Plus ? plus : minus; }
};

inline MarginalPair marginal_density(const TrajectoryTable& t, std::size_t position) {
    if (position < 1 || position > t.measurements)
        throw std::invalid_argument("position " + std::to_string(position) + " outside 1.." +
                                    std::to_string(t.measurements));
    MarginalPair pair;
    pair.position = position;
    ComplexMat weighted[2] = {ComplexMat(t.dim), ComplexMat(t.dim)};
    double prior[2] = {0.0, 0.0};
    for (const auto& e : t.entries) {
        const int k = e.outcomes[position - 1] == Outcome::Plus ? 0 : 1;
        weighted[k] += projector(e.amplitude);
        prior[k] += e.probability;
    }
    auto finish = [&](int k) {
        MarginalEntry m;
        m.prior = prior[k];
        if (prior[k] > kZeroProbability) {
            m.density = weighted[k] * Complex{1.0 / prior[k], 0.0};
        } else {
            m.density = ComplexMat::identity(t.dim) * Complex{1.0 / static_cast<double>(t.dim), 0.0};
        }
        return m;
    };
    pair.plus = finish(0);
    pair.minus = finish(1);
    return pair;
}

struct OutputAngles {
    double phi1 = 0.0;
    double phi2 = 0.0;
};

/// Angles of the two-loop output states measured from |+x> in the
/// (|+x>, |-x>) plane: states (+,+),(-,+) sit at -phi2, phi2 and (-,-),(+,-)
/// at phi1, -phi1 (chronological labels).
inline OutputAngles output_angles(double theta) {
    require_strength(theta);
    // cos t - sin t = sqrt2 sin(pi/4 - t) and cos t + sin t = sqrt2 cos(pi/4 - t);
    // this form makes phi2 = pi/2 and phi1 = 0 exact at t = pi/4.
    const double lo = std::sin(kQuarterPi - theta);
    const double hi = std::cos(kQuarterPi - theta);
    return {std::atan2(lo * std::sin(theta), hi * std::cos(theta)),
            std::atan2(hi * std::sin(theta), lo * std::cos(theta))};
}

}  // namespace retroscope
