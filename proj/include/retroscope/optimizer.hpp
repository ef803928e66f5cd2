#pragma once

// Numerical search for trajectory-identifying measurements restricted to
// POVMs that share the reflection symmetry of the output states, and the
// trajectory-elimination measurement for two loops.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "retroscope/discrimination.hpp"
#include "retroscope/error.hpp"
#include "retroscope/interferometer.hpp"
#include "retroscope/linalg.hpp"
#include "retroscope/measurement.hpp"

namespace retroscope {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kEighthPi = std::numbers::pi / 8.0;

/// Step size at which the local searches stop.
inline constexpr double kParameterTolerance = 1e-10;

namespace detail {

// cos(mu)|+x> + sin(mu)|-x> in the computational basis.
inline ComplexVec x_plane_vector(double mu) {
    return std::cos(mu) * states::plus_x() + std::sin(mu) * states::minus_x();
}

// cos(mu)|0> + sin(mu)|1>
inline ComplexVec z_plane_vector(double mu) { return ComplexVec{std::cos(mu), std::sin(mu)}; }

inline double clamp_unit_weight(double c, const char* what) {
    if (c < -1e-12 || c > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "infeasible parameters: weight " << what << " = " << c << " outside [0, 1]";
        throw NumericalError(os.str());
    }
    return std::clamp(c, 0.0, 1.0);
}

// Coordinate search with step halving. `f` returns nullopt for infeasible
// points. Stops once the step drops below kParameterTolerance or the
// evaluation budget runs out. Improvements must be strict, so among equal
// values the earlier (lexicographically first probed) point is kept.
struct LocalSearchResult {
    std::vector<double> x;
    double value;
    std::size_t evaluations;
};

inline LocalSearchResult coordinate_search(std::vector<double> x, double value, double step,
                                           const std::vector<double>& lower, const std::vector<double>& upper,
                                           const std::function<std::optional<double>(const std::vector<double>&)>& f,
                                           std::size_t budget) {
    std::size_t evals = 0;
    while (step >= kParameterTolerance && evals < budget) {
        bool improved = false;
        for (std::size_t i = 0; i < x.size() && evals < budget; ++i) {
            for (double sign : {1.0, -1.0}) {
                std::vector<double> y = x;
                y[i] = std::clamp(y[i] + sign * step, lower[i], upper[i]);
                if (y[i] == x[i]) continue;
                ++evals;
                const auto v = f(y);
                if (v && *v > value) {
                    x = std::move(y);
                    value = *v;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return {std::move(x), value, evals};
}

inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Two loops

/// Reflection-symmetric four-outcome POVM about |+x>:
///   "--" c1|xi(mu1)>,  "+-" c1|xi(-mu1)>,  "-+" c2|xi(mu2)>,  "++" c2|xi(-mu2)>
/// with xi(mu) = cos mu |+x> + sin mu |-x>. Completeness fixes the weights.
struct SymmetricPovmParams2 {
    double mu1 = 0.0;  // [0, pi/4]
    double mu2 = 0.0;  // [pi/4, pi/2]

    std::array<double, 2> weights() const {
        const double a = std::cos(2.0 * mu1);
        const double b = std::cos(2.0 * mu2);
        const double d = a - b;
        if (std::abs(d) < 1e-12) throw std::invalid_argument("degenerate parameters: cos 2mu1 = cos 2mu2");
        return {-b / d, a / d};
    }
};

inline void require_params(const SymmetricPovmParams2& p) {
    constexpr double eps = 1e-12;
    if (!(p.mu1 >= -eps && p.mu1 <= kQuarterPi + eps) || !(p.mu2 >= kQuarterPi - eps && p.mu2 <= kHalfPi + eps))
        throw std::invalid_argument("need 0 <= mu1 <= pi/4 <= mu2 <= pi/2");
}

inline Povm symmetric_povm_2loop(const SymmetricPovmParams2& p) {
    require_params(p);
    const auto [c1, c2] = p.weights();
    return Povm({{"--", c1 * projector(detail::x_plane_vector(p.mu1))},
                 {"-+", c2 * projector(detail::x_plane_vector(p.mu2))},
                 {"+-", c1 * projector(detail::x_plane_vector(-p.mu1))},
                 {"++", c2 * projector(detail::x_plane_vector(-p.mu2))}});
}

/// Closed-form success of symmetric_povm_2loop on the two-loop output states:
///   2 [p1 c1 cos^2(mu1 - phi1) + p2 c2 cos^2(mu2 - phi2)]
/// with p1 = P(--) and p2 = P(++).
inline double symmetric_success_2loop(double theta, const SymmetricPovmParams2& p) {
    const auto [phi1, phi2] = output_angles(theta);
    const double x = std::sin(2.0 * theta) * std::cos(2.0 * theta);
    const double p1 = 0.25 * (1.0 + x);
    const double p2 = 0.25 * (1.0 - x);
    const auto [c1, c2] = p.weights();
    const double o1 = std::cos(p.mu1 - phi1);
    const double o2 = std::cos(p.mu2 - phi2);
    return 2.0 * (p1 * c1 * o1 * o1 + p2 * c2 * o2 * o2);
}

struct Optimum2 {
    double success = 0.0;
    SymmetricPovmParams2 params;
};

/// Grid search over (mu1, mu2) followed by coordinate refinement down to
/// kParameterTolerance. The refinement is also run from the square-root
/// measurement's parameters (pi/4 - theta, pi/4 + theta), which belong to the
/// family, and the better end point is kept.
inline Optimum2 optimize_2loop(double theta, int grid = 400) {
    require_strength(theta);
    if (grid < 2) throw std::invalid_argument("grid needs at least 2 points per axis");

    auto objective = [theta](const std::vector<double>& x) -> std::optional<double> {
        const SymmetricPovmParams2 p{x[0], x[1]};
        if (std::abs(std::cos(2.0 * p.mu1) - std::cos(2.0 * p.mu2)) < 1e-12) return std::nullopt;
        return symmetric_success_2loop(theta, p);
    };

    const double h = kQuarterPi / static_cast<double>(grid - 1);
    std::vector<double> best;
    double best_value = -1.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const std::vector<double> x{h * i, kQuarterPi + h * j};
            const auto v = objective(x);
            if (v && *v > best_value) {
                best_value = *v;
                best = x;
            }
        }
    }

    const std::vector<double> lower{0.0, kQuarterPi};
    const std::vector<double> upper{kQuarterPi, kHalfPi};
    constexpr std::size_t budget = 1'000'000;
    auto refined = detail::coordinate_search(best, best_value, h, lower, upper, objective, budget);

    const std::vector<double> srm_start{kQuarterPi - theta, kQuarterPi + theta};
    if (const auto v = objective(srm_start)) {
        auto alt = detail::coordinate_search(srm_start, *v, h, lower, upper, objective, budget);
        if (alt.value > refined.value || (alt.value == refined.value && alt.x < refined.x)) refined = alt;
    }
    return {refined.value, {refined.x[0], refined.x[1]}};
}

// ---------------------------------------------------------------------------
// Three loops

/// Trajectory pairs exchanged by reflection about |0>. Element i uses
/// c_i |xi_i><xi_i| on first and c_i |xi_i'><xi_i'| on second, where xi_i' is
/// xi_i with mu_i -> -mu_i.
inline constexpr std::array<std::array<const char*, 2>, 4> kThreeLoopPairs{{
    {"+++", "-+-"},
    {"+-+", "---"},
    {"++-", "-++"},
    {"--+", "+--"},
}};

/// Reflection-symmetric eight-outcome POVM about |0>. Four directions
/// xi_i = cos mu_i |0> + sin mu_i |1>, weights c1, c2 free, and c3, c4
/// fixed by completeness (sum c = 1, sum c cos 2mu = 0).
struct SymmetricPovmParams3 {
    std::array<double, 4> mu{};
    double c1 = 0.0;
    double c2 = 0.0;

    /// {c1, c2, c3, c4}; c3, c4 may fall outside [0, 1].
    std::array<double, 4> weights() const {
        std::array<double, 4> k{};
        for (std::size_t i = 0; i < 4; ++i) k[i] = std::cos(2.0 * mu[i]);
        const double d = k[2] - k[3];
        if (std::abs(d) < 1e-9) throw std::invalid_argument("degenerate parameters: |cos 2mu3 - cos 2mu4| < 1e-9");
        const double c3 = (c1 * (k[3] - k[0]) + c2 * (k[3] - k[1]) - k[3]) / d;
        const double c4 = (-c1 * (k[2] - k[0]) - c2 * (k[2] - k[1]) + k[2]) / d;
        return {c1, c2, c3, c4};
    }
};

/// Throws NumericalError when a derived weight leaves [0, 1].
inline Povm symmetric_povm_3loop(const SymmetricPovmParams3& p) {
    const auto raw = p.weights();
    std::array<double, 4> c{};
    const char* names[] = {"c1", "c2", "c3", "c4"};
    for (std::size_t i = 0; i < 4; ++i) c[i] = detail::clamp_unit_weight(raw[i], names[i]);
    std::vector<PovmElement> elements;
    for (std::size_t i = 0; i < 4; ++i)
        elements.push_back({kThreeLoopPairs[i][0], c[i] * projector(detail::z_plane_vector(p.mu[i]))});
    for (std::size_t i = 0; i < 4; ++i)
        elements.push_back({kThreeLoopPairs[i][1], c[i] * projector(detail::z_plane_vector(-p.mu[i]))});
    return Povm(std::move(elements));
}

struct Optimum3 {
    double success = 0.0;
    SymmetricPovmParams3 params;
    std::array<double, 4> weights{};
    std::size_t evaluations = 0;
};

struct Optimize3Options {
    std::size_t starts = 64;
    std::size_t budget = 400'000;  // objective evaluations over all starts
    std::uint64_t seed = 42;
};

namespace detail {

// For fixed directions the success is linear in the weights, so the best
// weights sit on a vertex of {c >= 0, sum c = 1, sum c cos 2mu = 0}: at most
// two nonzero entries.
struct WeightSolution {
    double value;
    std::array<double, 4> weights;
};

inline std::optional<WeightSolution> best_weights(const std::array<double, 4>& gain, const std::array<double, 4>& mu) {
    std::array<double, 4> k{};
    for (std::size_t i = 0; i < 4; ++i) k[i] = std::cos(2.0 * mu[i]);
    std::optional<WeightSolution> best;
    auto offer = [&](double value, std::array<double, 4> w) {
        if (!best || value > best->value) best = WeightSolution{value, w};
    };
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double d = k[i] - k[j];
            // Nonzero c3 and c4 together need |cos 2mu3 - cos 2mu4| >= 1e-9.
            const double min_gap = (i == 2 && j == 3) ? 1e-9 : 1e-12;
            if (std::abs(d) < min_gap) {
                if (std::abs(k[i]) < 1e-12 && std::abs(k[j]) < 1e-12) {
                    const std::size_t m = gain[i] >= gain[j] ? i : j;
                    std::array<double, 4> w{};
                    w[m] = 1.0;
                    offer(gain[m], w);
                }
                continue;
            }
            const double ci = -k[j] / d;
            const double cj = k[i] / d;
            if (ci < -1e-15 || cj < -1e-15) continue;
            std::array<double, 4> w{};
            w[i] = std::clamp(ci, 0.0, 1.0);
            w[j] = std::clamp(cj, 0.0, 1.0);
            offer(w[i] * gain[i] + w[j] * gain[j], w);
        }
    }
    return best;
}

inline double wrap_angle(double mu) {
    // into [-pi/2, pi/2); xi and -xi give the same projector
    double r = std::fmod(mu + kHalfPi, std::numbers::pi);
    if (r < 0.0) r += std::numbers::pi;
    return r - kHalfPi;
}

// Directions with zero weight do not affect the POVM; pick them so that the
// c3/c4 elimination stays well conditioned.
inline SymmetricPovmParams3 to_params(std::array<double, 4> mu, const std::array<double, 4>& w) {
    if (w[2] == 0.0 && w[3] == 0.0) {
        mu[2] = 0.0;
        mu[3] = kHalfPi;
    } else if (w[3] == 0.0) {
        mu[3] = std::cos(2.0 * mu[2]) > 0.0 ? -kHalfPi : 0.0;
    } else if (w[2] == 0.0) {
        mu[2] = std::cos(2.0 * mu[3]) > 0.0 ? -kHalfPi : 0.0;
    }
    return {mu, w[0], w[1]};
}

}  // namespace detail

/// Multi-start search over the eight-outcome symmetric family. Directions
/// are searched by coordinate descent from low-discrepancy starts (Halton
/// points shifted by the seed) plus the square-root measurement's
/// directions; for each direction set the weights are solved exactly.
inline Optimum3 optimize_3loop(double theta, const Optimize3Options& options = {}) {
    require_strength(theta);
    const auto table = enumerate_trajectories(build_circuit(3, theta));

    std::array<std::array<ComplexVec, 2>, 4> amps;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t s = 0; s < 2; ++s) amps[i][s] = table.at(kThreeLoopPairs[i][s]).amplitude;

    auto gains = [&](const std::array<double, 4>& mu) {
        std::array<double, 4> g{};
        for (std::size_t i = 0; i < 4; ++i) {
            g[i] = std::norm(inner(detail::z_plane_vector(mu[i]), amps[i][0])) +
                   std::norm(inner(detail::z_plane_vector(-mu[i]), amps[i][1]));
        }
        return g;
    };
    auto solve = [&](const std::vector<double>& x) {
        const std::array<double, 4> mu{x[0], x[1], x[2], x[3]};
        return detail::best_weights(gains(mu), mu);
    };
    auto objective = [&](const std::vector<double>& x) -> std::optional<double> {
        const auto s = solve(x);
        if (!s) return std::nullopt;
        return s->value;
    };

    std::vector<std::vector<double>> starts;
    {
        // Square-root measurement directions: rho^{-1/2} applied to each state.
        const auto srm = square_root_povm(trajectory_hypotheses(table));
        std::vector<double> x(4);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto e = herm_eig(srm.povm.at(kThreeLoopPairs[i][0]));
            const ComplexVec& v = e.vectors.front();
            const Complex phase = std::abs(v[0]) > std::abs(v[1]) ? std::conj(v[0]) / std::abs(v[0])
                                                                  : std::conj(v[1]) / std::abs(v[1]);
            x[i] = detail::wrap_angle(std::atan2((phase * v[1]).real(), (phase * v[0]).real()));
        }
        starts.push_back(x);
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::array<double, 4> shift{unit(rng), unit(rng), unit(rng), unit(rng)};
    const std::array<std::uint64_t, 4> bases{2, 3, 5, 7};
    for (std::uint64_t k = 1; starts.size() < options.starts + 1 && k < 100 * options.starts; ++k) {
        std::vector<double> x(4);
        for (std::size_t d = 0; d < 4; ++d) {
            const double u = std::fmod(detail::radical_inverse(k, bases[d]) + shift[d], 1.0);
            x[d] = -kHalfPi + std::numbers::pi * u;
        }
        if (objective(x)) starts.push_back(std::move(x));
    }

    const std::vector<double> lower(4, -std::numbers::pi);
    const std::vector<double> upper(4, std::numbers::pi);
    std::size_t used = 0;
    std::optional<detail::LocalSearchResult> best;
    for (const auto& x0 : starts) {
        if (used >= options.budget) break;
        const auto v0 = objective(x0);
        ++used;
        if (!v0) continue;
        auto r = detail::coordinate_search(x0, *v0, 0.25, lower, upper, objective, options.budget - used);
        used += r.evaluations;
        for (double& m : r.x) m = detail::wrap_angle(m);
        if (!best || r.value > best->value || (r.value == best->value && r.x < best->x)) best = std::move(r);
    }
    if (!best) throw NumericalError("no feasible starting point for the three-loop search");

    const auto w = solve(best->x);
    Optimum3 out;
    out.success = w->value;
    out.weights = w->weights;
    out.params = detail::to_params({best->x[0], best->x[1], best->x[2], best->x[3]}, w->weights);
    out.evaluations = used;
    return out;
}

// ---------------------------------------------------------------------------
// Elimination

struct EliminationElement {
    std::string label;       // trajectory excluded by this outcome
    double weight = 0.0;
    ComplexVec gamma;        // unit vector orthogonal to `annihilated`
    ComplexVec annihilated;  // normalized output state of `label`
};

struct EliminationPovm {
    double theta = 0.0;
    double c1 = 0.0;  // weight on the phi1 directions ("+-", "--")
    double c2 = 0.0;  // weight on the phi2 directions ("++", "-+")
    std::vector<EliminationElement> elements;

    Povm povm() const {
        std::vector<PovmElement> out;
        for (const auto& e : elements) out.push_back({e.label, e.weight * projector(e.gamma)});
        return Povm(std::move(out));
    }
};

/// Four-outcome measurement whose outcome "jk" certifies that trajectory jk
/// did not happen. Defined for pi/8 <= theta <= pi/4.
inline EliminationPovm elimination_povm(double theta) {
    constexpr double eps = 1e-12;
    if (!(theta >= kEighthPi - eps && theta <= kQuarterPi + eps)) {
        std::ostringstream os;
        os.precision(17);
        os << "elimination measurement needs pi/8 <= theta <= pi/4, got " << theta;
        throw NumericalError(os.str());
    }
    theta = std::clamp(theta, kEighthPi, kQuarterPi);
    const auto [phi1, phi2] = output_angles(theta);
    const double k1 = std::cos(phi1) * std::cos(phi1);
    const double k2 = std::cos(phi2) * std::cos(phi2);

    EliminationPovm e;
    e.theta = theta;
    if (std::abs(k1 - k2) < 1e-15) throw NumericalError("elimination weights are degenerate");
    e.c1 = detail::clamp_unit_weight((1.0 - 2.0 * k2) / (2.0 * (k1 - k2)), "c1");
    e.c2 = detail::clamp_unit_weight((1.0 - 2.0 * k1) / (2.0 * (k2 - k1)), "c2");

    // The output state at angle sign*phi in the (|+x>, |-x>) plane is
    // annihilated by gamma at sign*(phi + pi/2).
    auto add = [&](const char* label, double weight, double phi, double sign) {
        e.elements.push_back({label, weight, detail::x_plane_vector(sign * (phi + kHalfPi)),
                              detail::x_plane_vector(sign * phi)});
    };
    add("++", e.c2, phi2, -1.0);
    add("-+", e.c2, phi2, 1.0);
    add("+-", e.c1, phi1, -1.0);
    add("--", e.c1, phi1, 1.0);
    return e;
}

/// Given the eliminated trajectory, guess the one with every result flipped.
/// It shares at least one result with any trajectory that was not excluded.
inline std::string elimination_guess(const std::string& eliminated) {
    if (eliminated.empty()) throw std::invalid_argument("empty trajectory label");
    std::string guess;
    for (char c : eliminated) guess.push_back(symbol(flipped(outcome_from_symbol(c))));
    return guess;
}

}  // namespace retroscope
