#pragma once

// Retrodiction as state discrimination: the two-hypothesis minimum-error
// measurement, Bayes updates on an observed output outcome, the square-root
// measurement for many pure states, and closed forms for two successive
// two-outcome measurements when the second one is projective.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "retroscope/error.hpp"
#include "retroscope/interferometer.hpp"
#include "retroscope/linalg.hpp"
#include "retroscope/measurement.hpp"

namespace retroscope {

/// Eigenvalues of Lambda with magnitude at or below this count as zero and
/// are assigned to the second hypothesis.
inline constexpr double kZeroEigenvalue = 1e-13;

/// Eigenvalues of the ensemble density below this lie outside its span.
inline constexpr double kSpanThreshold = 1e-12;

struct Hypothesis {
    std::string label;
    double prior = 0.0;
    ComplexMat density;
};

struct PureHypothesis {
    std::string label;
    double prior = 0.0;
    ComplexVec state;  // normalized

    /// prior = |amplitude|^2, state = amplitude / |amplitude|. A vanishing
    /// amplitude gives prior 0 and an arbitrary basis state.
    static PureHypothesis from_amplitude(std::string label, const ComplexVec& amplitude) {
        const double p = amplitude.squared_norm();
        if (p <= kZeroProbability) return {std::move(label), p, ComplexVec::basis(amplitude.size(), 0)};
        return {std::move(label), p, amplitude.normalized()};
    }

    Hypothesis mixed() const { return {label, prior, projector(state)}; }
};

struct DiscriminationResult {
    Povm povm;
    double success_probability = 0.0;
    std::map<std::string, double> per_hypothesis_success;  // Tr(Pi_label rho_label)
};

struct Posterior {
    std::string label;
    double probability = 0.0;
};

namespace detail {

inline void require_priors(std::span<const double> priors) {
    double sum = 0.0;
    for (double p : priors) {
        if (!(p >= 0.0 && p <= 1.0 + 1e-12)) throw std::invalid_argument("prior outside [0, 1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "priors sum to " << sum << ", not 1";
        throw std::invalid_argument(os.str());
    }
}

inline void require_density(const ComplexMat& rho) {
    if (std::abs(rho.trace() - Complex{1.0, 0.0}) > 1e-10) throw std::invalid_argument("density matrix trace is not 1");
    if (min_eigenvalue(rho) < -1e-10) throw std::invalid_argument("density matrix is not positive");
}

inline void require_projective(const Povm& q) {
    if (q.size() != 2 || !q.contains("+") || !q.contains("-"))
        throw std::invalid_argument("projective measurement needs elements '+' and '-'");
    for (const auto& e : q) {
        if ((e.op * e.op - e.op).max_abs() > 1e-10 || hermitian_defect(e.op) > 1e-12)
            throw std::invalid_argument("element '" + e.label + "' is not an orthogonal projector");
    }
    if (q.completeness_error() > 1e-10) throw std::invalid_argument("projectors do not sum to the identity");
}

inline double real_trace_product(const ComplexMat& a, const ComplexMat& b) { return (a * b).trace().real(); }

}  // namespace detail

/// sum_h prior(h) Tr(Pi_label(h) rho_h), the per-hypothesis terms going into
/// `per_hypothesis`.
inline double success_probability(std::span<const Hypothesis> hypotheses, const Povm& povm,
                                  std::map<std::string, double>* per_hypothesis = nullptr) {
    double total = 0.0;
    for (const auto& h : hypotheses) {
        const double hit = detail::real_trace_product(povm.at(h.label), h.density);
        if (per_hypothesis) (*per_hypothesis)[h.label] = hit;
        total += h.prior * hit;
    }
    return total;
}

inline double success_probability(std::span<const PureHypothesis> hypotheses, const Povm& povm,
                                  std::map<std::string, double>* per_hypothesis = nullptr) {
    double total = 0.0;
    for (const auto& h : hypotheses) {
        const double hit = expectation(h.state, povm.at(h.label), h.state).real();
        if (per_hypothesis) (*per_hypothesis)[h.label] = hit;
        total += h.prior * hit;
    }
    return total;
}

/// Optimal two-hypothesis measurement. Pi_a projects onto the strictly
/// positive eigenspace of p_a rho_a - p_b rho_b, Pi_b is the rest.
inline DiscriminationResult helstrom(const Hypothesis& a, const Hypothesis& b) {
    if (a.label == b.label) throw std::invalid_argument("hypotheses need distinct labels");
    if (a.density.dim() != b.density.dim()) throw std::invalid_argument("density dimensions differ");
    const double priors[] = {a.prior, b.prior};
    detail::require_priors(priors);
    detail::require_density(a.density);
    detail::require_density(b.density);

    const ComplexMat lambda = a.prior * a.density - b.prior * b.density;
    const auto eig = herm_eig(lambda);
    const std::size_t n = lambda.dim();
    ComplexMat pi_a(n);
    double norm1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        norm1 += std::abs(eig.values[i]);
        if (eig.values[i] > kZeroEigenvalue) pi_a += projector(eig.vectors[i]);
    }
    ComplexMat pi_b = ComplexMat::identity(n) - pi_a;

    DiscriminationResult r;
    r.povm = Povm({{a.label, pi_a}, {b.label, pi_b}});
    r.success_probability = 0.5 * (1.0 + norm1);
    const Hypothesis hs[] = {a, b};
    success_probability(hs, r.povm, &r.per_hypothesis_success);
    return r;
}

/// The marginal output ensembles for one measurement position as
/// hypotheses labelled "+" and "-".
inline std::vector<Hypothesis> marginal_hypotheses(const MarginalPair& m) {
    return {{"+", m.plus.prior, m.plus.density}, {"-", m.minus.prior, m.minus.density}};
}

/// Best guess of the result of one measurement from the output state.
inline DiscriminationResult retrodict_position(const TrajectoryTable& t, std::size_t position) {
    const auto hyps = marginal_hypotheses(marginal_density(t, position));
    return helstrom(hyps[0], hyps[1]);
}

inline std::vector<Posterior> bayes_update(std::span<const Hypothesis> hypotheses, const Povm& povm,
                                           const std::string& observed) {
    const ComplexMat& element = povm.at(observed);
    std::vector<Posterior> out;
    double evidence = 0.0;
    for (const auto& h : hypotheses) {
        const double joint = detail::real_trace_product(element, h.density) * h.prior;
        out.push_back({h.label, joint});
        evidence += joint;
    }
    if (evidence <= kZeroProbability)
        throw NumericalError("outcome '" + observed + "' has zero probability under every hypothesis");
    for (auto& p : out) p.probability /= evidence;
    return out;
}

/// Output states of every possible trajectory, weighted by its probability.
inline std::vector<PureHypothesis> trajectory_hypotheses(const TrajectoryTable& t) {
    std::vector<PureHypothesis> out;
    for (const auto& e : t.entries)
        if (e.output_state) out.push_back({e.label(), e.probability, *e.output_state});
    return out;
}

/// Square-root ("pretty good") measurement
///   Pi_j = p_j rho^{-1/2} |psi_j><psi_j| rho^{-1/2},  rho = sum_j p_j |psi_j><psi_j|,
/// with the inverse taken on the span of the states. The projector onto the
/// orthogonal complement of that span is added to the first element so the
/// result is complete.
inline DiscriminationResult square_root_povm(std::span<const PureHypothesis> hypotheses) {
    if (hypotheses.empty()) throw std::invalid_argument("no hypotheses");
    const std::size_t n = hypotheses.front().state.size();
    std::vector<double> priors;
    ComplexMat rho(n);
    for (const auto& h : hypotheses) {
        if (h.state.size() != n) throw std::invalid_argument("hypothesis dimensions differ");
        if (!(h.prior > 0.0)) throw std::invalid_argument("square-root measurement needs positive priors");
        if (std::abs(h.state.squared_norm() - 1.0) > 1e-10) throw std::invalid_argument("state not normalized");
        priors.push_back(h.prior);
        rho += h.prior * projector(h.state);
    }
    detail::require_priors(priors);

    const auto eig = herm_eig(rho);
    ComplexMat inv_sqrt(n);
    ComplexMat support(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (eig.values[i] <= kSpanThreshold) continue;
        inv_sqrt += (1.0 / std::sqrt(eig.values[i])) * projector(eig.vectors[i]);
        support += projector(eig.vectors[i]);
    }

    std::vector<PovmElement> elements;
    for (const auto& h : hypotheses) {
        if ((h.state - support * h.state).norm() > 1e-9)
            throw NumericalError("state '" + h.label + "' lies outside the span of the ensemble");
        elements.push_back({h.label, h.prior * projector(inv_sqrt * h.state)});
    }
    elements.front().op += ComplexMat::identity(n) - support;

    DiscriminationResult r;
    r.povm = Povm(std::move(elements));
    r.success_probability = success_probability(hypotheses, r.povm, &r.per_hypothesis_success);
    return r;
}

/// The four output vectors Q_j A_k |psi> of a two-outcome measurement k
/// followed by a projective one q. Labels are chronological: "+-" means the
/// first measurement gave + and the second gave -.
inline std::vector<PureHypothesis> two_measurement_hypotheses(const ComplexVec& psi, const KrausPair& k,
                                                              const Povm& q) {
    detail::require_projective(q);
    if (psi.size() != k.dim() || q.dim() != k.dim()) throw std::invalid_argument("dimension mismatch");
    std::vector<PureHypothesis> out;
    for (Outcome second : {Outcome::Plus, Outcome::Minus})
        for (Outcome first : {Outcome::Plus, Outcome::Minus}) {
            const std::string label{symbol(first), symbol(second)};
            out.push_back(PureHypothesis::from_amplitude(label, q.at(std::string(1, symbol(second))) * (k[first] * psi)));
        }
    return out;
}

/// ||Lambda||_1 for discriminating the first of two measurements when the
/// second is projective. Within each projector's support the operator is
/// |u><u| - |w><w| with u = Q A+ psi, w = Q A- psi, whose trace norm is
///   sqrt((|u|^2 + |w|^2)^2 - 4 |<w|u>|^2).
/// The radicand is evaluated as (|u|^2 - |w|^2)^2 + 4 |u ^ w|^2 (Lagrange
/// identity) so collinear u, w give an exact |  |u|^2 - |w|^2 |.
inline double two_measurement_lambda(const ComplexVec& psi, const KrausPair& k, const Povm& q) {
    detail::require_projective(q);
    if (psi.size() != k.dim() || q.dim() != k.dim()) throw std::invalid_argument("dimension mismatch");
    double total = 0.0;
    for (const auto& e : q) {
        const ComplexVec u = e.op * (k.plus() * psi);
        const ComplexVec w = e.op * (k.minus() * psi);
        const double diff = u.squared_norm() - w.squared_norm();
        double wedge = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = i + 1; j < u.size(); ++j) wedge += std::norm(u[i] * w[j] - u[j] * w[i]);
        total += std::sqrt(diff * diff + 4.0 * wedge);
    }
    return total;
}

/// |P(+,+) - P(+,-)| + |P(-,+) - P(-,-)| with P(j,k) = |Q_j A_k psi|^2 (j the
/// projective outcome). Equals two_measurement_lambda for qubits and bounds
/// it from below when Q- has higher rank. Requires rank-one Q+.
inline double qubit_lambda_factorized(const ComplexVec& psi, const KrausPair& k, const Povm& q) {
    detail::require_projective(q);
    if (psi.size() != k.dim() || q.dim() != k.dim()) throw std::invalid_argument("dimension mismatch");
    if (std::abs(q.at("+").trace().real() - 1.0) > 1e-10) throw std::invalid_argument("Q+ must be rank one");
    double total = 0.0;
    for (const auto& e : q) {
        const double pp = (e.op * (k.plus() * psi)).squared_norm();
        const double pm = (e.op * (k.minus() * psi)).squared_norm();
        total += std::abs(pp - pm);
    }
    return total;
}

/// Identify both results when the second measurement is projective: find
/// which projector's support holds the state, then run the two-state optimal
/// measurement inside it. Success = (1 + ||Lambda||_1) / 2.
inline DiscriminationResult projective_second_strategy(const ComplexVec& psi, const KrausPair& k, const Povm& q) {
    const auto hyps = two_measurement_hypotheses(psi, k, q);
    std::vector<PovmElement> elements;
    for (Outcome second : {Outcome::Plus, Outcome::Minus}) {
        const ComplexMat& qj = q.at(std::string(1, symbol(second)));
        const ComplexVec u = qj * (k.plus() * psi);
        const ComplexVec w = qj * (k.minus() * psi);
        const ComplexMat pos = positive_projector(projector(u) - projector(w), kZeroEigenvalue);
        elements.push_back({std::string{'+', symbol(second)}, pos});
        elements.push_back({std::string{'-', symbol(second)}, qj - pos});
    }
    DiscriminationResult r;
    r.povm = Povm(std::move(elements));
    r.success_probability = success_probability(hyps, r.povm, &r.per_hypothesis_success);
    return r;
}

/// Moves every part of a four-outcome POVM into the block of the projector
/// its label names (the second symbol). The extra weight lands on "++" and
/// "--"; the success probability on the two-measurement states cannot drop.
inline Povm povm_block_projection(const Povm& povm, const Povm& q) {
    detail::require_projective(q);
    povm.require_valid();
    if (povm.size() != 4) throw std::invalid_argument("block projection needs a four-element POVM");
    const ComplexMat& qp = q.at("+");
    const ComplexMat& qm = q.at("-");
    const ComplexMat& pp = povm.at("++");
    const ComplexMat& mp = povm.at("-+");
    const ComplexMat& pm = povm.at("+-");
    const ComplexMat& mm = povm.at("--");
    return Povm({{"++", qp * (pp + pm + mm) * qp},
                 {"-+", qp * mp * qp},
                 {"+-", qm * pm * qm},
                 {"--", qm * (mm + pp + mp) * qm}});
}

}  // namespace retroscope
