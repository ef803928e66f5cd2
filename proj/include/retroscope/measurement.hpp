#pragma once

// Two-outcome Kraus measurements on a qubit: the tunable path measurement
// obtained from a weakly coupled probe, projective measurements, and the
// POVM bookkeeping shared by the discrimination code.

#include <cmath>
#include <numbers>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "retroscope/linalg.hpp"

namespace retroscope {

inline constexpr double kQuarterPi = std::numbers::pi / 4.0;
inline constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

/// Probabilities at or below this are treated as impossible outcomes.
inline constexpr double kZeroProbability = 1e-14;

/// Measurement result symbol. "-" stands for path |0>, "+" for path |1>.
enum class Outcome { Plus, Minus };

inline char symbol(Outcome o) { return o == Outcome::Plus ? '+' : '-'; }
inline Outcome flipped(Outcome o) { return o == Outcome::Plus ? Outcome::Minus : Outcome::Plus; }

inline Outcome outcome_from_symbol(char c) {
    if (c == '+') return Outcome::Plus;
    if (c == '-') return Outcome::Minus;
    throw std::invalid_argument(std::string("unknown outcome symbol '") + c + "'");
}

namespace states {
inline ComplexVec zero() { return ComplexVec{1.0, 0.0}; }
inline ComplexVec one() { return ComplexVec{0.0, 1.0}; }
inline ComplexVec plus_x() { return ComplexVec{kInvSqrt2, kInvSqrt2}; }
inline ComplexVec minus_x() { return ComplexVec{kInvSqrt2, -kInvSqrt2}; }
}  // namespace states

/// Kraus operators of a two-outcome measurement. Construction checks
/// A+^dagger A+ + A-^dagger A- = I to 1e-12.
class KrausPair {
public:
    static constexpr double kCompletenessTolerance = 1e-12;

    KrausPair(ComplexMat plus, ComplexMat minus) : plus_(std::move(plus)), minus_(std::move(minus)) {
        if (plus_.dim() == 0 || plus_.dim() != minus_.dim())
            throw std::invalid_argument("Kraus operators must be square and of equal dimension");
        if (!plus_.is_finite() || !minus_.is_finite())
            throw std::invalid_argument("Kraus operators have non-finite entries");
        const double err = completeness_error();
        if (err > kCompletenessTolerance) {
            std::ostringstream os;
            os << "Kraus pair is not complete: |sum A^dagger A - I| = " << err;
            throw std::invalid_argument(os.str());
        }
    }

    const ComplexMat& plus() const { return plus_; }
    const ComplexMat& minus() const { return minus_; }
    const ComplexMat& operator[](Outcome o) const { return o == Outcome::Plus ? plus_ : minus_; }
    std::size_t dim() const { return plus_.dim(); }

    double completeness_error() const {
        return (plus_.adjoint() * plus_ + minus_.adjoint() * minus_ - ComplexMat::identity(dim())).max_abs();
    }

private:
    ComplexMat plus_;
    ComplexMat minus_;
};

struct PovmElement {
    std::string label;
    ComplexMat op;
};

/// Labelled list of positive operators that should sum to the identity.
/// Validity is checked on request; intermediate results are allowed to be
/// slightly off while they are assembled.
class Povm {
public:
    static constexpr double kTolerance = 1e-10;

    Povm() = default;
    explicit Povm(std::vector<PovmElement> elements) : elements_(std::move(elements)) {
        if (elements_.empty()) throw std::invalid_argument("POVM needs at least one element");
        for (const auto& e : elements_)
            if (e.op.dim() != elements_.front().op.dim())
                throw std::invalid_argument("POVM elements differ in dimension");
    }

    std::size_t size() const { return elements_.size(); }
    std::size_t dim() const { return elements_.empty() ? 0 : elements_.front().op.dim(); }
    const std::vector<PovmElement>& elements() const { return elements_; }
    auto begin() const { return elements_.begin(); }
    auto end() const { return elements_.end(); }

    bool contains(const std::string& label) const { return find(label) != nullptr; }

    const ComplexMat& at(const std::string& label) const {
        if (const auto* e = find(label)) return e->op;
        throw std::out_of_range("POVM has no element labelled '" + label + "'");
    }

    /// max |sum_i Pi_i - I|
    double completeness_error() const {
        ComplexMat sum(dim());
        for (const auto& e : elements_) sum += e.op;
        return (sum - ComplexMat::identity(dim())).max_abs();
    }

    /// Smallest eigenvalue over all elements.
    double min_eigenvalue() const {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& e : elements_) m = std::min(m, retroscope::min_eigenvalue(e.op));
        return m;
    }

    bool is_valid(double tol = kTolerance) const {
        return !elements_.empty() && completeness_error() <= tol && min_eigenvalue() >= -tol;
    }

    void require_valid(double tol = kTolerance) const {
        if (elements_.empty()) throw std::invalid_argument("empty POVM");
        const double c = completeness_error();
        const double m = min_eigenvalue();
        if (c > tol || m < -tol) {
            std::ostringstream os;
            os << "invalid POVM: completeness error " << c << ", smallest eigenvalue " << m;
            throw std::invalid_argument(os.str());
        }
    }

private:
    const PovmElement* find(const std::string& label) const {
        for (const auto& e : elements_)
            if (e.label == label) return &e;
        return nullptr;
    }

    std::vector<PovmElement> elements_;
};

struct MeasurementRecord {
    Outcome outcome;
    double probability;
    std::optional<ComplexVec> post_state;  // empty when the outcome is impossible

    bool possible() const { return post_state.has_value(); }
};

inline void require_strength(double theta) {
    if (!(theta >= 0.0 && theta <= kQuarterPi)) {
        std::ostringstream os;
        os.precision(17);
        os << "measurement strength theta=" << theta << " outside [0, pi/4]";
        throw std::invalid_argument(os.str());
    }
}

/// Path measurement of strength theta: both operators diagonal, with
/// entries (cos t -/+ sin t)/sqrt 2. theta = 0 extracts nothing, theta = pi/4
/// is a projective path measurement.
inline KrausPair eta_kraus(double theta) {
    require_strength(theta);
    // (cos t - sin t)/sqrt 2 = sin(pi/4 - t), exact zero at t = pi/4.
    const double lo = std::sin(kQuarterPi - theta);
    const double hi = std::cos(kQuarterPi - theta);
    return KrausPair(ComplexMat::diagonal({lo, hi}), ComplexMat::diagonal({hi, lo}));
}

/// Projective measurement in the computational basis, "+" on |1>.
inline KrausPair projective_z_kraus() {
    return KrausPair(projector(states::one()), projector(states::zero()));
}

/// Projective measurement in the |+-x> basis, "+" on |+x>.
inline KrausPair projective_x_kraus() {
    return KrausPair(projector(states::plus_x()), projector(states::minus_x()));
}

inline Povm kraus_povm(const KrausPair& k) {
    return Povm({{"+", k.plus().adjoint() * k.plus()}, {"-", k.minus().adjoint() * k.minus()}});
}

inline ComplexMat hadamard() {
    return ComplexMat{{kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}};
}

inline MeasurementRecord apply_measurement(const ComplexVec& state, const KrausPair& k, Outcome outcome) {
    if (state.size() != k.dim()) throw std::invalid_argument("state and measurement dimensions differ");
    if (std::abs(state.squared_norm() - 1.0) > 1e-12) throw std::invalid_argument("state is not normalized");
    const ComplexVec after = k[outcome] * state;
    const double p = after.squared_norm();
    if (p <= kZeroProbability) return {outcome, p, std::nullopt};
    return {outcome, p, after.normalized()};
}

}  // namespace retroscope
