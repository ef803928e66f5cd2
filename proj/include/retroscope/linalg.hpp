#pragma once

// Dense complex linear algebra at the small dimensions used for qubit
// measurement simulation: vectors, square matrices, Hermitian spectra and
// the trace norm.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace retroscope {

using Complex = std::complex<double>;

/// Maximum anti-Hermitian entry magnitude accepted by the spectral routines.
inline constexpr double kHermitianTolerance = 1e-12;

/// Off-diagonal Frobenius norm at which Jacobi sweeps stop (scaled by
/// max(1, ||m||_F)).
inline constexpr double kJacobiTolerance = 1e-13;

class ComplexVec {
public:
    ComplexVec() = default;
    explicit ComplexVec(std::size_t dim) : data_(dim, Complex{0.0, 0.0}) {}
    ComplexVec(std::initializer_list<Complex> values) : data_(values) {}
    explicit ComplexVec(std::vector<Complex> values) : data_(std::move(values)) {}

    static ComplexVec basis(std::size_t dim, std::size_t index) {
        if (index >= dim) throw std::out_of_range("basis index out of range");
        ComplexVec v(dim);
        v.data_[index] = 1.0;
        return v;
    }

    std::size_t size() const { return data_.size(); }
    Complex& operator[](std::size_t i) { return data_[i]; }
    const Complex& operator[](std::size_t i) const { return data_[i]; }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }
    std::span<const Complex> values() const { return data_; }

    double squared_norm() const {
        double s = 0.0;
        for (const auto& z : data_) s += std::norm(z);
        return s;
    }
    double norm() const { return std::sqrt(squared_norm()); }

    ComplexVec normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::domain_error("cannot normalize a zero vector");
        return *this * Complex{1.0 / n, 0.0};
    }

    bool is_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
            return std::isfinite(z.real()) && std::isfinite(z.imag());
        });
    }

    ComplexVec& operator+=(const ComplexVec& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    ComplexVec& operator-=(const ComplexVec& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    ComplexVec& operator*=(Complex s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexVec operator+(ComplexVec a, const ComplexVec& b) { return a += b; }
    friend ComplexVec operator-(ComplexVec a, const ComplexVec& b) { return a -= b; }
    friend ComplexVec operator*(ComplexVec a, Complex s) { return a *= s; }
    friend ComplexVec operator*(Complex s, ComplexVec a) { return a *= s; }
    friend ComplexVec operator*(double s, ComplexVec a) { return a *= Complex{s, 0.0}; }

private:
    void check_same(const ComplexVec& o) const {
        if (o.size() != size()) throw std::invalid_argument("vector dimension mismatch");
    }

    std::vector<Complex> data_;
};

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner(const ComplexVec& a, const ComplexVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// Phase-invariant overlap |<a|b>|^2 / (|a|^2 |b|^2).
inline double fidelity(const ComplexVec& a, const ComplexVec& b) {
    const double na = a.squared_norm();
    const double nb = b.squared_norm();
    if (na == 0.0 || nb == 0.0) throw std::domain_error("fidelity of a zero vector");
    return std::norm(inner(a, b)) / (na * nb);
}

/// Square complex matrix, row-major.
class ComplexMat {
public:
    ComplexMat() = default;
    explicit ComplexMat(std::size_t dim) : dim_(dim), data_(dim * dim, Complex{0.0, 0.0}) {}

    ComplexMat(std::initializer_list<std::initializer_list<Complex>> rows) : dim_(rows.size()) {
        data_.reserve(dim_ * dim_);
        for (const auto& row : rows) {
            if (row.size() != dim_) throw std::invalid_argument("matrix must be square");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMat zero(std::size_t dim) { return ComplexMat(dim); }

    static ComplexMat identity(std::size_t dim) {
        ComplexMat m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMat diagonal(std::span<const Complex> diag) {
        ComplexMat m(diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
        return m;
    }
    static ComplexMat diagonal(std::initializer_list<Complex> diag) {
        return diagonal(std::span<const Complex>(diag.begin(), diag.size()));
    }

    std::size_t dim() const { return dim_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    ComplexMat adjoint() const {
        ComplexMat m(dim_);
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    Complex trace() const {
        Complex s{0.0, 0.0};
        for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, i);
        return s;
    }

    /// Largest entry magnitude.
    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    bool is_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
            return std::isfinite(z.real()) && std::isfinite(z.imag());
        });
    }

    ComplexMat& operator+=(const ComplexMat& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    ComplexMat& operator-=(const ComplexMat& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    ComplexMat& operator*=(Complex s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexMat operator+(ComplexMat a, const ComplexMat& b) { return a += b; }
    friend ComplexMat operator-(ComplexMat a, const ComplexMat& b) { return a -= b; }
    friend ComplexMat operator*(ComplexMat a, Complex s) { return a *= s; }
    friend ComplexMat operator*(Complex s, ComplexMat a) { return a *= s; }
    friend ComplexMat operator*(double s, ComplexMat a) { return a *= Complex{s, 0.0}; }

    friend ComplexMat operator*(const ComplexMat& a, const ComplexMat& b) {
        a.check_same(b);
        const std::size_t n = a.dim_;
        ComplexMat m(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = 0; k < n; ++k) {
                const Complex ark = a(r, k);
                if (ark == Complex{0.0, 0.0}) continue;
                for (std::size_t c = 0; c < n; ++c) m(r, c) += ark * b(k, c);
            }
        return m;
    }

    friend ComplexVec operator*(const ComplexMat& a, const ComplexVec& v) {
        if (v.size() != a.dim_) throw std::invalid_argument("matrix-vector dimension mismatch");
        ComplexVec out(a.dim_);
        for (std::size_t r = 0; r < a.dim_; ++r) {
            Complex s{0.0, 0.0};
            for (std::size_t c = 0; c < a.dim_; ++c) s += a(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }

private:
    void check_same(const ComplexMat& o) const {
        if (o.dim_ != dim_) throw std::invalid_argument("matrix dimension mismatch");
    }

    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// |a><b|
inline ComplexMat outer(const ComplexVec& a, const ComplexVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
    ComplexMat m(a.size());
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t c = 0; c < b.size(); ++c) m(r, c) = a[r] * std::conj(b[c]);
    return m;
}

/// |v><v| without normalization.
inline ComplexMat projector(const ComplexVec& v) { return outer(v, v); }

/// <a|m|b>
inline Complex expectation(const ComplexVec& a, const ComplexMat& m, const ComplexVec& b) {
    return inner(a, m * b);
}

inline ComplexMat kron(const ComplexMat& a, const ComplexMat& b) {
    const std::size_t na = a.dim();
    const std::size_t nb = b.dim();
    ComplexMat m(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) m(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
    return m;
}

inline ComplexVec kron(const ComplexVec& a, const ComplexVec& b) {
    ComplexVec v(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k) v[i * b.size() + k] = a[i] * b[k];
    return v;
}

/// max |m - m^dagger| over entries.
inline double hermitian_defect(const ComplexMat& m) {
    double d = 0.0;
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = r; c < m.dim(); ++c)
            d = std::max(d, std::abs(m(r, c) - std::conj(m(c, r))));
    return d;
}

struct EigenDecomposition {
    std::vector<double> values;       // descending
    std::vector<ComplexVec> vectors;  // orthonormal, vectors[i] pairs with values[i]

    ComplexMat reconstruct() const {
        const std::size_t n = vectors.empty() ? 0 : vectors.front().size();
        ComplexMat m(n);
        for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * projector(vectors[i]);
        return m;
    }
};

namespace detail {

inline ComplexMat checked_symmetrized(const ComplexMat& m) {
    if (m.dim() == 0) throw std::invalid_argument("empty matrix");
    if (!m.is_finite()) throw std::invalid_argument("matrix has non-finite entries");
    const double defect = hermitian_defect(m);
    if (defect > kHermitianTolerance) {
        std::ostringstream os;
        os << "matrix is not Hermitian: anti-Hermitian part has entry norm " << defect;
        throw std::invalid_argument(os.str());
    }
    ComplexMat h = m + m.adjoint();
    h *= Complex{0.5, 0.0};
    return h;
}

// Closed-form 2x2 solve from trace and determinant. The eigenvector for the
// larger eigenvalue is taken from whichever row of (m - lambda I) avoids
// cancellation; the second is its orthogonal complement.
inline EigenDecomposition eig2(const ComplexMat& h) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const Complex b = h(0, 1);
    const double mean = 0.5 * (a + d);
    const double half_diff = 0.5 * (a - d);
    const double radius = std::hypot(half_diff, std::abs(b));

    EigenDecomposition out;
    out.values = {mean + radius, mean - radius};
    if (radius == 0.0) {
        out.vectors = {ComplexVec::basis(2, 0), ComplexVec::basis(2, 1)};
        return out;
    }
    ComplexVec v1(2);
    if (half_diff >= 0.0) {
        v1[0] = half_diff + radius;
        v1[1] = std::conj(b);
    } else {
        v1[0] = b;
        v1[1] = radius - half_diff;
    }
    v1 = v1.normalized();
    ComplexVec v2{-std::conj(v1[1]), std::conj(v1[0])};
    out.vectors = {v1, v2};
    return out;
}

// Cyclic complex Jacobi. Each rotation first removes the phase of the pivot
// entry, then applies a real Givens rotation that annihilates it.
inline EigenDecomposition jacobi(ComplexMat a) {
    const std::size_t n = a.dim();
    ComplexMat v = ComplexMat::identity(n);
    const double scale = std::max(1.0, a.frobenius_norm());

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
                if (p != q) s += std::norm(a(p, q));
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > kJacobiTolerance * scale; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double r = std::abs(a(p, q));
                if (r < 1e-300) continue;
                const Complex phase = a(p, q) / r;  // e^{i phi}
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                ComplexMat u = ComplexMat::identity(n);
                u(p, p) = c;
                u(p, q) = s;
                u(q, p) = -s * std::conj(phase);
                u(q, q) = c * std::conj(phase);

                a = u.adjoint() * a * u;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                v = v * u;
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    EigenDecomposition out;
    for (std::size_t k : order) {
        out.values.push_back(a(k, k).real());
        ComplexVec col(n);
        for (std::size_t r = 0; r < n; ++r) col[r] = v(r, k);
        out.vectors.push_back(col.normalized());
    }
    return out;
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
/// Throws std::invalid_argument when the anti-Hermitian part exceeds
/// kHermitianTolerance; the message carries its size.
inline EigenDecomposition herm_eig(const ComplexMat& m) {
    const ComplexMat h = detail::checked_symmetrized(m);
    switch (h.dim()) {
        case 1:
            return EigenDecomposition{{h(0, 0).real()}, {ComplexVec{Complex{1.0, 0.0}}}};
        case 2:
            return detail::eig2(h);
        default:
            return detail::jacobi(h);
    }
}

/// Sum of absolute eigenvalues.
inline double trace_norm(const ComplexMat& m) {
    const auto e = herm_eig(m);
    double s = 0.0;
    for (double v : e.values) s += std::abs(v);
    return s;
}

inline double min_eigenvalue(const ComplexMat& m) { return herm_eig(m).values.back(); }

/// f(m) for Hermitian m, applied through the spectrum.
inline ComplexMat herm_apply(const ComplexMat& m, const std::function<double(double)>& f) {
    const auto e = herm_eig(m);
    ComplexMat out(m.dim());
    for (std::size_t i = 0; i < e.values.size(); ++i) out += f(e.values[i]) * projector(e.vectors[i]);
    return out;
}

/// Projector onto the span of eigenvectors with eigenvalue > threshold.
inline ComplexMat positive_projector(const ComplexMat& m, double threshold) {
    const auto e = herm_eig(m);
    ComplexMat out(m.dim());
    for (std::size_t i = 0; i < e.values.size(); ++i)
        if (e.values[i] > threshold) out += projector(e.vectors[i]);
    return out;
}

}  // namespace retroscope
