#pragma once

// Truncated-Fock-space linear algebra: bases, ladder operators, hybrid
// qubit+mode states, tensor products and factor-local unitaries. Everything
// is a plain value; operations never mutate their inputs unless the name
// says "in_place".

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace septrap {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

// ---------------------------------------------------------------------------
// Errors

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A state has weight near the Fock cutoff where the requested map would leak
// population out of the truncated space.
class TruncationError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class NonHermitianError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class PropagationError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

// ---------------------------------------------------------------------------
// FockBasis

// Truncated harmonic-oscillator basis |0..n_max>, dimension n_max + 1.
struct FockBasis {
    int n_max = 1;

    explicit FockBasis(int n_max_) : n_max(n_max_) {
        if (n_max < 1) throw std::invalid_argument("FockBasis: n_max must be >= 1");
    }
    int dim() const { return n_max + 1; }
};

enum class OperatorKind { Annihilation, Creation, Number, Position, Identity };

struct ModeOperator {
    Matrix matrix;
    std::string label;
};

inline Matrix annihilation_matrix(int dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int m = 1; m < dim; ++m) a(m - 1, m) = std::sqrt(double(m));
    return a;
}

// Drops structural zeros only; every nonzero entry is kept exactly.
inline SparseMatrix to_sparse(const Matrix& m) {
    return m.sparseView(1.0, 1e-300);
}

// xi is the ground-state extent sqrt(hbar / (2 M nu)) and is required only
// for the position operator z = xi (a + a†).
inline ModeOperator build_mode_operator(const FockBasis& basis, OperatorKind kind,
                                        std::optional<double> xi = std::nullopt) {
    const int d = basis.dim();
    switch (kind) {
    case OperatorKind::Annihilation:
        return {annihilation_matrix(d), "annihilation"};
    case OperatorKind::Creation:
        return {annihilation_matrix(d).adjoint(), "creation"};
    case OperatorKind::Number: {
        Matrix n = Matrix::Zero(d, d);
        for (int m = 0; m < d; ++m) n(m, m) = double(m);
        return {n, "number"};
    }
    case OperatorKind::Position: {
        if (!xi) throw std::invalid_argument("build_mode_operator: position needs xi");
        Matrix a = annihilation_matrix(d);
        return {*xi * (a + Matrix(a.adjoint())), "position"};
    }
    case OperatorKind::Identity:
        return {Matrix::Identity(d, d), "identity"};
    }
    throw std::invalid_argument("build_mode_operator: unknown operator kind");
}

// ---------------------------------------------------------------------------
// Tensor products

// Kronecker product; the first operand owns the slowest-varying index.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline ModeOperator tensor(std::span<const ModeOperator> ops) {
    if (ops.empty()) throw std::invalid_argument("tensor: empty operand list");
    ModeOperator out = ops[0];
    for (size_t i = 1; i < ops.size(); ++i) {
        out.matrix = kron(out.matrix, ops[i].matrix);
        out.label += "*" + ops[i].label;
    }
    return out;
}

// ---------------------------------------------------------------------------
// HybridState

enum class FactorKind { Qubit, Mode };

struct StateFactor {
    FactorKind kind;
    int dim;
};

// Qubit levels are labelled 0 = |g>, 1 = |e>. The amplitude vector is indexed
// lexicographically with factors[0] slowest: for two ions the layout is
// (qubit1, fock1, qubit2, fock2), so
//   index = ((q1*(n1+1) + m1)*2 + q2)*(n2+1) + m2.
struct HybridState {
    Vector amplitudes;
    std::vector<StateFactor> factors;

    long dim() const { return amplitudes.size(); }
    double norm() const { return amplitudes.norm(); }

    static HybridState basis_state(std::vector<StateFactor> factors,
                                   std::span<const int> labels) {
        if (labels.size() != factors.size())
            throw std::invalid_argument("basis_state: one label per factor required");
        long d = 1;
        for (const auto& f : factors) d *= f.dim;
        long idx = 0;
        for (size_t i = 0; i < factors.size(); ++i) {
            if (labels[i] < 0 || labels[i] >= factors[i].dim)
                throw std::invalid_argument("basis_state: label out of range");
            idx = idx * factors[i].dim + labels[i];
        }
        HybridState s;
        s.amplitudes = Vector::Zero(d);
        s.amplitudes[idx] = 1.0;
        s.factors = std::move(factors);
        return s;
    }

    // One ion: |qubit> ⊗ |m>.
    static HybridState single_ion(const FockBasis& b, int qubit, int m) {
        const int l[2] = {qubit, m};
        return basis_state({{FactorKind::Qubit, 2}, {FactorKind::Mode, b.dim()}}, l);
    }

    static HybridState two_ions(const FockBasis& b1, const FockBasis& b2, int q1, int m1,
                                int q2, int m2) {
        const int l[4] = {q1, m1, q2, m2};
        return basis_state({{FactorKind::Qubit, 2},
                            {FactorKind::Mode, b1.dim()},
                            {FactorKind::Qubit, 2},
                            {FactorKind::Mode, b2.dim()}},
                           l);
    }

    // Vibration-only two-mode state |m1> ⊗ |m2>.
    static HybridState two_modes(const FockBasis& b1, const FockBasis& b2, int m1, int m2) {
        const int l[2] = {m1, m2};
        return basis_state({{FactorKind::Mode, b1.dim()}, {FactorKind::Mode, b2.dim()}}, l);
    }
};

inline long state_index(const HybridState& s, std::span<const int> labels) {
    long idx = 0;
    for (size_t i = 0; i < s.factors.size(); ++i) idx = idx * s.factors[i].dim + labels[i];
    return idx;
}

inline HybridState tensor(std::span<const HybridState> states) {
    if (states.empty()) throw std::invalid_argument("tensor: empty operand list");
    HybridState out = states[0];
    for (size_t i = 1; i < states.size(); ++i) {
        const Vector& a = out.amplitudes;
        const Vector& b = states[i].amplitudes;
        Vector c(a.size() * b.size());
        for (Eigen::Index p = 0; p < a.size(); ++p)
            c.segment(p * b.size(), b.size()) = a[p] * b;
        out.amplitudes = std::move(c);
        out.factors.insert(out.factors.end(), states[i].factors.begin(),
                           states[i].factors.end());
    }
    return out;
}

namespace detail {

inline std::vector<long> factor_strides(const std::vector<StateFactor>& f) {
    std::vector<long> stride(f.size());
    long s = 1;
    for (int i = int(f.size()) - 1; i >= 0; --i) {
        stride[i] = s;
        s *= f[i].dim;
    }
    return stride;
}

} // namespace detail

// Applies a unitary acting on the listed factors (first listed = slowest index
// of the matrix) and the identity on everything else.
inline void apply_factor_unitary(HybridState& state, std::span<const int> sel,
                                 const Matrix& u) {
    const auto& f = state.factors;
    const auto stride = detail::factor_strides(f);

    long bdim = 1;
    for (int i : sel) {
        if (i < 0 || i >= int(f.size()))
            throw std::invalid_argument("apply_factor_unitary: factor index out of range");
        bdim *= f[i].dim;
    }
    if (u.rows() != bdim || u.cols() != bdim)
        throw std::invalid_argument("apply_factor_unitary: matrix dimension mismatch");

    std::vector<long> sub_off(bdim);
    {
        std::vector<int> digit(sel.size(), 0);
        for (long b = 0; b < bdim; ++b) {
            long off = 0;
            for (size_t i = 0; i < sel.size(); ++i) off += digit[i] * stride[sel[i]];
            sub_off[b] = off;
            for (int i = int(sel.size()) - 1; i >= 0; --i) {
                if (++digit[i] < f[sel[i]].dim) break;
                digit[i] = 0;
            }
        }
    }

    std::vector<int> rest;
    for (int i = 0; i < int(f.size()); ++i)
        if (std::find(sel.begin(), sel.end(), i) == sel.end()) rest.push_back(i);
    long rdim = 1;
    for (int i : rest) rdim *= f[i].dim;

    Vector x(bdim), y(bdim);
    std::vector<int> rdigit(rest.size(), 0);
    for (long rb = 0; rb < rdim; ++rb) {
        long base = 0;
        for (size_t i = 0; i < rest.size(); ++i) base += rdigit[i] * stride[rest[i]];
        for (long b = 0; b < bdim; ++b) x[b] = state.amplitudes[base + sub_off[b]];
        y.noalias() = u * x;
        for (long b = 0; b < bdim; ++b) state.amplitudes[base + sub_off[b]] = y[b];
        for (int i = int(rest.size()) - 1; i >= 0; --i) {
            if (++rdigit[i] < f[rest[i]].dim) break;
            rdigit[i] = 0;
        }
    }
}

// Population of a single factor level, traced over all other factors.
inline double factor_population(const HybridState& state, int factor, int level) {
    const auto stride = detail::factor_strides(state.factors);
    const int d = state.factors[factor].dim;
    if (level < 0 || level >= d) return 0.0;
    double p = 0.0;
    const long n = state.dim();
    for (long i = 0; i < n; ++i) {
        if ((i / stride[factor]) % d == level) p += std::norm(state.amplitudes[i]);
    }
    return p;
}

} // namespace septrap
