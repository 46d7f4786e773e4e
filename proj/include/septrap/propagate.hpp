#pragma once

// Time-ordered propagation of i dψ/dt = H(t) ψ with H in angular-frequency
// units (H/ħ, rad/s). The integrator is an adaptive step-doubling RK4 with
// Richardson extrapolation; the contract is accuracy-based: the per-run
// error budget is `tol`, so halving the accepted steps changes the final
// amplitudes by less than tol. Hamiltonians are sums of constant sparse
// operators with time-dependent scalar coefficients, which covers every
// model in this project and keeps the right-hand side cheap.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "septrap/fockspace.hpp"

namespace septrap {

class TimeDependentHamiltonian {
public:
    explicit TimeDependentHamiltonian(int dim) : dim_(dim) {}

    int dim() const { return dim_; }

    void add_term(const SparseMatrix& op, std::function<Complex(double)> coeff) {
        terms_.push_back({op, SparseMatrix(), std::move(coeff), false});
    }

    // Adds coeff(t)·op + conj(coeff(t))·op†, keeping H Hermitian by construction.
    void add_term_with_adjoint(const SparseMatrix& op, std::function<Complex(double)> coeff) {
        terms_.push_back({op, op.adjoint(), std::move(coeff), true});
    }

    void add_static(const SparseMatrix& op) {
        add_term(op, [](double) { return Complex(1.0, 0.0); });
    }

    template <class Dense, class DenseOut>
    void apply(double t, const Dense& x, DenseOut& out) const {
        out.setZero();
        for (const auto& term : terms_) {
            const Complex c = term.coeff(t);
            out.noalias() += c * (term.op * x);
            if (term.with_adjoint) out.noalias() += std::conj(c) * (term.op_adj * x);
        }
    }

    Matrix dense(double t) const {
        Matrix h = Matrix::Zero(dim_, dim_);
        for (const auto& term : terms_) {
            const Complex c = term.coeff(t);
            h += c * Matrix(term.op);
            if (term.with_adjoint) h += std::conj(c) * Matrix(term.op_adj);
        }
        return h;
    }

    // max|H - H†| / max|H|, zero for an all-zero Hamiltonian.
    double hermiticity_defect(double t) const {
        const Matrix h = dense(t);
        const double scale = h.cwiseAbs().maxCoeff();
        if (scale == 0.0) return 0.0;
        return (h - Matrix(h.adjoint())).cwiseAbs().maxCoeff() / scale;
    }

private:
    struct Term {
        SparseMatrix op;
        SparseMatrix op_adj;
        std::function<Complex(double)> coeff;
        bool with_adjoint;
    };
    int dim_;
    std::vector<Term> terms_;
};

struct PropagateOptions {
    double tol = 1e-10;
    long max_steps = 100'000'000;
    double hermiticity_tol = 1e-12;
};

struct PropagateStats {
    long accepted = 0;
    long rejected = 0;
    double error_estimate = 0.0;
};

namespace detail {

template <class State>
double max_abs(const State& s) {
    return s.cwiseAbs().maxCoeff();
}

// One classic RK4 step of y' = -i H(t) y.
template <class State>
void rk4_step(const TimeDependentHamiltonian& h, double t, double dt, const State& y,
              State& out, State& k, State& acc, State& tmp) {
    const Complex mi(0.0, -1.0);
    h.apply(t, y, k);
    k *= mi;
    acc = y + (dt / 6.0) * k;          // accumulate y + dt/6 (k1 + 2k2 + 2k3 + k4)
    tmp = y + (0.5 * dt) * k;
    h.apply(t + 0.5 * dt, tmp, k);
    k *= mi;
    acc += (dt / 3.0) * k;
    tmp = y + (0.5 * dt) * k;
    h.apply(t + 0.5 * dt, tmp, k);
    k *= mi;
    acc += (dt / 3.0) * k;
    tmp = y + dt * k;
    h.apply(t + dt, tmp, k);
    k *= mi;
    out = acc + (dt / 6.0) * k;
}

template <class State>
PropagateStats propagate_state(State& y, const TimeDependentHamiltonian& h, double t0,
                               double t1, const PropagateOptions& opt) {
    const double span = t1 - t0;
    PropagateStats stats;
    if (span == 0.0) return stats;
    if (span < 0.0) throw std::invalid_argument("propagate: t1 must be >= t0");
    if (opt.tol <= 0.0) throw std::invalid_argument("propagate: tol must be positive");

    for (double ts : {t0, t0 + 0.5 * span, t1}) {
        if (h.hermiticity_defect(ts) > opt.hermiticity_tol)
            throw NonHermitianError("propagate: hamiltonian is not Hermitian at t = " +
                                    std::to_string(ts));
    }

    State y_big = y, y_half = y, y_two = y, k = y, acc = y, tmp = y;
    double t = t0;
    double dt = span / 64.0;
    const double dt_floor = span * 1e-14;
    // Half the budget, spent proportionally to step length.
    const double rate = 0.5 * opt.tol / span;

    while (t < t1) {
        bool last = false;
        if (dt >= (t1 - t) * (1.0 - 1e-12)) {
            dt = t1 - t;
            last = true;
        }
        rk4_step(h, t, dt, y, y_big, k, acc, tmp);
        rk4_step(h, t, 0.5 * dt, y, y_half, k, acc, tmp);
        rk4_step(h, t + 0.5 * dt, 0.5 * dt, y_half, y_two, k, acc, tmp);
        const double err = max_abs((y_two - y_big).eval()) / 15.0;
        // The estimator cannot resolve below the rounding noise of y itself.
        const double noise_floor =
            64.0 * std::numeric_limits<double>::epsilon() * max_abs(y);
        const double target = std::max(rate * dt, noise_floor);
        if (err <= target) {
            y = y_two + (y_two - y_big) / 15.0;
            t = last ? t1 : t + dt;
            ++stats.accepted;
            stats.error_estimate += err;
            if (stats.accepted % 64 == 0 &&
                h.hermiticity_defect(t) > opt.hermiticity_tol)
                throw NonHermitianError("propagate: hamiltonian is not Hermitian at t = " +
                                        std::to_string(t));
        } else {
            ++stats.rejected;
            if (0.2 * dt < dt_floor)
                throw PropagationError("propagate: step size underflow before reaching tol");
        }
        const double fac = err > 0.0 ? 0.9 * std::pow(target / err, 0.25) : 5.0;
        dt *= std::clamp(fac, 0.2, 5.0);
        if (stats.accepted + stats.rejected > opt.max_steps)
            throw PropagationError("propagate: step budget exhausted before reaching tol");
    }
    return stats;
}

} // namespace detail

inline PropagateStats propagate_in_place(Vector& y, const TimeDependentHamiltonian& h,
                                         double t0, double t1,
                                         const PropagateOptions& opt = {}) {
    const double n0 = y.norm();
    PropagateStats stats = detail::propagate_state(y, h, t0, t1, opt);
    if (std::abs(y.norm() - n0) > 10.0 * opt.tol * std::max(1.0, n0))
        throw PropagationError("propagate: norm drift exceeds tolerance");
    return stats;
}

inline PropagateStats propagate_in_place(Matrix& y, const TimeDependentHamiltonian& h,
                                         double t0, double t1,
                                         const PropagateOptions& opt = {}) {
    return detail::propagate_state(y, h, t0, t1, opt);
}

// Propagator U(t1, t0) as a dense matrix.
inline Matrix propagator_matrix(const TimeDependentHamiltonian& h, double t0, double t1,
                                const PropagateOptions& opt = {}) {
    Matrix u = Matrix::Identity(h.dim(), h.dim());
    propagate_in_place(u, h, t0, t1, opt);
    return u;
}

inline Matrix matrix_power(Matrix u, long n) {
    Matrix out = Matrix::Identity(u.rows(), u.cols());
    while (n > 0) {
        if (n & 1) out = u * out;
        u = u * u;
        n >>= 1;
    }
    return out;
}

// Propagator over t_total for a Hamiltonian periodic in t with the given
// period: one accurately integrated period map raised to the q-th power,
// then the fractional remainder. Exact up to the integration tolerance.
inline Matrix periodic_propagator(const TimeDependentHamiltonian& h, double period,
                                  double t_total, double tol) {
    const long q = long(std::floor(t_total / period + 1e-12));
    PropagateOptions opt;
    if (q < 4) {
        opt.tol = tol;
        return propagator_matrix(h, 0.0, t_total, opt);
    }
    const double rem = t_total - double(q) * period;
    opt.tol = 0.5 * tol / double(q);
    Matrix u = matrix_power(propagator_matrix(h, 0.0, period, opt), q);
    if (rem > period * 1e-12) {
        opt.tol = 0.5 * tol;
        u = propagator_matrix(h, 0.0, rem, opt) * u;
    }
    return u;
}

// HybridState front end used by the physics modules.
inline HybridState propagate(const HybridState& state, const TimeDependentHamiltonian& h,
                             double t_span, double tol) {
    if (h.dim() != state.dim())
        throw std::invalid_argument("propagate: hamiltonian/state dimension mismatch");
    HybridState out = state;
    PropagateOptions opt;
    opt.tol = tol;
    propagate_in_place(out.amplitudes, h, 0.0, t_span, opt);
    return out;
}

} // namespace septrap
