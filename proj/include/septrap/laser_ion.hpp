#pragma once

// Laser-driven coupling of one ion's qubit to its axial vibration, valid at
// arbitrary Lamb-Dicke parameter. Provides the exact sideband Rabi
// frequencies, the closed-form resonant sideband evolution, the single-pulse
// vibration-conditioned flip (single-ion CNOT) duration solver, and the
// non-RWA interaction-picture model used to validate the closed forms.

#include <cmath>
#include <vector>

#include "septrap/constants.hpp"
#include "septrap/fockspace.hpp"
#include "septrap/propagate.hpp"

namespace septrap {

struct InternalLevels {
    double omega_a; // |g> <-> |e> transition frequency, rad/s

    void validate() const {
        if (omega_a <= 0) throw std::invalid_argument("InternalLevels: omega_a must be > 0");
    }
};

// One square pulse resonant on the k-th red sideband (omega_l = omega_a - k nu).
struct LaserPulse {
    double rabi;     // Ω, rad/s
    double eta;      // Lamb-Dicke parameter
    int sideband_k;  // 0 = carrier
    double phase;    // ϑ_l, rad
    double duration; // s

    void validate() const {
        if (rabi <= 0) throw std::invalid_argument("LaserPulse: rabi must be > 0");
        if (eta < 0) throw std::invalid_argument("LaserPulse: eta must be >= 0");
        if (sideband_k < 0) throw std::invalid_argument("LaserPulse: sideband_k must be >= 0");
        if (duration < 0) throw std::invalid_argument("LaserPulse: duration must be >= 0");
    }
};

namespace detail {

// i^n for any integer n.
inline Complex ipow(int n) {
    switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

} // namespace detail

// Exact sideband Rabi frequency
//   Ω_{m,k} = (Ω/2) η^k e^{-η²/2} √((m+k)!/m!) Σ_{j=0}^{m} (-η²)^j m!/((j+k)! j! (m-j)!).
// The sum is accumulated through term ratios so no factorial is ever formed;
// stable at least up to m + k = 40. The value is real and carries the sign of
// the generalized Laguerre polynomial L_m^k(η²).
inline double rabi_mk(double rabi, double eta, int m, int k) {
    if (m < 0 || k < 0) throw std::invalid_argument("rabi_mk: m and k must be >= 0");
    double prefactor = 0.5 * rabi * std::pow(eta, k) * std::exp(-0.5 * eta * eta);
    double rising = 1.0; // (m+1)(m+2)...(m+k)
    for (int i = 1; i <= k; ++i) rising *= double(m + i);
    prefactor *= std::sqrt(rising);

    double term = 1.0; // j = 0 term times k!
    for (int i = 2; i <= k; ++i) term /= double(i);
    double sum = term;
    for (int j = 0; j < m; ++j) {
        term *= -eta * eta * double(m - j) / (double(j + 1 + k) * double(j + 1));
        sum += term;
    }
    return prefactor * sum;
}

// Closed-form unitary of one resonant k-th red-sideband square pulse on the
// single-ion space |qubit> ⊗ |m> (qubit index slowest). Each Fock pair
// (|m'+k, g>, |m', e>) rotates by θ = Ω_{m',k} t:
//   |m,g> -> |m,g>                                          for m < k
//   |m,g> -> cos θ |m,g> + i^{k-1} e^{-iϑ} sin θ |m-k,e>    for m >= k
//   |m,e> -> cos θ |m,e> - (-i)^{k-1} e^{iϑ} sin θ |m+k,g>.
// The top k excited levels have no partner inside the truncation and are
// left untouched; callers must keep population away from that edge.
inline Matrix sideband_unitary(const FockBasis& basis, const LaserPulse& pulse) {
    const int nd = basis.dim();
    const int k = pulse.sideband_k;
    Matrix u = Matrix::Identity(2 * nd, 2 * nd);
    const auto g_idx = [nd](int m) { return m; };
    const auto e_idx = [nd](int m) { return nd + m; };
    const Complex up_phase = detail::ipow(k - 1) * std::polar(1.0, -pulse.phase);
    const Complex down_phase = -std::conj(detail::ipow(k - 1)) * std::polar(1.0, pulse.phase);
    for (int mp = 0; mp + k <= basis.n_max; ++mp) {
        const double theta = rabi_mk(pulse.rabi, pulse.eta, mp, k) * pulse.duration;
        const double c = std::cos(theta), s = std::sin(theta);
        u(g_idx(mp + k), g_idx(mp + k)) = c;
        u(e_idx(mp), g_idx(mp + k)) = up_phase * s;
        u(e_idx(mp), e_idx(mp)) = c;
        u(g_idx(mp + k), e_idx(mp)) = down_phase * s;
    }
    return u;
}

// In-place variant acting on the (qubit, mode) factor pair of a larger state.
inline void sideband_evolve_in_place(HybridState& state, int qubit_factor, int mode_factor,
                                     const LaserPulse& pulse,
                                     double edge_threshold = 1e-8) {
    const int k = pulse.sideband_k;
    const auto& f = state.factors;
    if (f[qubit_factor].kind != FactorKind::Qubit || f[mode_factor].kind != FactorKind::Mode)
        throw std::invalid_argument("sideband_evolve: factor kinds do not match (qubit, mode)");
    const int nd = f[mode_factor].dim;
    if (k > 0) {
        double edge = 0.0;
        for (int m = nd - k; m < nd; ++m) {
            if (m < 0) continue;
            // population of |m, e>; would map to |m+k> beyond the cutoff
            double p = 0.0;
            const auto stride = detail::factor_strides(f);
            for (long i = 0; i < state.dim(); ++i) {
                if ((i / stride[mode_factor]) % nd == m &&
                    (i / stride[qubit_factor]) % 2 == 1)
                    p += std::norm(state.amplitudes[i]);
            }
            edge += p;
        }
        if (edge > edge_threshold)
            throw TruncationError("sideband_evolve: population on the top " +
                                  std::to_string(k) + " excited Fock levels exceeds " +
                                  std::to_string(edge_threshold));
    }
    const FockBasis basis(nd - 1);
    const int sel[2] = {qubit_factor, mode_factor};
    apply_factor_unitary(state, sel, sideband_unitary(basis, pulse));
}

// Single-ion convenience overload.
inline HybridState sideband_evolve(const HybridState& state, const LaserPulse& pulse) {
    if (state.factors.size() != 2)
        throw std::invalid_argument("sideband_evolve: expected a single-ion (qubit, mode) state");
    HybridState out = state;
    sideband_evolve_in_place(out, 0, 1, pulse);
    return out;
}

struct CnotDurationResult {
    double t3;             // s
    double achieved_error; // max(1 - cos(Ω00 t3), 1 - sin(Ω10 t3))
};

// Smallest t with cos(Ω_{0,0} t) ≈ sin(Ω_{1,0} t) ≈ 1 within infidelity_tol.
// Scans cos peaks t_p = 2πp/Ω00, pairs each with the nearest sin peak, and
// refines t inside the bracket to minimize the max deviation; exact
// simultaneity is impossible for generic Ω10/Ω00 so the residual is returned.
inline CnotDurationResult solve_cnot_duration(double rabi, double eta,
                                              double infidelity_tol, double t_max) {
    const double om00 = rabi_mk(rabi, eta, 0, 0);
    const double om10 = rabi_mk(rabi, eta, 1, 0);
    if (std::abs(om00 - om10) < 1e-9 * om00)
        throw SimulationError("solve_cnot_duration: Omega_{0,0} == Omega_{1,0} (eta too "
                              "small), no vibration-conditioned flip exists");
    const auto objective = [&](double t) {
        return std::max(1.0 - std::cos(om00 * t), 1.0 - std::sin(om10 * t));
    };
    using constants::pi;
    for (int p = 1;; ++p) {
        const double tp = constants::two_pi * p / om00;
        if (tp > t_max) break;
        const double r = std::round((om10 * tp - 0.5 * pi) / constants::two_pi);
        const double ts = (0.5 * pi + constants::two_pi * r) / om10;
        // Between the two peaks the cos error rises from 0 while the sin error
        // falls to 0; the minimax point is where they cross.
        double lo = std::min(tp, ts), hi = std::max(tp, ts);
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double d = (1.0 - std::cos(om00 * mid)) - (1.0 - std::sin(om10 * mid));
            if ((tp < ts) == (d < 0.0))
                lo = mid;
            else
                hi = mid;
        }
        double best_t = tp, best_err = objective(tp);
        for (double cand : {ts, 0.5 * (lo + hi)}) {
            if (cand <= t_max && objective(cand) < best_err) {
                best_t = cand;
                best_err = objective(cand);
            }
        }
        if (best_err <= infidelity_tol) return {best_t, best_err};
    }
    throw SimulationError("solve_cnot_duration: no solution below t_max at the requested "
                          "tolerance");
}

namespace detail {

// Cached dense powers of the ladder operators, for assembling (a†)^n a^m.
struct LadderPowers {
    std::vector<Matrix> a_pow, adag_pow;
    explicit LadderPowers(const FockBasis& basis, int max_order) {
        const Matrix a = annihilation_matrix(basis.dim());
        const Matrix ad = a.adjoint();
        a_pow.resize(max_order + 1);
        adag_pow.resize(max_order + 1);
        a_pow[0] = adag_pow[0] = Matrix::Identity(basis.dim(), basis.dim());
        for (int i = 1; i <= max_order; ++i) {
            a_pow[i] = a_pow[i - 1] * a;
            adag_pow[i] = adag_pow[i - 1] * ad;
        }
    }
};

inline SparseMatrix sigma_plus_times(const Matrix& mode_op) {
    // |e><g| ⊗ mode_op on the (qubit slow, mode fast) layout
    const int nd = int(mode_op.rows());
    Matrix full = Matrix::Zero(2 * nd, 2 * nd);
    full.block(nd, 0, nd, nd) = mode_op;
    return to_sparse(full);
}

} // namespace detail

// Resonant k-th sideband Hamiltonian in the rotating-wave approximation,
// assembled from the operator series
//   H/ħ = (Ω/2) e^{-η²/2 - iϑ} (iη)^k σ₊ Σ_j (iη)^{2j} (a†)^j a^{j+k} / (j!(j+k)!) + H.c.
// Deliberately built from ladder-operator products rather than from rabi_mk,
// so integrating it is an independent check of the closed-form map.
inline TimeDependentHamiltonian rwa_sideband_hamiltonian(const FockBasis& basis,
                                                         const LaserPulse& pulse) {
    const int k = pulse.sideband_k;
    const int jmax = std::max(0, basis.n_max - k);
    detail::LadderPowers lad(basis, jmax + k);
    TimeDependentHamiltonian h(2 * basis.dim());
    const Complex ieta(0.0, pulse.eta);
    Complex coeff = 0.5 * pulse.rabi * std::exp(-0.5 * pulse.eta * pulse.eta) *
                    std::pow(ieta, k) * std::polar(1.0, -pulse.phase);
    for (int i = 2; i <= k; ++i) coeff /= double(i); // 1/k!
    for (int j = 0; j <= jmax; ++j) {
        const Matrix op = lad.adag_pow[j] * lad.a_pow[j + k];
        const Complex c = coeff;
        h.add_term_with_adjoint(detail::sigma_plus_times(op),
                                [c](double) { return c; });
        coeff *= ieta * ieta / (double(j + 1) * double(j + 1 + k));
    }
    return h;
}

struct FullInteractionOptions {
    double tol = 1e-8;
    // Keep the co-rotating f1 = e^{i(ω_a+ω_l)t + iϑ} terms. They oscillate at
    // optical frequency, so this only makes sense with a scaled-down omega_a
    // for stress tests; the default model drops them.
    bool keep_f1 = false;
    double omega_a_override = 0.0; // rad/s, used when keep_f1 is set
};

// Interaction-picture laser-ion Hamiltonian without the rotating-wave
// approximation, truncated at  n + m <= order_cutoff  in the displacement
// series:
//   H/ħ = (Ω/2) e^{-η²/2} σ₊ Σ_{n,m} [(-1)^{n+m} f1 + f2]
//         (iη)^{n+m} (a†)^n a^m e^{i(n-m)νt} / (n! m!) + H.c.
// with f2 = e^{ikνt - iϑ} for the resonant k-th red sideband. With f1
// dropped all coefficient frequencies are integer multiples of ν, so the
// Hamiltonian is periodic with period 2π/ν.
inline TimeDependentHamiltonian full_interaction_hamiltonian(
    const FockBasis& basis, const LaserPulse& pulse, const InternalLevels& levels,
    double trap_nu, int order_cutoff, const FullInteractionOptions& opt = {}) {
    if (order_cutoff < 1)
        throw std::invalid_argument("full_interaction_hamiltonian: order_cutoff must be >= 1");
    levels.validate();
    const int k = pulse.sideband_k;
    detail::LadderPowers lad(basis, std::min(order_cutoff, basis.n_max));
    TimeDependentHamiltonian h(2 * basis.dim());
    const double base = 0.5 * pulse.rabi * std::exp(-0.5 * pulse.eta * pulse.eta);
    const Complex ieta(0.0, pulse.eta);
    const double omega_a =
        opt.omega_a_override > 0.0 ? opt.omega_a_override : levels.omega_a;
    for (int n = 0; n <= order_cutoff && n <= basis.n_max; ++n) {
        for (int m = 0; n + m <= order_cutoff && m <= basis.n_max; ++m) {
            double fact = 1.0;
            for (int i = 2; i <= n; ++i) fact *= i;
            for (int i = 2; i <= m; ++i) fact *= i;
            const Complex amp = base * std::pow(ieta, n + m) / fact;
            const SparseMatrix op =
                detail::sigma_plus_times(lad.adag_pow[n] * lad.a_pow[m]);
            const double f2_freq = double(n - m + k) * trap_nu;
            const Complex f2_amp = amp * std::polar(1.0, -pulse.phase);
            h.add_term_with_adjoint(
                op, [f2_amp, f2_freq](double t) { return f2_amp * std::polar(1.0, f2_freq * t); });
            if (opt.keep_f1) {
                const double f1_freq = double(n - m) * trap_nu + 2.0 * omega_a - k * trap_nu;
                const Complex f1_amp =
                    amp * double((n + m) % 2 == 0 ? 1 : -1) * std::polar(1.0, pulse.phase);
                h.add_term_with_adjoint(op, [f1_amp, f1_freq](double t) {
                    return f1_amp * std::polar(1.0, f1_freq * t);
                });
            }
        }
    }
    return h;
}

// Full-model propagator for one pulse on the (qubit, mode) space. Used as a
// validation oracle for sideband_evolve; the residual against the closed form
// is the physical RWA error at the given Ω/ν.
inline Matrix full_interaction_unitary(const FockBasis& basis, const LaserPulse& pulse,
                                       const InternalLevels& levels, double trap_nu,
                                       int order_cutoff,
                                       const FullInteractionOptions& opt = {}) {
    const auto h = full_interaction_hamiltonian(basis, pulse, levels, trap_nu,
                                                order_cutoff, opt);
    if (!opt.keep_f1) {
        const double period = constants::two_pi / trap_nu;
        return periodic_propagator(h, period, pulse.duration, opt.tol);
    }
    PropagateOptions popt;
    popt.tol = opt.tol;
    return propagator_matrix(h, 0.0, pulse.duration, popt);
}

inline HybridState full_interaction_propagate(const HybridState& state,
                                              const LaserPulse& pulse,
                                              const InternalLevels& levels, double trap_nu,
                                              int order_cutoff,
                                              const FullInteractionOptions& opt = {}) {
    if (state.factors.size() != 2 || state.factors[0].kind != FactorKind::Qubit)
        throw std::invalid_argument("full_interaction_propagate: expected a single-ion state");
    const FockBasis basis(state.factors[1].dim - 1);
    const double period = constants::two_pi / trap_nu;
    HybridState out = state;
    if (!opt.keep_f1 && pulse.duration > 32.0 * period) {
        const int sel[2] = {0, 1};
        apply_factor_unitary(
            out, sel,
            full_interaction_unitary(basis, pulse, levels, trap_nu, order_cutoff, opt));
        return out;
    }
    const auto h =
        full_interaction_hamiltonian(basis, pulse, levels, trap_nu, order_cutoff, opt);
    PropagateOptions popt;
    popt.tol = opt.tol;
    propagate_in_place(out.amplitudes, h, 0.0, pulse.duration, popt);
    return out;
}

} // namespace septrap
