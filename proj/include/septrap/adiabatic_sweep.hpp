#pragma once

// Linear ramps of trap 1's frequency between resonance with trap 2 and a
// parked detuning Δ, switching the exchange coupling on and off. The state is
// carried in the instantaneous Fock basis of the ramped mode throughout: the
// integration frame removes the diagonal ν₁(t)(n+1/2) + ν₂(n+1/2) phases
// analytically and keeps only the basis-change (Bogoliubov connection) term
// -i (ν̇₁/4ν₁)(a₁² e^{-2iφ₁} - h.c.) plus, when the coupling is on, the full
// quadratic Coulomb terms. With amplitudes this small the integrator meets
// tight tolerances cheaply, and "occupations unchanged" is read off directly.

#include <cmath>

#include "septrap/constants.hpp"
#include "septrap/coulomb_coupling.hpp"
#include "septrap/fockspace.hpp"
#include "septrap/propagate.hpp"

namespace septrap {

enum class SweepDirection { RampOn, RampOff };

// RampOn runs ν₁ from ν₂ + Δ down to ν₂ over τ; RampOff runs it back up.
// The rate satisfies β τ = Δ.
struct SweepSpec {
    double beta;          // rad/s², magnitude of dν₁/dt
    double tau;           // s
    double delta_initial; // rad/s
    SweepDirection direction = SweepDirection::RampOn;

    void validate() const {
        if (tau <= 0) throw std::invalid_argument("SweepSpec: tau must be > 0");
        if (beta < 0 || delta_initial < 0)
            throw std::invalid_argument("SweepSpec: beta and delta must be >= 0");
        if (std::abs(beta * tau - delta_initial) >
            1e-9 * std::max(1.0, delta_initial))
            throw std::invalid_argument("SweepSpec: beta*tau must equal delta_initial");
    }

    static SweepSpec ramp(double delta, double tau, SweepDirection dir) {
        SweepSpec s{delta / tau, tau, delta, dir};
        s.validate();
        return s;
    }
    SweepSpec reversed() const {
        SweepSpec s = *this;
        s.direction = direction == SweepDirection::RampOn ? SweepDirection::RampOff
                                                          : SweepDirection::RampOn;
        return s;
    }
};

// Adiabaticity parameter γ_{n,m} = |<n|∂H/∂τ|m> / (ħ ν₁² (n-m)²)| evaluated in
// the instantaneous harmonic basis at ν₁. ∂H/∂τ = M₁ ν₁ β z₁² couples only
// |n-m| = 2, where M₁ ν₁ ξ₁² = ħ/2 gives the closed form
// β sqrt((l+1)(l+2)) / (8 ν₁²) with l = min(n, m).
inline double gamma_nm(const TrapPair& pair, const SweepSpec& sweep, int n, int m,
                       double at_nu1) {
    pair.validate();
    sweep.validate();
    if (n == m) throw std::invalid_argument("gamma_nm: requires n != m");
    if (n < 0 || m < 0) throw std::invalid_argument("gamma_nm: n and m must be >= 0");
    const double slack = 1e-9 * pair.nu2;
    if (at_nu1 < pair.nu2 - slack || at_nu1 > pair.nu2 + sweep.delta_initial + slack)
        throw std::invalid_argument("gamma_nm: at_nu1 is outside the ramp range");
    if (std::abs(n - m) != 2) return 0.0;
    const int l = std::min(n, m);
    return sweep.beta * std::sqrt(double(l + 1) * double(l + 2)) / (8.0 * at_nu1 * at_nu1);
}

namespace detail {

struct RampProfile {
    double nu_start;  // ν₁ at t = 0
    double slope;     // dν₁/dt, signed
    double shift_c;   // K / (M₁ d²); ν̃₁(t) = shift_c / ν₁(t)
    double shift2;    // ν̃₂, constant
    double nu2;       // anchor frequency of trap 2
    bool coupling;

    double nu1(double t) const { return nu_start + slope * t; }
    double omega1_phase(double t) const {
        double phi = nu_start * t + 0.5 * slope * t * t;
        if (coupling) phi += shift_integral(t);
        return phi;
    }
    double omega2_phase(double t) const {
        return (nu2 + (coupling ? shift2 : 0.0)) * t;
    }
    double shift_integral(double t) const {
        if (slope == 0.0) return shift_c * t / nu_start;
        return shift_c / slope * std::log(nu1(t) / nu_start);
    }
};

inline RampProfile make_ramp_profile(const TrapPair& pair, const SweepSpec& sweep,
                                     bool coupling) {
    RampProfile p;
    p.nu2 = pair.nu2;
    if (sweep.direction == SweepDirection::RampOn) {
        p.nu_start = pair.nu2 + sweep.delta_initial;
        p.slope = -sweep.beta;
    } else {
        p.nu_start = pair.nu2;
        p.slope = sweep.beta;
    }
    p.shift_c = pair.coulomb_energy() / (pair.ion1.mass * pair.distance * pair.distance);
    p.shift2 = frequency_shift(pair, 2);
    p.coupling = coupling;
    return p;
}

} // namespace detail

// Pair with trap 1 set to the anchor frequency ν₂ (resonant configuration).
inline TrapPair pair_at_resonance(const TrapPair& pair) {
    TrapPair p = pair;
    p.nu1 = p.nu2;
    return p;
}

// Interaction-frame Hamiltonian of one ramp; trap 2 stays at pair.nu2 and the
// ramp is anchored there (pair.nu1 is the nominal resonant value).
inline TimeDependentHamiltonian sweep_hamiltonian(const TrapPair& pair,
                                                  const FockBasis& b1, const FockBasis& b2,
                                                  const SweepSpec& sweep,
                                                  bool include_coupling) {
    pair.validate();
    sweep.validate();
    const auto prof = detail::make_ramp_profile(pair, sweep, include_coupling);

    const int d1 = b1.dim(), d2 = b2.dim();
    const Matrix a1 = kron(annihilation_matrix(d1), Matrix::Identity(d2, d2));
    const Matrix a2 = kron(Matrix::Identity(d1, d1), annihilation_matrix(d2));

    TimeDependentHamiltonian h(d1 * d2);
    h.add_term_with_adjoint(to_sparse(a1 * a1), [prof](double t) {
        const Complex conn(0.0, -prof.slope / (4.0 * prof.nu1(t)));
        return conn * std::polar(1.0, -2.0 * prof.omega1_phase(t));
    });
    if (include_coupling) {
        const double k_over_m1d2 = prof.shift_c; // = ν̃₁(t) ν₁(t)
        h.add_term_with_adjoint(to_sparse(a1 * a1), [prof, k_over_m1d2](double t) {
            const double shift1 = k_over_m1d2 / prof.nu1(t);
            return Complex(0.5 * shift1, 0.0) *
                   std::polar(1.0, -2.0 * prof.omega1_phase(t));
        });
        h.add_term_with_adjoint(to_sparse(a2 * a2), [prof](double t) {
            return Complex(0.5 * prof.shift2, 0.0) *
                   std::polar(1.0, -2.0 * prof.omega2_phase(t));
        });
        const double g_at_nu2 = coupling_g(pair_at_resonance(pair));
        h.add_term_with_adjoint(to_sparse(a1 * a2), [prof, g_at_nu2](double t) {
            const double g = g_at_nu2 * std::sqrt(prof.nu2 / prof.nu1(t));
            return Complex(-g, 0.0) *
                   std::polar(1.0, -(prof.omega1_phase(t) + prof.omega2_phase(t)));
        });
        h.add_term_with_adjoint(to_sparse(a1 * a2.adjoint()), [prof, g_at_nu2](double t) {
            const double g = g_at_nu2 * std::sqrt(prof.nu2 / prof.nu1(t));
            return Complex(-g, 0.0) *
                   std::polar(1.0, -(prof.omega1_phase(t) - prof.omega2_phase(t)));
        });
    }
    return h;
}

struct SweepResult {
    HybridState state;
    double leakage;                // population outside the allowed mode-1 levels
    double accrued_exchange_angle; // rad, measured on a single-excitation probe
};

// Ramp unitary in the instantaneous-basis interaction frame, as a matrix on
// |m1> ⊗ |m2> (used by the protocol, where it acts on the two mode factors).
inline Matrix sweep_ramp_unitary(const TrapPair& pair, const FockBasis& b1,
                                 const FockBasis& b2, const SweepSpec& sweep,
                                 bool include_coupling, double tol = 1e-10) {
    const auto h = sweep_hamiltonian(pair, b1, b2, sweep, include_coupling);
    PropagateOptions opt;
    opt.tol = tol;
    return propagator_matrix(h, 0.0, sweep.tau, opt);
}

// Simulates one ramp. Leakage counts final population of mode 1 outside the
// initially occupied levels (coupling off) or outside [0, highest initially
// occupied level] (coupling on, where exchange legitimately lowers the mode).
inline SweepResult sweep_propagate(const HybridState& two_modes, const TrapPair& pair,
                                   const SweepSpec& sweep, bool include_coupling,
                                   double tol = 1e-10) {
    if (two_modes.factors.size() != 2 ||
        two_modes.factors[0].kind != FactorKind::Mode ||
        two_modes.factors[1].kind != FactorKind::Mode)
        throw std::invalid_argument("sweep_propagate: expected a two-mode state");
    const FockBasis b1(two_modes.factors[0].dim - 1), b2(two_modes.factors[1].dim - 1);
    const auto h = sweep_hamiltonian(pair, b1, b2, sweep, include_coupling);
    PropagateOptions opt;
    opt.tol = tol;

    const int d1 = b1.dim();
    std::vector<bool> allowed(d1, false);
    int top = -1;
    for (int m = 0; m < d1; ++m) {
        if (factor_population(two_modes, 0, m) > 1e-12) {
            allowed[m] = true;
            top = m;
        }
    }
    if (include_coupling)
        for (int m = 0; m <= top; ++m) allowed[m] = true;

    SweepResult res;
    res.state = two_modes;
    propagate_in_place(res.state.amplitudes, h, 0.0, sweep.tau, opt);

    res.leakage = 0.0;
    for (int m = 0; m < d1; ++m)
        if (!allowed[m]) res.leakage += factor_population(res.state, 0, m);

    res.accrued_exchange_angle = 0.0;
    if (include_coupling) {
        HybridState probe = HybridState::two_modes(b1, b2, 1, 0);
        propagate_in_place(probe.amplitudes, h, 0.0, sweep.tau, opt);
        const int l01[2] = {0, 1};
        const double transferred = std::abs(probe.amplitudes[state_index(probe, l01)]);
        res.accrued_exchange_angle = std::asin(std::min(1.0, transferred));
    }
    return res;
}

// Basis-change matrix B with B(m, n) = <m; nu_to | n; nu_from> relating Fock
// amplitudes of oscillators with equal mass and different frequencies
// (position and momentum matched). Computed by diagonalizing the nu_to
// oscillator in the nu_from ladder representation; used to cross-check the
// continuous instantaneous-frame bookkeeping.
inline Matrix frequency_change_squeeze(const FockBasis& basis, double nu_from,
                                       double nu_to) {
    const int d = basis.dim();
    const Matrix a = annihilation_matrix(d);
    const Matrix x = a + Matrix(a.adjoint());
    Eigen::MatrixXd hto = Eigen::MatrixXd::Zero(d, d);
    for (int m = 0; m < d; ++m) hto(m, m) = nu_from * (m + 0.5);
    hto += (nu_to * nu_to - nu_from * nu_from) / (4.0 * nu_from) * (x * x).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hto);
    Eigen::MatrixXd v = es.eigenvectors();
    for (int n = 0; n < d; ++n)
        if (v(n, n) < 0) v.col(n) *= -1.0;
    return v.transpose().cast<Complex>();
}

} // namespace septrap
