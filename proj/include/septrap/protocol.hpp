#pragma once

// The five-step CNOT between two separately trapped ions:
//   I   red-sideband π/2 pulse on ion 1 (phase ϑ₁), mapping |0,e> -> e^{i(ϑ₁+π)}|1,g>
//   II  adiabatic ramp to resonance, exchange hold t₂ = π/(2g), ramp off
//   III resonant carrier pulse of duration t₃ on ion 2 (phase ϑ₃), the
//       vibration-conditioned flip cos(Ω₀₀t₃) = sin(Ω₁₀t₃) = 1
//   IV  repeat II
//   V   red-sideband π/2 pulse on ion 1 (phase ϑ₅)
// In closed-form mode the steps are the analytic sideband/exchange maps; in
// full-numeric mode they are replaced by the non-RWA pulse model, the
// numeric ramps and the full coupling model. The truth table carries phases
// e^{i(ϑ₁∓ϑ₃-ϑ₅+3π/2)} on the flipped rows; ϑ₁-ϑ₅ = -3π/2 with ϑ₃ = 0
// makes the gate exact.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "septrap/adiabatic_sweep.hpp"
#include "septrap/constants.hpp"
#include "septrap/coulomb_coupling.hpp"
#include "septrap/laser_ion.hpp"

namespace septrap {

struct ProtocolPhases {
    double theta1 = 0.0;
    double theta3 = 0.0;
    double theta5 = 1.5 * constants::pi;
};

enum class ProtocolMode { ClosedForm, FullNumeric };

struct ScheduleOptions {
    ProtocolMode mode = ProtocolMode::ClosedForm;
    int n_max = 10;           // Fock truncation per mode
    double cnot_tol = 1e-2;   // residual allowed by the t₃ solver
    double t3_max = 1e-3;     // s, search bound for t₃
    double g_override = 0.0;  // rad/s; use instead of coupling_g(pair) when set
    // Shorten the hold by the ramp-accrued exchange angle instead of using
    // the designed t₂ = π/(2g). Full-numeric mode only.
    bool compensate_hold = false;
    int order_cutoff = 8;     // displacement-series order of the full pulse model
    double tol = 1e-8;        // full-numeric integration tolerance
    double omega_a = 2.0 * constants::pi * 4.5e14; // nominal optical transition
};

struct ProtocolSchedule {
    TrapPair pair;
    double rabi = 0;
    double eta = 0;
    SweepSpec sweep;          // ramp-on; the ramp-off is its reverse
    ProtocolPhases phases;
    ScheduleOptions options;
    double g = 0;             // exchange coupling in use
    double t1 = 0, t2 = 0, t3 = 0, t5 = 0;
    double t3_error = 0;

    // Steps II and IV are charged ramp-on + hold + ramp-off = t₂ + 2τ each.
    std::vector<double> step_durations() const {
        const double exch = t2 + 2.0 * sweep.tau;
        return {t1, exch, t3, exch, t5};
    }
    double total_duration() const {
        return 2.0 * (t1 + t2) + t3 + 4.0 * sweep.tau;
    }
    LaserPulse pulse(int step) const {
        if (step == 1) return {rabi, eta, 1, phases.theta1, t1};
        if (step == 3) return {rabi, eta, 0, phases.theta3, t3};
        if (step == 5) return {rabi, eta, 1, phases.theta5, t5};
        throw std::invalid_argument("ProtocolSchedule::pulse: step must be 1, 3 or 5");
    }
};

inline ProtocolSchedule build_schedule(const TrapPair& pair, double rabi, double eta,
                                       const SweepSpec& sweep, const ProtocolPhases& phases,
                                       const ScheduleOptions& options = {}) {
    pair.validate();
    sweep.validate();
    ProtocolSchedule s;
    s.pair = pair;
    s.rabi = rabi;
    s.eta = eta;
    s.sweep = sweep;
    s.sweep.direction = SweepDirection::RampOn;
    s.phases = phases;
    s.options = options;
    s.g = options.g_override > 0.0 ? options.g_override : coupling_g(pair);
    s.t1 = s.t5 = 0.5 * constants::pi / rabi_mk(rabi, eta, 0, 1);
    s.t2 = 0.5 * constants::pi / s.g;
    const auto sol = solve_cnot_duration(rabi, eta, options.cnot_tol, options.t3_max);
    s.t3 = sol.t3;
    s.t3_error = sol.achieved_error;
    return s;
}

struct ProtocolReport {
    Eigen::Matrix4cd truth_table;     // basis order |gg>, |ge>, |eg>, |ee>
    double fidelity = 0;              // |tr(U_ideal† T)|² / 16
    double vibration_return_error = 0;
    std::vector<double> per_step_durations;
    double total_duration = 0;
    bool failed = false;
    std::string failure_reason;
    double hold_duration_used = 0;    // s, per exchange step
    double ramp_exchange_angle = 0;   // rad accrued across one on+off ramp pair
};

// Step III as the abstract vibration-conditioned flip: |0,·> untouched,
// |1,g> -> -i e^{-iϑ₃}|1,e>, |1,e> -> -i e^{iϑ₃}|1,g>, i.e. the carrier
// map with cos(Ω₀₀t₃) = sin(Ω₁₀t₃) = 1 exactly. The closed-form protocol
// composes this idealization; the solved t₃ never satisfies both conditions
// at once and its residual is reported as t3_error and probed by
// full-numeric mode. Levels m >= 2 are left alone (never populated by the
// closed-form steps).
inline Matrix ideal_carrier_unitary(const FockBasis& basis, double theta3) {
    const int nd = basis.dim();
    Matrix u = Matrix::Identity(2 * nd, 2 * nd);
    const Complex mi(0.0, -1.0);
    u(1, 1) = u(nd + 1, nd + 1) = 0.0;
    u(nd + 1, 1) = mi * std::polar(1.0, -theta3); // |1,g> -> |1,e>
    u(1, nd + 1) = mi * std::polar(1.0, theta3);  // |1,e> -> |1,g>
    return u;
}

namespace detail {

// The executable step sequence; built once per schedule, applied per input.
struct ProtocolExecutor {
    std::vector<std::function<void(HybridState&)>> steps;
    double hold_used = 0;
    double ramp_angle = 0;
};

inline ProtocolExecutor make_executor(const ProtocolSchedule& s) {
    ProtocolExecutor ex;
    const auto& o = s.options;
    const FockBasis basis(o.n_max);
    if (o.mode == ProtocolMode::ClosedForm) {
        ex.hold_used = s.t2;
        for (int step : {1, 0, 3, 0, 5}) {
            if (step == 0) {
                ex.steps.push_back([s](HybridState& st) {
                    exchange_evolve_in_place(st, 1, 3, s.g, s.t2);
                });
            } else if (step == 3) {
                const Matrix u3 = ideal_carrier_unitary(basis, s.phases.theta3);
                ex.steps.push_back([u3](HybridState& st) {
                    const int sel[2] = {2, 3};
                    apply_factor_unitary(st, sel, u3);
                });
            } else {
                const LaserPulse p = s.pulse(step);
                ex.steps.push_back([p](HybridState& st) {
                    sideband_evolve_in_place(st, 0, 1, p);
                });
            }
        }
        return ex;
    }

    const InternalLevels levels{o.omega_a};
    FullInteractionOptions fopt;
    fopt.tol = o.tol;
    // Laser pulses run while the traps are parked off resonance. All step
    // frames rotate at the renormalized mode frequencies so the maps compose
    // consistently with the exchange steps.
    TrapPair detuned = s.pair;
    detuned.nu1 = s.pair.nu2 + s.sweep.delta_initial;
    const double w1_detuned = renormalized_frequency(detuned, 1);
    const double w2 = renormalized_frequency(s.pair, 2);
    const Matrix u1 =
        full_interaction_unitary(basis, s.pulse(1), levels, w1_detuned, o.order_cutoff, fopt);
    const Matrix u3 =
        full_interaction_unitary(basis, s.pulse(3), levels, w2, o.order_cutoff, fopt);
    const Matrix u5 =
        full_interaction_unitary(basis, s.pulse(5), levels, w1_detuned, o.order_cutoff, fopt);

    const Matrix u_on = sweep_ramp_unitary(s.pair, basis, basis, s.sweep, true, o.tol);
    const SweepSpec off = s.sweep.reversed();
    const Matrix u_off = sweep_ramp_unitary(s.pair, basis, basis, off, true, o.tol);
    const long i01 = 1, i10 = basis.dim();
    const double theta_on = std::asin(std::min(1.0, std::abs(u_on(i01, i10))));
    const double theta_off = std::asin(std::min(1.0, std::abs(u_off(i01, i10))));
    ex.ramp_angle = theta_on + theta_off;
    ex.hold_used = o.compensate_hold
                       ? (0.5 * constants::pi - ex.ramp_angle) / s.g
                       : s.t2;
    CouplingModelOptions copt;
    copt.tol = o.tol;
    const Matrix u_hold = full_coupling_unitary(pair_at_resonance(s.pair), basis, basis,
                                                ex.hold_used, copt);
    const Matrix u_exchange = u_off * u_hold * u_on;

    const auto on_factors = [](std::array<int, 2> sel, Matrix u) {
        return [sel, u = std::move(u)](HybridState& st) {
            apply_factor_unitary(st, sel, u);
        };
    };
    ex.steps.push_back(on_factors({0, 1}, u1));
    ex.steps.push_back(on_factors({1, 3}, u_exchange));
    ex.steps.push_back(on_factors({2, 3}, u3));
    ex.steps.push_back(on_factors({1, 3}, u_exchange));
    ex.steps.push_back(on_factors({0, 1}, u5));
    return ex;
}

} // namespace detail

// Evolves an arbitrary two-ion input (factors qubit1, mode1, qubit2, mode2;
// vibrations must start in |0>|0>).
inline HybridState apply_protocol(const ProtocolSchedule& schedule, const HybridState& in) {
    if (in.factors.size() != 4)
        throw std::invalid_argument("apply_protocol: expected a two-ion state");
    for (int mode : {1, 3})
        if (factor_population(in, mode, 0) < 1.0 - 1e-12)
            throw std::invalid_argument("apply_protocol: vibrations must start in |0>|0>");
    auto ex = detail::make_executor(schedule);
    HybridState out = in;
    for (const auto& step : ex.steps) step(out);
    return out;
}

inline ProtocolReport run_protocol(const ProtocolSchedule& schedule) {
    const FockBasis basis(schedule.options.n_max);
    const auto ex = detail::make_executor(schedule);

    ProtocolReport rep;
    rep.per_step_durations = schedule.step_durations();
    rep.total_duration = schedule.total_duration();
    rep.hold_duration_used = ex.hold_used;
    rep.ramp_exchange_angle = ex.ramp_angle;

    rep.vibration_return_error = 0.0;
    for (int in = 0; in < 4; ++in) {
        const int q1 = in >> 1, q2 = in & 1;
        HybridState st = HybridState::two_ions(basis, basis, q1, 0, q2, 0);
        for (const auto& step : ex.steps) step(st);
        double returned = 0.0;
        for (int out = 0; out < 4; ++out) {
            const int labels[4] = {out >> 1, 0, out & 1, 0};
            const Complex amp = st.amplitudes[state_index(st, labels)];
            rep.truth_table(out, in) = amp;
            returned += std::norm(amp);
        }
        rep.vibration_return_error =
            std::max(rep.vibration_return_error, 1.0 - returned);
    }

    Eigen::Matrix4cd ideal = Eigen::Matrix4cd::Identity();
    ideal(2, 2) = ideal(3, 3) = 0;
    ideal(3, 2) = ideal(2, 3) = 1;
    const Complex tr = (ideal.adjoint() * rep.truth_table).trace();
    rep.fidelity = std::norm(tr) / 16.0;

    if (rep.vibration_return_error > 1e-2) {
        rep.failed = true;
        rep.failure_reason = "vibrational modes do not return to |0>|0> (error " +
                             std::to_string(rep.vibration_return_error) + ")";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// N-trap chain

struct ChainResult {
    HybridState state;
    double phase = 0;    // measured transfer phase of a |1> excitation
    double duration = 0; // s, sum of executed hop durations
    std::vector<double> hop_durations;
};

// Moves the vibrational excitation of ion `from` to ion `to` by sequential
// nearest-neighbor π/2 exchanges, each bracketed by an adiabatic ramp pair
// (charged t₂ + 2τ). The state holds N ions as (qubit, mode) factor pairs;
// every mode except `from` must start in |0>, and the qubit register is
// untouched. Each hop contributes phase i, so the composed transfer phase is
// (|to-from|) π/2 rather than the π per hop sometimes quoted.
inline ChainResult chain_transfer(const std::vector<TrapPair>& links,
                                  const HybridState& state, int from, int to,
                                  double ramp_tau) {
    const int n_ions = int(state.factors.size()) / 2;
    if (int(links.size()) != n_ions - 1)
        throw std::invalid_argument("chain_transfer: need one trap pair per adjacent link");
    if (from == to || from < 0 || to < 0 || from >= n_ions || to >= n_ions)
        throw std::invalid_argument("chain_transfer: bad from/to indices");
    const auto mode_of = [](int ion) { return 2 * ion + 1; };
    for (int ion = 0; ion < n_ions; ++ion) {
        if (ion == from) continue;
        if (factor_population(state, mode_of(ion), 0) < 1.0 - 1e-9)
            throw std::invalid_argument(
                "chain_transfer: mode of ion " + std::to_string(ion) +
                " must start in |0>");
    }

    ChainResult res;
    res.state = state;
    // Modes-only probe mirroring the hops, used to read off the phase.
    HybridState probe;
    {
        std::vector<StateFactor> f;
        std::vector<int> labels;
        for (int ion = 0; ion < n_ions; ++ion) {
            f.push_back(state.factors[mode_of(ion)]);
            labels.push_back(ion == from ? 1 : 0);
        }
        probe = HybridState::basis_state(f, labels);
    }

    const int dir = to > from ? 1 : -1;
    for (int ion = from; ion != to; ion += dir) {
        const int link = std::min(ion, ion + dir);
        const double g = coupling_g(links[link]);
        const double t2 = 0.5 * constants::pi / g;
        exchange_evolve_in_place(res.state, mode_of(ion), mode_of(ion + dir), g, t2);
        exchange_evolve_in_place(probe, ion, ion + dir, g, t2);
        res.hop_durations.push_back(t2 + 2.0 * ramp_tau);
        res.duration += res.hop_durations.back();
    }

    std::vector<int> target(n_ions, 0);
    target[to] = 1;
    res.phase = std::arg(probe.amplitudes[state_index(probe, target)]);
    return res;
}

// Budget for a CNOT between the first and N-th ion of a uniform chain:
// forward transfer, local gate, backward transfer.
inline double chain_cnot_total_duration(int n_ions, double t1, double t2, double t3,
                                        double tau) {
    return 2.0 * (t1 + (n_ions - 1) * t2) + t3 + 4.0 * (n_ions - 1) * tau;
}

} // namespace septrap
