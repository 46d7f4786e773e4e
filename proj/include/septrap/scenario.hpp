#pragma once

// Named scenario execution for the CLI: each scenario produces a plain-text
// report plus, where a time series or table applies, a CSV document. Output
// is fully deterministic: identical configs yield byte-identical strings.

#include <sstream>
#include <string>
#include <vector>

#include "septrap/adiabatic_sweep.hpp"
#include "septrap/config.hpp"
#include "septrap/constants.hpp"
#include "septrap/coulomb_coupling.hpp"
#include "septrap/laser_ion.hpp"
#include "septrap/protocol.hpp"

namespace septrap {

struct ScenarioResult {
    std::string report;
    std::string csv;
    std::string csv_filename;
};

namespace detail {

// 12 significant digits, scientific: the CSV float format.
inline std::string fmt_e12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.11e", v);
    return buf;
}

inline std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class ReportBuilder {
public:
    void line(const std::string& s = "") { out_ << s << "\n"; }
    void value(const std::string& key, double v, const std::string& unit = "") {
        out_ << key << " = " << fmt_g12(v);
        if (!unit.empty()) out_ << " " << unit;
        out_ << "\n";
    }
    void text(const std::string& key, const std::string& v) {
        out_ << key << " = " << v << "\n";
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

class CsvBuilder {
public:
    explicit CsvBuilder(const std::string& header) { out_ << header << "\n"; }
    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ",";
            out_ << fmt_e12(values[i]);
        }
        out_ << "\n";
    }
    void row(int tag, const std::vector<double>& values) {
        out_ << tag;
        for (double v : values) out_ << "," << fmt_e12(v);
        out_ << "\n";
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

inline ScenarioResult run_pulse(const ScenarioConfig& c) {
    const FockBasis basis(c.effective_n_max());
    const int k = c.sideband_k;
    double duration = c.duration;
    double t3 = 0, t3_error = 0;
    bool have_t3 = false;
    if (c.eta > 0) {
        try {
            const auto sol = solve_cnot_duration(c.rabi, c.eta, 1e-2, 1e-3);
            t3 = sol.t3;
            t3_error = sol.achieved_error;
            have_t3 = true;
        } catch (const SimulationError&) {
        }
    }
    if (duration <= 0)
        duration = k >= 1 ? 0.5 * constants::pi / rabi_mk(c.rabi, c.eta, 0, k)
                          : (have_t3 ? t3 : 0.5 * constants::pi / rabi_mk(c.rabi, c.eta, 0, 0));

    // carrier runs demonstrate the vibration-conditioned flip from |1,g>,
    // sidebands the transfer from |0,e>
    const HybridState initial = k >= 1 ? HybridState::single_ion(basis, 1, 0)
                                       : HybridState::single_ion(basis, 0, 1);

    CsvBuilder csv("time_s,p_ground,p_excited,p_m0,p_m1,p_m2,p_m3");
    for (int i = 0; i < c.samples; ++i) {
        const double t = duration * i / (c.samples - 1);
        const LaserPulse pulse{c.rabi, c.eta, k, c.theta1, t};
        const HybridState st = sideband_evolve(initial, pulse);
        csv.row({t, factor_population(st, 0, 0), factor_population(st, 0, 1),
                 factor_population(st, 1, 0), factor_population(st, 1, 1),
                 factor_population(st, 1, 2), factor_population(st, 1, 3)});
    }

    ReportBuilder rep;
    rep.line("scenario: pulse");
    rep.value("rabi_over_2pi_hz", c.rabi_hz);
    rep.value("eta", c.eta);
    rep.value("sideband_k", k);
    rep.value("n_max", basis.n_max);
    rep.value("duration_s", duration);
    rep.value("rabi_mk_0k_rad_per_s", rabi_mk(c.rabi, c.eta, 0, k));
    if (c.eta > 0) {
        rep.value("t1_pi_half_first_sideband_s",
                  0.5 * constants::pi / rabi_mk(c.rabi, c.eta, 0, 1));
    }
    if (have_t3) {
        rep.value("t3_conditional_flip_s", t3);
        rep.value("t3_residual_error", t3_error);
    }
    if (c.mode == "full-numeric") {
        const LaserPulse pulse{c.rabi, c.eta, k, c.theta1, duration};
        const InternalLevels levels{2.0 * constants::pi * 4.5e14};
        FullInteractionOptions opt;
        opt.tol = c.tol;
        const HybridState closed = sideband_evolve(initial, pulse);
        const HybridState full = full_interaction_propagate(initial, pulse, levels, c.nu1,
                                                            c.order_cutoff, opt);
        const double overlap = std::norm(closed.amplitudes.dot(full.amplitudes));
        rep.value("order_cutoff", c.order_cutoff);
        rep.value("rwa_overlap", overlap);
        rep.value("rwa_infidelity", 1.0 - overlap);
    }
    rep.line();
    rep.line("reference values (Omega = 2pi x 500 kHz, eta = 0.33, nu = 2pi x 4.04 MHz):");
    rep.text("reference_t1_s", "3.2e-06");
    rep.text("reference_t3_s", "2.96e-05");
    return {rep.str(), csv.str(), c.output_csv.empty() ? "pulse.csv" : c.output_csv};
}

inline ScenarioResult run_exchange(const ScenarioConfig& c) {
    const TrapPair pair = c.pair();
    const FockBasis basis(c.effective_n_max());
    const double g = coupling_g(pair);
    const double t2 = 0.5 * constants::pi / g;
    const double period = c.duration > 0 ? c.duration : constants::two_pi / g;

    CsvBuilder csv("time_s,p_01,p_10");
    HybridState s01 = HybridState::two_modes(basis, basis, 0, 1);
    const int l01[2] = {0, 1};
    const int l10[2] = {1, 0};
    for (int i = 0; i < c.samples; ++i) {
        const double t = period * i / (c.samples - 1);
        const HybridState st = exchange_evolve(s01, g, t);
        csv.row({t, std::norm(st.amplitudes[state_index(st, l01)]),
                 std::norm(st.amplitudes[state_index(st, l10)])});
    }

    ReportBuilder rep;
    rep.line("scenario: exchange");
    rep.value("nu1_over_2pi_hz", c.nu1_hz);
    rep.value("nu2_over_2pi_hz", c.nu2_hz);
    rep.value("distance_m", c.distance);
    rep.value("g_rad_per_s", g);
    rep.value("g_over_2pi_hz", g / constants::two_pi);
    rep.value("nu_tilde1_over_2pi_hz", frequency_shift(pair, 1) / constants::two_pi);
    rep.value("nu_tilde2_over_2pi_hz", frequency_shift(pair, 2) / constants::two_pi);
    rep.value("t2_pi_half_exchange_s", t2);
    rep.text("harmonic_expansion_valid", pair.harmonic_expansion_valid() ? "true" : "false");
    rep.line();
    rep.line("reference values (9Be+, nu = 2pi x 4.04 MHz):");
    rep.text("reference_g_over_2pi_hz_at_40um", "1.5e3");
    rep.text("reference_g_over_2pi_hz_at_20um", "1.2e4");
    rep.text("reference_nu_tilde_over_2pi_hz_at_40um", "1.5e3");
    return {rep.str(), csv.str(), c.output_csv.empty() ? "exchange.csv" : c.output_csv};
}

inline ScenarioResult run_sweep(const ScenarioConfig& c) {
    const TrapPair pair = c.pair();
    const FockBasis basis(c.effective_n_max());
    const auto on = SweepSpec::ramp(c.delta, c.tau, SweepDirection::RampOn);
    const double g = coupling_g(pair);

    CsvBuilder csv("n,m,gamma_nm");
    for (int n = 0; n <= 6; ++n)
        for (int m = 0; m < n; ++m)
            csv.row({double(n), double(m), gamma_nm(pair, on, n, m, c.nu1)});

    // numeric leakage out of |0>|0> with the coupling off
    HybridState vac = HybridState::two_modes(basis, basis, 0, 0);
    const auto leak = sweep_propagate(vac, pair, on, false, c.tol);

    // ramp on, designed hold, ramp off from |1>|0>: the transferred amplitude
    // carries the ramp-accrued exchange correction sin(pi/2 + 2 g tau)
    HybridState one = HybridState::two_modes(basis, basis, 1, 0);
    const auto up = sweep_propagate(one, pair, on, true, c.tol);
    const HybridState held = exchange_evolve(up.state, g, 0.5 * constants::pi / g);
    const auto down = sweep_propagate(held, pair, on.reversed(), true, c.tol);
    const int l01[2] = {0, 1};
    const double transferred =
        std::abs(down.state.amplitudes[state_index(down.state, l01)]);

    ReportBuilder rep;
    rep.line("scenario: sweep");
    rep.value("delta_rad_per_s", c.delta);
    rep.value("tau_s", c.tau);
    rep.value("beta_rad_per_s2", on.beta);
    rep.value("gamma_2_0", gamma_nm(pair, on, 2, 0, c.nu1));
    rep.value("gamma_3_1", gamma_nm(pair, on, 3, 1, c.nu1));
    rep.text("gamma_2_0_bound", "3.1e-06");
    rep.text("gamma_3_1_bound", "5.3e-06");
    rep.value("ground_state_leakage", leak.leakage);
    rep.value("ramp_exchange_angle_on_rad", up.accrued_exchange_angle);
    rep.value("ramp_exchange_angle_off_rad", down.accrued_exchange_angle);
    rep.value("transferred_amplitude", transferred);
    rep.value("pulse_area_estimate_sin", std::sin(0.5 * constants::pi + 2.0 * g * c.tau));
    rep.line();
    rep.line("reference values (Delta = 1e5 rad/s, tau = 9 us, nu1 = 2pi x 4.04 MHz):");
    rep.text("reference_gamma_2_0", "3.05e-06");
    rep.text("reference_gamma_3_1", "5.28e-06");
    rep.text("reference_pulse_area_sin", "0.9856");
    return {rep.str(), csv.str(), c.output_csv.empty() ? "sweep.csv" : c.output_csv};
}

inline ScenarioResult run_cnot(const ScenarioConfig& c) {
    const TrapPair pair = c.pair();
    ScheduleOptions opt;
    opt.mode = c.mode == "full-numeric" ? ProtocolMode::FullNumeric
                                        : ProtocolMode::ClosedForm;
    opt.n_max = c.effective_n_max();
    opt.compensate_hold = c.compensate_hold;
    opt.order_cutoff = c.order_cutoff;
    opt.tol = c.tol;
    const auto sweep = SweepSpec::ramp(c.delta, c.tau, SweepDirection::RampOn);
    const auto schedule = build_schedule(pair, c.rabi, c.eta, sweep,
                                         ProtocolPhases{c.theta1, c.theta3, c.theta5}, opt);
    const auto rep_data = run_protocol(schedule);

    CsvBuilder csv("step,duration_s,cumulative_s");
    double cum = 0.0;
    for (size_t i = 0; i < rep_data.per_step_durations.size(); ++i) {
        cum += rep_data.per_step_durations[i];
        csv.row(int(i) + 1, {rep_data.per_step_durations[i], cum});
    }

    ReportBuilder rep;
    rep.line("scenario: cnot");
    rep.text("mode", c.mode);
    rep.value("g_rad_per_s", schedule.g);
    rep.value("t1_s", schedule.t1);
    rep.value("t2_s", schedule.t2);
    rep.value("t3_s", schedule.t3);
    rep.value("t3_residual_error", schedule.t3_error);
    rep.value("t5_s", schedule.t5);
    rep.value("ramp_tau_s", c.tau);
    rep.value("total_duration_s", rep_data.total_duration);
    rep.value("fidelity", rep_data.fidelity);
    rep.value("vibration_return_error", rep_data.vibration_return_error);
    rep.text("protocol_failed", rep_data.failed ? "true" : "false");
    if (opt.mode == ProtocolMode::FullNumeric) {
        rep.value("hold_duration_used_s", rep_data.hold_duration_used);
        rep.value("ramp_exchange_angle_rad", rep_data.ramp_exchange_angle);
    }
    rep.line();
    rep.line("truth table (rows |gg>,|ge>,|eg>,|ee>), re/im:");
    for (int r = 0; r < 4; ++r) {
        std::ostringstream row;
        for (int col = 0; col < 4; ++col) {
            const Complex v = rep_data.truth_table(r, col);
            row << (col ? "  " : "") << fmt_g12(v.real()) << " " << fmt_g12(v.imag());
        }
        rep.line(row.str());
    }
    rep.line();
    rep.line("reference values:");
    rep.text("reference_total_at_500khz_40um_s", "4.054e-04");
    rep.text("reference_total_at_1600khz_20um_s", "8.89e-05");
    return {rep.str(), csv.str(), c.output_csv.empty() ? "cnot.csv" : c.output_csv};
}

inline ScenarioResult run_chain(const ScenarioConfig& c) {
    const TrapPair link = c.pair();
    const int n = c.n_ions;
    const int n_max = c.n_max > 0 ? c.n_max : 1;
    double dim = 1.0;
    for (int i = 0; i < n; ++i) dim *= 2.0 * (n_max + 1);
    if (dim > double(1 << 24))
        throw ConfigError("config error: n_max/n_ions too large for the chain scenario");

    const double g = coupling_g(link);
    const double t1 = 0.5 * constants::pi / rabi_mk(c.rabi, c.eta, 0, 1);
    const double t2 = 0.5 * constants::pi / g;
    const auto t3_sol = solve_cnot_duration(c.rabi, c.eta, 1e-2, 1e-3);
    const double total = chain_cnot_total_duration(n, t1, t2, t3_sol.t3, c.tau);

    const FockBasis basis(n_max);
    std::vector<StateFactor> factors;
    std::vector<int> labels(2 * n, 0);
    for (int i = 0; i < n; ++i) {
        factors.push_back({FactorKind::Qubit, 2});
        factors.push_back({FactorKind::Mode, basis.dim()});
    }
    labels[1] = 1; // excitation on the first ion's mode
    const HybridState initial = HybridState::basis_state(factors, labels);
    const std::vector<TrapPair> links(n - 1, link);
    const auto res = chain_transfer(links, initial, 0, n - 1, c.tau);

    std::vector<int> target(2 * n, 0);
    target[2 * (n - 1) + 1] = 1;
    const Complex amp = res.state.amplitudes[state_index(res.state, target)];

    CsvBuilder csv("hop,duration_s,cumulative_s");
    double cum = 0.0;
    for (size_t i = 0; i < res.hop_durations.size(); ++i) {
        cum += res.hop_durations[i];
        csv.row(int(i) + 1, {res.hop_durations[i], cum});
    }

    ReportBuilder rep;
    rep.line("scenario: chain");
    rep.value("n_ions", n);
    rep.value("g_rad_per_s", g);
    rep.value("t1_s", t1);
    rep.value("t2_s", t2);
    rep.value("t3_s", t3_sol.t3);
    rep.value("transfer_duration_s", res.duration);
    rep.value("chain_cnot_total_s", total);
    rep.value("transfer_population", std::norm(amp));
    rep.value("transfer_phase_rad", res.phase);
    rep.value("expected_phase_rad",
              std::remainder((n - 1) * 0.5 * constants::pi, constants::two_pi));
    rep.line();
    rep.line("reference values (Omega = 2pi x 1.6 MHz, d = 20 um, N = 10, tau = 9 us):");
    rep.text("reference_chain_total_s", "7.097e-04");
    return {rep.str(), csv.str(), c.output_csv.empty() ? "chain.csv" : c.output_csv};
}

} // namespace detail

inline ScenarioResult run_scenario(const ScenarioConfig& config) {
    validate_config(config);
    if (config.scenario == "pulse") return detail::run_pulse(config);
    if (config.scenario == "exchange") return detail::run_exchange(config);
    if (config.scenario == "sweep") return detail::run_sweep(config);
    if (config.scenario == "cnot") return detail::run_cnot(config);
    return detail::run_chain(config);
}

} // namespace septrap
