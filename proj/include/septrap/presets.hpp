#pragma once

// Built-in parameter sets reproducing the published reference numbers.
// The same files ship under presets/ in the repository; a test keeps the
// two in sync.

#include <map>
#include <string>

namespace septrap {

inline const std::map<std::string, std::string>& preset_configs() {
    static const std::map<std::string, std::string> presets = {
        {"paper-g-1p5khz",
         R"CFG(
# Exchange coupling of two 9Be+ ions in separate wells 40 um apart.
# Expected: g ~ 2pi x 1.5 kHz, matching the published estimate.
scenario = exchange
species = Be9
nu1_over_2pi_hz = 4.04e6
nu2_over_2pi_hz = 4.04e6
distance_m = 40e-6
n_max = 10
samples = 41
)CFG" + 1},
        {"paper-gamma",
         R"CFG(
# Adiabaticity diagnostics of the reference ramp: Delta = 1e5 rad/s
# (written as Delta/2pi in Hz), tau = 9 us, nu1 = 2pi x 4.04 MHz.
# Expected: gamma_20 ~ 3.05e-6 < 3.1e-6 and gamma_31 ~ 5.28e-6 < 5.3e-6.
scenario = sweep
species = Be9
nu1_over_2pi_hz = 4.04e6
nu2_over_2pi_hz = 4.04e6
distance_m = 40e-6
delta_over_2pi_hz = 15915.494309189535
tau_s = 9e-6
n_max = 8
tol = 1e-10
)CFG" + 1},
        {"paper-t3-29p6us",
         R"CFG(
# Single-pulse vibration-conditioned flip: the carrier duration solving
# cos(Omega_00 t3) = sin(Omega_10 t3) = 1 as closely as possible.
# Expected: t3 ~ 29.6 us at Omega = 2pi x 500 kHz, eta = 0.33.
scenario = pulse
rabi_over_2pi_hz = 500e3
eta = 0.33
nu1_over_2pi_hz = 4.04e6
sideband_k = 0
n_max = 20
mode = closed-form
samples = 200
)CFG" + 1},
        {"paper-cnot-405us",
         R"CFG(
# Five-step separated-trap CNOT at the reference parameters.
# Expected: total duration ~ 405.4 us, unit fidelity in closed form.
scenario = cnot
species = Be9
mode = closed-form
nu1_over_2pi_hz = 4.04e6
nu2_over_2pi_hz = 4.04e6
distance_m = 40e-6
rabi_over_2pi_hz = 500e3
eta = 0.33
delta_over_2pi_hz = 15915.494309189535
tau_s = 9e-6
theta1_rad = 0
theta3_rad = 0
theta5_rad = 4.71238898038469
n_max = 10
)CFG" + 1},
        {"paper-cnot-88p9us",
         R"CFG(
# Five-step CNOT with ten times the laser power (Omega ~ 2pi x 1.6 MHz)
# and half the trap distance (d = 20 um, so g ~ 2pi x 12 kHz).
# Expected: total duration ~ 88.9 us.
scenario = cnot
species = Be9
mode = closed-form
nu1_over_2pi_hz = 4.04e6
nu2_over_2pi_hz = 4.04e6
distance_m = 20e-6
rabi_over_2pi_hz = 1.6e6
eta = 0.33
delta_over_2pi_hz = 15915.494309189535
tau_s = 9e-6
theta1_rad = 0
theta3_rad = 0
theta5_rad = 4.71238898038469
n_max = 10
)CFG" + 1},
        {"paper-chain-709p7us",
         R"CFG(
# Ten-trap chain: move the vibrational excitation from the first to the
# last ion by sequential nearest-neighbor exchanges.
# Expected: CNOT budget between first and last ion ~ 709.7 us; transfer
# phase (N-1) pi/2 from the composed exchanges.
scenario = chain
species = Be9
nu1_over_2pi_hz = 4.04e6
nu2_over_2pi_hz = 4.04e6
distance_m = 20e-6
rabi_over_2pi_hz = 1.6e6
eta = 0.33
delta_over_2pi_hz = 15915.494309189535
tau_s = 9e-6
n_ions = 10
n_max = 1
)CFG" + 1},
        {"paper-rwa-check",
         R"CFG(
# First red-sideband pi/2 pulse integrated without the rotating-wave
# approximation and compared against the closed form. The measured
# infidelity at Omega/nu = 0.124 is ~3.3e-2, dominated by the light
# shift of the off-resonant carrier.
scenario = pulse
mode = full-numeric
rabi_over_2pi_hz = 500e3
eta = 0.33
nu1_over_2pi_hz = 4.04e6
sideband_k = 1
n_max = 12
order_cutoff = 8
tol = 1e-8
samples = 100
)CFG" + 1},
    };
    return presets;
}

} // namespace septrap
