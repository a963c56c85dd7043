#pragma once

#include <limits>
#include <string>

#include "becsim/dynamics.hpp"
#include "becsim/spectrum.hpp"

namespace becsim {

// Populations at the measurement time t = tau + dt_pulse for a sweep of the
// pulse delay at fixed detuning.
struct FringeSeries {
    double delta = 0.0;
    std::vector<double> tau_values;
    std::vector<double> s0;
    std::vector<double> s2;
    std::vector<double> s_minus2;
};

enum class FringeChannel { s0, s2, s_minus2 };

// Single-cosine model y(tau) = offset + amplitude*cos(omega*tau + phase).
struct FringeFit {
    double omega_rec = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double residual_rms = 0.0;
    double omega_ratio = 0.0; // omega_rec / omega2
};

// Nonlinear least squares with the frequency initialized from the dominant
// peak of a detrended discrete Fourier transform of the series. Convergence
// at relative parameter change < 1e-10 or 200 iterations. Requires >= 12
// samples spanning >= 1.5 oscillation periods of the initial frequency.
FringeFit fit_fringe(const FringeSeries& series, FringeChannel channel, double omega2);

struct SweepOptions {
    int workers = 0;              // 0: BECSIM_WORKERS or hardware count
    bool independent_runs = false; // one full run_ramsey per tau instead of the shared prefix
    int tail_sample_every = 1 << 30; // population cadence inside tails (endpoint always sampled)
};

// One Ramsey measurement per tau, ascending order. By default pulse 1 and the
// free evolution are integrated once and checkpointed at each tau, and only
// pulse 2 is re-run per point; when every tau lies on the step grid this
// reproduces the independent per-tau runs bit-exactly, and the equivalence is
// covered by tests. Any divergence aborts the sweep naming the offending tau.
FringeSeries sweep_delay(const DimensionlessParams& params, double delta,
                         std::vector<double> tau_values, double dt_pulse,
                         const SweepOptions& options = {});

// Uniform tau grid snapped onto the step grid so shared-prefix sweeps land on
// every tau without shortened steps.
std::vector<double> default_tau_grid(double tau_min, double tau_max, int count, double align_dt);

// One row of the detuning dispersion table: fringe-fitted recoil frequency
// and the quantum-mean recoil shift of the |2> cloud after pulse 1,
// side by side. Failed points become gaps (ok = false), not aborts.
struct DispersionRow {
    double delta = 0.0;
    double omega_ratio = std::numeric_limits<double>::quiet_NaN();
    double fit_rms = std::numeric_limits<double>::quiet_NaN();
    double kappa2_over_k0 = std::numeric_limits<double>::quiet_NaN();
    double std2_over_k0 = std::numeric_limits<double>::quiet_NaN();
    double delta_omega_ratio_mean = std::numeric_limits<double>::quiet_NaN();
    double delta_omega_ratio_fringe = std::numeric_limits<double>::quiet_NaN();
    double kappa_plus2 = std::numeric_limits<double>::quiet_NaN();  // raw, 1/L units
    double kappa_minus2 = std::numeric_limits<double>::quiet_NaN(); // raw, 1/L units
    FringeSeries fringe; // populated when the sweep ran fringe fits
    bool ok = false;
    std::string note;
};

struct DetuningSweepOptions {
    std::vector<double> tau_values; // used only when include_fringe
    double dt_pulse = 3000.0;
    bool include_fringe = true;
    int workers = 0;
    KGrid k_grid{};
};

std::vector<DispersionRow> sweep_detuning(const DimensionlessParams& base,
                                          const std::vector<double>& deltas,
                                          const DetuningSweepOptions& options);

} // namespace becsim
