#include "becsim/fringe.hpp"

#include <algorithm>
#include <cmath>

#include "becsim/parallel.hpp"

namespace becsim {

namespace {

const std::vector<double>& channel_data(const FringeSeries& s, FringeChannel c) {
    switch (c) {
        case FringeChannel::s0: return s.s0;
        case FringeChannel::s2: return s.s2;
        default: return s.s_minus2;
    }
}

// Solve the symmetric positive system A x = b in place, n <= 4.
bool solve_small(double A[4][4], double b[4], int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        if (std::fabs(A[piv][col]) < 1e-300) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A[piv][c], A[col][c]);
            std::swap(b[piv], b[col]);
        }
        const double inv = 1.0 / A[col][col];
        for (int r = col + 1; r < n; ++r) {
            const double f = A[r][col] * inv;
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * b[c];
        b[r] = s / A[r][r];
    }
    return true;
}

// Best (offset, cos, sin) coefficients at fixed omega; returns the RSS.
double linear_fit_at(const std::vector<double>& tau, const std::vector<double>& y,
                     double omega, double coeff[3]) {
    const int n = (int)tau.size();
    double A[4][4] = {};
    double b[4] = {};
    for (int i = 0; i < n; ++i) {
        const double c = std::cos(omega * tau[i]);
        const double s = std::sin(omega * tau[i]);
        const double basis[3] = {1.0, c, s};
        for (int r = 0; r < 3; ++r) {
            for (int cidx = 0; cidx < 3; ++cidx) A[r][cidx] += basis[r] * basis[cidx];
            b[r] += basis[r] * y[i];
        }
    }
    if (!solve_small(A, b, 3)) return std::numeric_limits<double>::infinity();
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = b[0] + b[1] * std::cos(omega * tau[i]) + b[2] * std::sin(omega * tau[i]);
        rss += (y[i] - f) * (y[i] - f);
    }
    coeff[0] = b[0];
    coeff[1] = b[1];
    coeff[2] = b[2];
    return rss;
}

} // namespace

FringeFit fit_fringe(const FringeSeries& series, FringeChannel channel, double omega2) {
    const std::vector<double>& tau = series.tau_values;
    const std::vector<double>& y = channel_data(series, channel);
    const int n = (int)tau.size();
    if (n < 12) throw FitError("fringe fit needs at least 12 samples", 0.0);
    if (y.size() != tau.size()) throw StructuralError("fringe series channel length mismatch");
    for (int i = 1; i < n; ++i)
        if (!(tau[i] > tau[i - 1])) throw StructuralError("tau values must be strictly increasing");
    if (!(omega2 > 0.0)) throw ConfigError("omega_coeff", "omega2 must be positive");

    const double span = tau.back() - tau.front();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;

    // DFT of the detrended series on the grid omega_q = 2*pi*q/span
    const int qmax = std::max(2, n / 2);
    double best_power = -1.0;
    double omega_init = 0.0;
    for (int q = 1; q <= qmax; ++q) {
        const double w = 2.0 * std::numbers::pi * q / span;
        double re = 0.0, im = 0.0;
        for (int i = 0; i < n; ++i) {
            re += (y[i] - mean) * std::cos(w * tau[i]);
            im -= (y[i] - mean) * std::sin(w * tau[i]);
        }
        const double p = re * re + im * im;
        if (p > best_power) {
            best_power = p;
            omega_init = w;
        }
    }

    const double periods = span * omega_init / (2.0 * std::numbers::pi);
    if (periods < 1.5)
        throw FitError("series spans fewer than 1.5 oscillation periods", omega_init);

    double y_scale = 0.0;
    for (double v : y) y_scale = std::max(y_scale, std::fabs(v - mean));
    const double noise_floor = 1e-12 + 1e-9 * std::max(1.0, std::fabs(mean));
    if (y_scale < noise_floor)
        throw FitError("fringe amplitude below noise floor", omega_init);

    // fine scan one DFT bin around the peak, linear subproblem per frequency
    const double bin = 2.0 * std::numbers::pi / span;
    double omega = omega_init;
    {
        double coeff[3];
        double best_rss = std::numeric_limits<double>::infinity();
        const int n_scan = 241;
        for (int s = 0; s < n_scan; ++s) {
            const double w = omega_init + bin * (-1.2 + 2.4 * s / (n_scan - 1));
            if (!(w > 0.0)) continue;
            const double rss = linear_fit_at(tau, y, w, coeff);
            if (rss < best_rss) {
                best_rss = rss;
                omega = w;
            }
        }
    }

    // Gauss-Newton with Levenberg damping on (offset, c_cos, c_sin, omega)
    double p[4];
    {
        double coeff[3];
        linear_fit_at(tau, y, omega, coeff);
        p[0] = coeff[0];
        p[1] = coeff[1];
        p[2] = coeff[2];
        p[3] = omega;
    }
    double lambda = 1e-3;
    bool converged = false;
    for (int iter = 0; iter < 200 && !converged; ++iter) {
        double JtJ[4][4] = {};
        double Jtr[4] = {};
        double rss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double c = std::cos(p[3] * tau[i]);
            const double s = std::sin(p[3] * tau[i]);
            const double f = p[0] + p[1] * c + p[2] * s;
            const double r = y[i] - f;
            const double J[4] = {1.0, c, s, tau[i] * (-p[1] * s + p[2] * c)};
            for (int a = 0; a < 4; ++a) {
                for (int bb = 0; bb < 4; ++bb) JtJ[a][bb] += J[a] * J[bb];
                Jtr[a] += J[a] * r;
            }
            rss += r * r;
        }
        double A[4][4];
        double d[4];
        for (int a = 0; a < 4; ++a) {
            for (int bb = 0; bb < 4; ++bb) A[a][bb] = JtJ[a][bb];
            A[a][a] *= (1.0 + lambda);
            d[a] = Jtr[a];
        }
        if (!solve_small(A, d, 4))
            throw FitError("fringe fit normal equations are singular", omega_init);

        double trial[4];
        for (int a = 0; a < 4; ++a) trial[a] = p[a] + d[a];
        if (!(trial[3] > 0.0)) trial[3] = p[3] * 0.5;
        double trial_rss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double f = trial[0] + trial[1] * std::cos(trial[3] * tau[i]) +
                             trial[2] * std::sin(trial[3] * tau[i]);
            trial_rss += (y[i] - f) * (y[i] - f);
        }
        if (trial_rss <= rss) {
            double rel = 0.0;
            for (int a = 0; a < 4; ++a)
                rel = std::max(rel, std::fabs(trial[a] - p[a]) / std::max(1e-30, std::fabs(trial[a]) + 1e-12));
            for (int a = 0; a < 4; ++a) p[a] = trial[a];
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-10) converged = true;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12)
                throw FitError("fringe fit did not converge (damping exhausted)", omega_init);
        }
    }
    if (!converged) throw FitError("fringe fit did not converge in 200 iterations", omega_init);

    FringeFit fit;
    fit.offset = p[0];
    fit.amplitude = std::hypot(p[1], p[2]);
    fit.phase = std::atan2(-p[2], p[1]);
    fit.omega_rec = p[3];
    if (fit.amplitude < noise_floor)
        throw FitError("fitted amplitude below noise floor", omega_init);
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = p[0] + p[1] * std::cos(p[3] * tau[i]) + p[2] * std::sin(p[3] * tau[i]);
        rss += (y[i] - f) * (y[i] - f);
    }
    fit.residual_rms = std::sqrt(rss / n);
    fit.omega_ratio = fit.omega_rec / omega2;
    return fit;
}

std::vector<double> default_tau_grid(double tau_min, double tau_max, int count, double align_dt) {
    if (count < 1) throw ConfigError("tau_count", "must be >= 1");
    if (!(tau_max >= tau_min)) throw ConfigError("tau_max", "must be >= tau_min");
    std::vector<double> taus(count);
    for (int i = 0; i < count; ++i) {
        double t = count == 1 ? tau_min : tau_min + (tau_max - tau_min) * i / (count - 1);
        if (align_dt > 0.0) t = std::llround(t / align_dt) * align_dt;
        taus[i] = t;
    }
    return taus;
}

FringeSeries sweep_delay(const DimensionlessParams& params, double delta,
                         std::vector<double> tau_values, double dt_pulse,
                         const SweepOptions& options) {
    DimensionlessParams p = params;
    p.delta = delta;
    p.validate();
    if (tau_values.empty()) throw ConfigError("tau_values", "must not be empty");
    std::sort(tau_values.begin(), tau_values.end());
    for (double t : tau_values)
        if (!(t >= dt_pulse)) throw ConfigError("tau_values", "every tau must be >= dt_pulse");

    const int n = (int)tau_values.size();
    const int gi0 = p.modes.ground_index(0);
    const int gi2 = p.modes.ground_index(2);
    const int gim2 = p.modes.ground_index(-2);

    FringeSeries out;
    out.delta = delta;
    out.tau_values = tau_values;
    out.s0.resize(n);
    out.s2.resize(n);
    out.s_minus2.resize(n);

    auto record = [&](int idx, const FieldState& final_state) {
        PopulationRecord rec = populations(final_state);
        out.s0[idx] = rec.s_ground[gi0];
        out.s2[idx] = rec.s_ground[gi2];
        out.s_minus2[idx] = rec.s_ground[gim2];
    };

    auto annotate = [&](int idx, const DivergenceError& e) -> DivergenceError {
        return DivergenceError(e.t, e.dt, "in the sweep point tau=" + std::to_string(tau_values[idx]));
    };

    if (options.independent_runs) {
        parallel_for(n, options.workers, [&](int i) {
            PulseSchedule sched{dt_pulse, tau_values[i]};
            try {
                Trajectory traj = run_ramsey(p, sched, RunOptions{options.tail_sample_every});
                record(i, traj.final_state());
            } catch (const DivergenceError& e) {
                throw annotate(i, e);
            }
        });
        return out;
    }

    // Shared prefix: pulse 1 and the free evolution are integrated once;
    // each tau forks a pulse-2 tail from its checkpoint.
    std::vector<FieldState> checkpoints;
    checkpoints.reserve(n);
    {
        Integrator integ(p);
        FieldState state = FieldState::initial(p.modes, p.grid);
        try {
            integ.advance_phase(state, dt_pulse, p.e0);
            for (int i = 0; i < n; ++i) {
                integ.advance_phase(state, tau_values[i], 0.0);
                checkpoints.push_back(state);
            }
        } catch (const DivergenceError& e) {
            throw DivergenceError(e.t, e.dt, "in the sweep prefix (pulse 1 / free evolution)");
        }
    }
    parallel_for(n, options.workers, [&](int i) {
        Integrator integ(p);
        FieldState state = std::move(checkpoints[i]);
        try {
            integ.advance_phase(state, tau_values[i] + dt_pulse, p.e0);
        } catch (const DivergenceError& e) {
            throw annotate(i, e);
        }
        record(i, state);
    });
    return out;
}

std::vector<DispersionRow> sweep_detuning(const DimensionlessParams& base,
                                          const std::vector<double>& deltas,
                                          const DetuningSweepOptions& options) {
    if (deltas.empty()) throw ConfigError("deltas", "must not be empty");
    if (options.include_fringe && options.tau_values.empty())
        throw ConfigError("tau_values", "fringe fits need a tau grid");

    std::vector<DispersionRow> rows(deltas.size());
    parallel_for((int)deltas.size(), options.workers, [&](int i) {
        DispersionRow& row = rows[i];
        row.delta = deltas[i];
        try {
            DimensionlessParams p = base;
            p.delta = deltas[i];
            p.validate();

            // quantum-mean recoil immediately after pulse 1
            Integrator integ(p);
            FieldState state = FieldState::initial(p.modes, p.grid);
            integ.advance_phase(state, options.dt_pulse, p.e0);
            MomentumSpectrum spec_p2 = envelope_spectrum(state, 2, options.k_grid);
            MomentumSpectrum spec_m2 = envelope_spectrum(state, -2, options.k_grid);
            RecoilReport rep = recoil_report(spec_p2, p.k0L);
            row.kappa_plus2 = spec_p2.kappa;
            row.kappa_minus2 = spec_m2.kappa;
            row.kappa2_over_k0 = spec_p2.kappa / p.k0L;
            row.std2_over_k0 = std::sqrt(std::max(0.0, spec_p2.variance)) / p.k0L;
            row.delta_omega_ratio_mean = rep.delta_omega_ratio;

            if (options.include_fringe) {
                SweepOptions sweep_opts;
                sweep_opts.workers = 1; // parallelism lives on the detuning axis
                row.fringe = sweep_delay(p, deltas[i], options.tau_values, options.dt_pulse, sweep_opts);
                FringeFit fit = fit_fringe(row.fringe, FringeChannel::s0, p.omega2());
                row.omega_ratio = fit.omega_ratio;
                row.fit_rms = fit.residual_rms;
                row.delta_omega_ratio_fringe = fit.omega_ratio - 1.0;
            }
            row.ok = true;
        } catch (const Error& e) {
            row.ok = false;
            row.note = e.what();
        }
    });
    return rows;
}

} // namespace becsim
