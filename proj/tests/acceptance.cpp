// Acceptance suite: end-to-end checks of the simulator against its
// documented target numbers, one pass/fail line per criterion. Heavy pieces
// (fringe sweeps, the dispersion scan, convergence reruns) are computed up
// front on a small worker pool; every tolerance is pinned here in code.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <random>
#include <vector>

#include "becsim/fringe.hpp"
#include "becsim/parallel.hpp"
#include "becsim/runner.hpp"

using namespace becsim;

namespace {

int g_failures = 0;

void line(bool ok, const char* name, const std::string& detail) {
    std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

struct SweepResult {
    double delta = 0.0;
    bool dropped = false;
    FringeFit fit_s0;
    FringeSeries series;
};

// ---- independent straight-line derivative oracle (also used by the unit
// suite; re-coded here against physical indices and library complex math)
double rhs_oracle_worst(unsigned seed) {
    DimensionlessParams p = reference_params();
    p.modes.max_order = 6;
    p.grid.nx = 64;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    p.delta = amp(rng);
    p.drop_spatial_derivatives = (seed % 4 == 0);

    FieldState s = FieldState::zero(p.modes, p.grid);
    auto fill = [&](Cvec& v) {
        double cr[3], ci[3];
        for (int q = 0; q < 3; ++q) {
            cr[q] = amp(rng);
            ci[q] = amp(rng);
        }
        for (int i = 0; i < p.grid.nx; ++i) {
            const double x = i * p.grid.h();
            cplx z = 0.0;
            for (int q = 0; q < 3; ++q)
                z += cplx(cr[q], ci[q]) * std::exp(cplx(0.0, 2.0 * std::numbers::pi * q * x));
            v[i] = z;
        }
    };
    for (auto& v : s.a) fill(v);
    for (auto& v : s.b) fill(v);

    FieldPair f = compute_fields(s, 4e-3);
    FieldState d = rhs(s, f, p);

    const int nx = p.grid.nx;
    const double h = p.grid.h();
    const cplx I(0.0, 1.0);
    std::map<int, Cvec> ga, gb;
    for (int j : s.modes.ground_modes()) ga[j] = s.a[s.modes.ground_index(j)];
    for (int m : s.modes.excited_modes()) gb[m] = s.b[s.modes.excited_index(m)];
    auto value = [&](const std::map<int, Cvec>& table, int idx, int i) -> cplx {
        auto it = table.find(idx);
        return it == table.end() ? cplx(0.0) : it->second[i];
    };
    auto dx = [&](const Cvec& v, int i) -> cplx {
        if (p.drop_spatial_derivatives) return 0.0;
        if (i == 0) return v[1] / h;
        if (i == nx - 1) return -v[nx - 2] / h;
        return (v[i + 1] - v[i - 1]) / (2.0 * h);
    };

    double worst = 0.0;
    for (int j : s.modes.ground_modes()) {
        const Cvec& got = d.ground(j);
        for (int i = 0; i < nx; ++i) {
            const cplx expect = -p.v_coeff * j * dx(ga[j], i) -
                                I * (p.omega_coeff * j * j) * ga[j][i] +
                                std::conj(f.e_plus[i]) * value(gb, j + 1, i) +
                                std::conj(f.e_minus[i]) * value(gb, j - 1, i);
            worst = std::max(worst, std::abs(got[i] - expect));
        }
    }
    for (int m : s.modes.excited_modes()) {
        const Cvec& got = d.excited(m);
        for (int i = 0; i < nx; ++i) {
            const cplx expect = -p.v_coeff * m * dx(gb[m], i) +
                                I * (p.delta - p.omega_coeff * m * m + I * p.gamma / 2.0) * gb[m][i] -
                                f.e_plus[i] * value(ga, m - 1, i) - f.e_minus[i] * value(ga, m + 1, i);
            worst = std::max(worst, std::abs(got[i] - expect));
        }
    }
    return worst;
}

} // namespace

int main() {
    const DimensionlessParams base = reference_params();
    const double pulse = 3000.0;
    const std::vector<double> taus = default_tau_grid(3000.0, 90000.0, 50, 0.1);

    std::printf("acceptance suite: reference-parameter Ramsey interference checks\n");
    std::printf("  (four full fringe sweeps plus a detuning scan; takes a while)\n\n");
    std::fflush(stdout);

    // ---- heavy phase A: four fringe sweeps (delta = +-0.5, with and
    // without the transport terms), two at a time
    std::vector<SweepResult> sweeps(4);
    {
        const double deltas[4] = {-0.5, 0.5, -0.5, 0.5};
        const bool dropped[4] = {false, false, true, true};
        parallel_for(4, 2, [&](int i) {
            DimensionlessParams p = base;
            p.drop_spatial_derivatives = dropped[i];
            SweepOptions opts;
            opts.workers = 1;
            SweepResult r;
            r.delta = deltas[i];
            r.dropped = dropped[i];
            r.series = sweep_delay(p, deltas[i], taus, pulse, opts);
            r.fit_s0 = fit_fringe(r.series, FringeChannel::s0, p.omega2());
            sweeps[i] = r;
            std::printf("  sweep done: delta=%+.2f%s omega_ratio=%.4f\n", r.delta,
                        r.dropped ? " (no transport)" : "", r.fit_s0.omega_ratio);
            std::fflush(stdout);
        });
    }

    // ---- heavy phase B: dispersion scan (quantum-mean recoil after pulse 1)
    std::vector<double> disp_deltas;
    for (int d = -12; d <= 12; ++d)
        if (d != 0) disp_deltas.push_back(d);
    disp_deltas.push_back(-0.05);
    disp_deltas.push_back(0.05);
    disp_deltas.push_back(-0.5);
    disp_deltas.push_back(0.5);
    std::sort(disp_deltas.begin(), disp_deltas.end());
    std::vector<DispersionRow> disp;
    {
        DetuningSweepOptions opts;
        opts.include_fringe = false;
        opts.dt_pulse = pulse;
        opts.workers = 2;
        disp = sweep_detuning(base, disp_deltas, opts);
    }

    // ---- heavy phase C: convergence reruns for the regression criterion
    double s0_golden = 0.0, s0_m14 = 0.0, s0_dt_half = 0.0, s0_nx512 = 0.0;
    {
        const PulseSchedule sched{pulse, 6000.0};
        parallel_for(4, 2, [&](int i) {
            DimensionlessParams p = base;
            double* slot = nullptr;
            switch (i) {
                case 0: slot = &s0_golden; break;
                case 1:
                    p.modes.max_order = 14;
                    slot = &s0_m14;
                    break;
                case 2:
                    p.dt = 0.05;
                    slot = &s0_dt_half;
                    break;
                default:
                    p.grid.nx = 512;
                    slot = &s0_nx512;
                    break;
            }
            Trajectory traj = run_ramsey(p, sched, RunOptions{1000});
            *slot = traj.populations.back().s(p.modes, 0);
        });
    }

    // ---- criterion 1: pulse depletion
    {
        DimensionlessParams p = base; // delta = 0.5
        Integrator integ(p);
        FieldState s = FieldState::initial(p.modes, p.grid);
        integ.advance_phase(s, pulse, p.e0);
        const double s0 = populations(s).s(p.modes, 0);
        line(s0 >= 0.85 && s0 <= 0.95, "1. pulse depletion",
             fmt("S0(t=%g) = %.4f, required in [0.85, 0.95]", pulse, s0));
    }

    // ---- criterion 2: fringe frequencies at delta = -+0.5, plus the
    // regression properties of the fitted table: the two ratios sum to 2
    // within 0.02 and the fit residual stays below 5% of the amplitude
    {
        const double r_minus = sweeps[0].fit_s0.omega_ratio;
        const double r_plus = sweeps[1].fit_s0.omega_ratio;
        bool ok = std::fabs(r_minus - 1.06) <= 0.03 && std::fabs(r_plus - 0.94) <= 0.03;
        ok = ok && std::fabs(r_minus + r_plus - 2.0) <= 0.02;
        for (int i = 0; i < 2; ++i)
            ok = ok && sweeps[i].fit_s0.residual_rms <= 0.05 * sweeps[i].fit_s0.amplitude;
        line(ok, "2. fringe frequencies",
             fmt("omega_rec/omega2 = %.4f (delta=-0.5, target 1.06+-0.03), %.4f (delta=+0.5, "
                 "target 0.94+-0.03); sum %.4f (2+-0.02); rms/amp %.3f, %.3f (<= 0.05)",
                 r_minus, r_plus, r_minus + r_plus,
                 sweeps[0].fit_s0.residual_rms / sweeps[0].fit_s0.amplitude,
                 sweeps[1].fit_s0.residual_rms / sweeps[1].fit_s0.amplitude));
    }

    // ---- criterion 3: transport-term ablation pins the ratio to 1
    {
        const double r_minus = sweeps[2].fit_s0.omega_ratio;
        const double r_plus = sweeps[3].fit_s0.omega_ratio;
        const bool ok = std::fabs(r_minus - 1.0) <= 0.01 && std::fabs(r_plus - 1.0) <= 0.01;
        line(ok, "3. ablation (no spatial derivatives)",
             fmt("omega_rec/omega2 = %.4f and %.4f, required 1.00+-0.01", r_minus, r_plus));
    }

    // ---- criterion 4: quantum mean vs fringe-extracted recoil shift
    {
        auto mean_shift = [&](double delta) {
            DimensionlessParams p = base;
            p.delta = delta;
            Integrator integ(p);
            FieldState s = FieldState::initial(p.modes, p.grid);
            integ.advance_phase(s, pulse, p.e0);
            return recoil_report(envelope_spectrum(s, 2), p.k0L).delta_omega_ratio;
        };
        const double mean_m = mean_shift(-0.5); // target +0.062
        const double mean_p = mean_shift(+0.5); // target -0.057
        const double fringe_m = sweeps[0].fit_s0.omega_ratio - 1.0; // target +0.059
        const double fringe_p = sweeps[1].fit_s0.omega_ratio - 1.0; // target -0.058
        bool ok = std::fabs(mean_m - 0.062) <= 0.010 && std::fabs(mean_p - (-0.057)) <= 0.010;
        ok = ok && std::fabs(fringe_m - 0.059) <= 0.010 && std::fabs(fringe_p - (-0.058)) <= 0.010;
        ok = ok && std::fabs(fringe_m - mean_m) <= 0.010 && std::fabs(fringe_p - mean_p) <= 0.010;
        line(ok, "4. quantum-mean vs fringe shifts",
             fmt("mean %.4f/%.4f (targets +0.062/-0.057), fringe %.4f/%.4f (targets +0.059/-0.058)",
                 mean_m, mean_p, fringe_m, fringe_p));
    }

    // ---- criterion 5: dispersive detuning curve and cloud parity
    {
        bool parity_ok = true;
        double worst_parity = 0.0;
        for (const auto& row : disp) {
            if (!row.ok) parity_ok = false;
            const double asym = std::fabs(row.kappa_plus2 + row.kappa_minus2);
            worst_parity = std::max(worst_parity, asym);
            if (asym > 1e-8) parity_ok = false;
        }

        // sign change exactly once: positive shift for all delta < 0,
        // negative for all delta > 0 (the curve crosses at the origin)
        bool signs_ok = true;
        double max_neg_side = 0.0, min_pos_side = 0.0;
        for (const auto& row : disp) {
            if (!row.ok) continue;
            const double dk2 = row.kappa2_over_k0;
            if (row.delta < 0 && !(dk2 > 0.0)) signs_ok = false;
            if (row.delta > 0 && !(dk2 < 0.0)) signs_ok = false;
            if (row.delta < 0) max_neg_side = std::max(max_neg_side, dk2);
            if (row.delta > 0) min_pos_side = std::min(min_pos_side, dk2);
        }
        const bool extrema_ok = max_neg_side > 0.0 && min_pos_side < 0.0;

        // dispersive tails: the far wings are weaker than the near-resonance
        // extrema on both sides
        auto dk_at = [&](double delta) {
            for (const auto& row : disp)
                if (row.delta == delta) return row.kappa2_over_k0;
            return std::numeric_limits<double>::quiet_NaN();
        };
        const bool tails_ok = std::fabs(dk_at(-12)) < std::fabs(max_neg_side) &&
                              std::fabs(dk_at(12)) < std::fabs(min_pos_side);

        line(signs_ok && extrema_ok && tails_ok && parity_ok, "5. dispersive curve",
             fmt("one sign change through 0, extrema %+0.4f/%+0.4f, wings %+0.4f/%+0.4f, "
                 "worst |kappa_2 + kappa_-2| = %.2e (<= 1e-8)",
                 max_neg_side, min_pos_side, dk_at(-12), dk_at(12), worst_parity));
    }

    // ---- criterion 6: conservation and dissipation bookkeeping
    {
        DimensionlessParams p = base;
        p.gamma = 0.0;
        Trajectory traj = run_ramsey(p, PulseSchedule{pulse, 6000.0}, RunOptions{100});
        double worst = 0.0;
        for (const auto& rec : traj.populations)
            worst = std::max(worst, std::fabs(rec.total_norm - 1.0));

        DimensionlessParams pd = base;
        pd.dt = 0.01;
        Integrator fine(pd);
        FieldState st = FieldState::initial(pd.modes, pd.grid);
        std::vector<PopulationRecord> series;
        series.push_back(populations(st));
        fine.advance_phase(st, 150.0, pd.e0, [&](long) { series.push_back(populations(st)); });
        double worst_rel = 0.0;
        for (size_t i = 2; i + 2 < series.size(); ++i) {
            const double p_exc = series[i].excited_total();
            if (p_exc <= 1e-6) continue;
            const double dN = (series[i + 1].total_norm - series[i - 1].total_norm) / (2.0 * pd.dt);
            worst_rel = std::max(worst_rel, std::fabs(dN + pd.gamma * p_exc) / (pd.gamma * p_exc));
        }
        line(worst <= 1e-6 && worst_rel <= 0.01, "6. conservation",
             fmt("gamma=0 full run |N-1| = %.2e (<= 1e-6); gamma=%.2g balance error %.3f%% (<= 1%%)",
                 worst, base.gamma, 100.0 * worst_rel));
    }

    // ---- criterion 7: oracle equivalence
    {
        DimensionlessParams p = reference_params();
        p.modes.max_order = 0;
        p.delta = 0.0;
        p.gamma = 0.0;
        p.v_coeff = 0.0;
        p.omega_coeff = 0.0;
        p.dt = 0.01;
        Integrator integ(p);
        FieldState s = FieldState::initial(p.modes, p.grid);
        const double T = 500.0;
        const long n = std::lround(T / p.dt);
        for (long i = 0; i < n; ++i) integ.step_constant_field(s, p.dt, p.e0);
        const double expect = std::cos(std::sqrt(2.0) * p.e0 * T);
        double rabi_err = 0.0;
        for (const cplx& z : s.ground(0)) rabi_err = std::max(rabi_err, std::abs(z - cplx(expect, 0.0)));

        double oracle_worst = 0.0;
        for (unsigned seed = 0; seed < 100; ++seed)
            oracle_worst = std::max(oracle_worst, rhs_oracle_worst(seed));

        line(rabi_err <= 1e-8 && oracle_worst <= 1e-12, "7. oracle equivalence",
             fmt("three-mode closed form max err = %.2e (<= 1e-8); "
                 "derivative vs straight-line oracle on 100 states = %.2e (<= 1e-12)",
                 rabi_err, oracle_worst));
    }

    // ---- criterion 8: spectral integrity
    {
        DimensionlessParams p = base;
        Integrator integ(p);
        FieldState s = FieldState::initial(p.modes, p.grid);
        integ.advance_phase(s, pulse, p.e0);

        MomentumSpectrum spec = envelope_spectrum(s, 2);
        const double dk = (spec.k.back() - spec.k.front()) / (spec.k.size() - 1);
        double total = 0.5 * (spec.w.front() + spec.w.back());
        for (size_t i = 1; i + 1 < spec.w.size(); ++i) total += spec.w[i];
        total *= dk;
        const double norm_err = std::fabs(total - 1.0);

        auto parseval_error = [&](double window_scale) {
            KGrid g;
            g.k_max = 64.0 * std::numbers::pi * window_scale;
            g.n = (int)std::lround(4096 * window_scale);
            const Cvec& amp = s.ground(2);
            const double sx = norm_integral(amp, p.grid);
            const double h = p.grid.h();
            std::vector<double> k = g.points();
            double tot = 0.0;
            std::vector<double> f2(k.size());
            for (size_t iq = 0; iq < k.size(); ++iq) {
                const cplx rot = std::polar(1.0, -k[iq] * h);
                cplx ph(1.0, 0.0);
                cplx acc = 0.5 * amp[0];
                for (int i = 1; i < p.grid.nx - 1; ++i) {
                    ph *= rot;
                    acc += ph * amp[i];
                }
                ph *= rot;
                acc += 0.5 * ph * amp[p.grid.nx - 1];
                f2[iq] = std::norm(acc * h);
            }
            const double dkf = (k.back() - k.front()) / (k.size() - 1);
            tot = 0.5 * (f2.front() + f2.back());
            for (size_t i = 1; i + 1 < f2.size(); ++i) tot += f2[i];
            tot *= dkf;
            return std::fabs(tot / (2.0 * std::numbers::pi) - sx) / sx;
        };
        const double pe1 = parseval_error(1.0);
        const double pe2 = parseval_error(2.0);
        const double pe4 = parseval_error(4.0);

        FieldState sq = FieldState::initial(p.modes, p.grid);
        Cvec& a2 = sq.ground(2);
        for (int i = 0; i < p.grid.nx; ++i) a2[i] = std::exp(cplx(0.0, 7.0 * i * p.grid.h()));
        KGrid wide;
        wide.k_max = 256.0 * std::numbers::pi;
        wide.n = 16384;
        const double q_err = std::fabs(envelope_spectrum(sq, 2, wide).kappa - 7.0) / 7.0;

        const bool ok = norm_err <= 1e-10 && pe1 <= 0.02 && pe2 < pe1 && pe4 < pe2 && q_err <= 1e-3;
        line(ok, "8. spectral integrity",
             fmt("norm err %.1e (<=1e-10); Parseval %.4f%% -> %.4f%% -> %.4f%% under window doubling "
                 "(<=2%%, monotone); shift-theorem rel err %.1e (<= 1e-3)",
                 norm_err, 100 * pe1, 100 * pe2, 100 * pe4, q_err));
    }

    // ---- criterion 9: convergence regression around the golden run
    {
        const double d_m = std::fabs(s0_m14 - s0_golden);
        const double d_dt = std::fabs(s0_dt_half - s0_golden);
        const double d_nx = std::fabs(s0_nx512 - s0_golden);
        const bool ok = d_m < 1e-4 && d_dt < 1e-6 && d_nx < 1e-4;
        line(ok, "9. convergence regression",
             fmt("S0 golden %.9f; M 10->14 |d| = %.2e (<1e-4); dt halving |d| = %.2e (<1e-6); "
                 "nx doubling |d| = %.2e (<1e-4)",
                 s0_golden, d_m, d_dt, d_nx));
    }

    std::printf("\n%s (%d criterion failure%s)\n", g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures == 0 ? 0 : 1;
}
