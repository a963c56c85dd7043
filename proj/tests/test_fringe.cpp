#include <doctest.h>

#include <random>

#include "becsim/fringe.hpp"

using namespace becsim;

namespace {

FringeSeries synthetic_series(double offset, double amplitude, double omega, double phase,
                              int n, double tau0, double tau1) {
    FringeSeries s;
    s.delta = 0.0;
    for (int i = 0; i < n; ++i) {
        const double tau = tau0 + (tau1 - tau0) * i / (n - 1);
        s.tau_values.push_back(tau);
        const double y = offset + amplitude * std::cos(omega * tau + phase);
        s.s0.push_back(y);
        s.s2.push_back(y);
        s.s_minus2.push_back(y);
    }
    return s;
}

} // namespace

TEST_CASE("exact-model fringes are recovered to 1e-6 in frequency") {
    const double omega = 2e-4;
    FringeSeries s = synthetic_series(0.9, 0.05, omega, 1.0, 50, 3000.0, 90000.0);
    FringeFit fit = fit_fringe(s, FringeChannel::s0, 2e-4);
    CHECK(std::fabs(fit.omega_rec - omega) <= 1e-6 * omega);
    CHECK(fit.amplitude == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(fit.offset == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(std::fabs(fit.phase - 1.0) <= 1e-5);
    CHECK(fit.residual_rms <= 1e-9);
    CHECK(fit.omega_ratio == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fit is invariant under a uniform delay shift") {
    const double omega = 3.1e-4;
    FringeSeries s = synthetic_series(0.8, 0.07, omega, 0.3, 40, 2000.0, 70000.0);
    FringeFit f1 = fit_fringe(s, FringeChannel::s0, 2e-4);
    for (double& t : s.tau_values) t += 12345.0;
    FringeFit f2 = fit_fringe(s, FringeChannel::s0, 2e-4);
    CHECK(std::fabs(f2.omega_rec - f1.omega_rec) <= 1e-8 * f1.omega_rec);
    CHECK(f2.amplitude == doctest::Approx(f1.amplitude).epsilon(1e-8));
}

TEST_CASE("fit failures carry the DFT initialization") {
    // too few samples
    FringeSeries tiny = synthetic_series(0.9, 0.05, 2e-4, 0.0, 8, 3000.0, 90000.0);
    CHECK_THROWS_AS(fit_fringe(tiny, FringeChannel::s0, 2e-4), FitError);

    // fewer than 1.5 periods in the window
    FringeSeries slow = synthetic_series(0.9, 0.05, 2e-4, 0.0, 30, 0.0, 20000.0);
    try {
        fit_fringe(slow, FringeChannel::s0, 2e-4);
        FAIL("expected FitError");
    } catch (const FitError& e) {
        CHECK(e.initial_omega > 0.0);
    }

    // flat series: amplitude below the noise floor
    FringeSeries flat = synthetic_series(1.0, 0.0, 2e-4, 0.0, 50, 3000.0, 90000.0);
    CHECK_THROWS_AS(fit_fringe(flat, FringeChannel::s0, 2e-4), FitError);
}

TEST_CASE("noisy fringes still converge near the true frequency") {
    const double omega = 2.2e-4;
    FringeSeries s = synthetic_series(0.88, 0.05, omega, -0.7, 60, 3000.0, 90000.0);
    std::mt19937 rng(5);
    std::normal_distribution<double> noise(0.0, 2e-4);
    for (double& y : s.s0) y += noise(rng);
    FringeFit fit = fit_fringe(s, FringeChannel::s0, 2e-4);
    CHECK(std::fabs(fit.omega_rec - omega) <= 2e-3 * omega);
    CHECK(fit.residual_rms <= 5e-4);
}

TEST_CASE("tau grid snaps onto the step grid") {
    std::vector<double> taus = default_tau_grid(3000.0, 90000.0, 50, 0.1);
    CHECK(taus.size() == 50);
    CHECK(taus.front() == doctest::Approx(3000.0));
    CHECK(taus.back() == doctest::Approx(90000.0));
    for (size_t i = 1; i < taus.size(); ++i) CHECK(taus[i] > taus[i - 1]);
    for (double t : taus) {
        const double steps = t / 0.1;
        CHECK(std::fabs(steps - std::llround(steps)) <= 1e-6);
    }
}

TEST_CASE("no drive gives flat unit fringes") {
    DimensionlessParams p = reference_params();
    p.e0 = 0.0;
    p.modes.max_order = 2;
    p.grid.nx = 32;
    std::vector<double> taus = {60.0, 120.0, 180.0};
    FringeSeries s = sweep_delay(p, 0.5, taus, 50.0, SweepOptions{});
    for (double v : s.s0) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : s.s2) CHECK(std::fabs(v) <= 1e-15);
}

TEST_CASE("delay sweep validates its inputs") {
    DimensionlessParams p = reference_params();
    CHECK_THROWS_AS(sweep_delay(p, 0.5, {}, 50.0, SweepOptions{}), ConfigError);
    CHECK_THROWS_AS(sweep_delay(p, 0.5, {20.0}, 50.0, SweepOptions{}), ConfigError); // tau < pulse
}

TEST_CASE("shared-prefix sweep equals independent runs") {
    DimensionlessParams p = reference_params();
    p.modes.max_order = 4;
    p.grid.nx = 48;
    p.e0 = 0.02; // stronger drive so the tiny system shows contrast
    const double pulse = 50.0;

    // step-aligned delays: bit-exact equivalence
    std::vector<double> taus = {50.0, 130.0, 390.0, 707.1};
    SweepOptions shared;
    shared.workers = 2;
    SweepOptions indep;
    indep.independent_runs = true;
    indep.workers = 2;
    FringeSeries a = sweep_delay(p, 0.5, taus, pulse, shared);
    FringeSeries b = sweep_delay(p, 0.5, taus, pulse, indep);
    for (size_t i = 0; i < taus.size(); ++i) {
        CHECK(a.s0[i] == b.s0[i]);
        CHECK(a.s2[i] == b.s2[i]);
        CHECK(a.s_minus2[i] == b.s_minus2[i]);
    }

    // off-grid delays: the shared prefix inserts shortened steps, so the
    // paths differ only at the integrator's local error level
    std::vector<double> off = {50.0, 130.05, 390.02};
    FringeSeries c = sweep_delay(p, 0.5, off, pulse, shared);
    FringeSeries d = sweep_delay(p, 0.5, off, pulse, indep);
    for (size_t i = 0; i < off.size(); ++i)
        CHECK(std::fabs(c.s0[i] - d.s0[i]) <= 1e-9);
}

TEST_CASE("ablated transport pins the fringe frequency to the bare value") {
    // scaled-up recoil frequency so a short window holds several periods
    DimensionlessParams p = reference_params();
    p.modes.max_order = 4;
    p.grid.nx = 64;
    p.omega_coeff = 5e-3; // omega2 = 0.02, period ~314
    p.e0 = 0.025;
    p.drop_spatial_derivatives = true;
    const double pulse = 50.0;
    std::vector<double> taus = default_tau_grid(50.0, 850.0, 24, 0.1);
    SweepOptions opts;
    opts.workers = 2;
    FringeSeries s = sweep_delay(p, 0.5, taus, pulse, opts);
    FringeFit fit = fit_fringe(s, FringeChannel::s0, p.omega2());
    CHECK(fit.omega_ratio == doctest::Approx(1.0).epsilon(0.01));

    // the static and moving clouds anticorrelate
    double mean0 = 0.0, mean2 = 0.0;
    for (size_t i = 0; i < s.s0.size(); ++i) {
        mean0 += s.s0[i];
        mean2 += s.s2[i];
    }
    mean0 /= s.s0.size();
    mean2 /= s.s2.size();
    double cov = 0.0, var0 = 0.0, var2 = 0.0;
    for (size_t i = 0; i < s.s0.size(); ++i) {
        cov += (s.s0[i] - mean0) * (s.s2[i] - mean2);
        var0 += (s.s0[i] - mean0) * (s.s0[i] - mean0);
        var2 += (s.s2[i] - mean2) * (s.s2[i] - mean2);
    }
    CHECK(cov / std::sqrt(var0 * var2) < -0.9);
}

TEST_CASE("detuning sweep fills rows and records failures as gaps") {
    DimensionlessParams p = reference_params();
    p.modes.max_order = 4;
    p.grid.nx = 64;
    DetuningSweepOptions opts;
    opts.include_fringe = false;
    opts.dt_pulse = 500.0;
    opts.workers = 2;
    std::vector<double> deltas = {-0.5, 0.5};
    auto rows = sweep_detuning(p, deltas, opts);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.ok);
        CHECK(std::isfinite(r.kappa2_over_k0));
        CHECK(std::isfinite(r.delta_omega_ratio_mean));
        CHECK(std::isnan(r.omega_ratio)); // fringe skipped
    }
    // opposite detunings give opposite shifts (checked loosely here)
    CHECK(rows[0].kappa_plus2 * rows[1].kappa_plus2 < 0.0);
    // mirrored cloud carries the opposite shift at each detuning
    for (const auto& r : rows)
        CHECK(std::fabs(r.kappa_plus2 + r.kappa_minus2) <= 1e-8);

    // an unstable point becomes a gap, not an abort
    p.dt = 0.1;
    deltas = {0.5, 80.0};
    rows = sweep_detuning(p, deltas, opts);
    CHECK(rows[0].ok);
    CHECK_FALSE(rows[1].ok);
    CHECK(!rows[1].note.empty());
}
