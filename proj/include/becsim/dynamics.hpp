#pragma once

#include <functional>

#include "becsim/fields.hpp"
#include "becsim/observables.hpp"

namespace becsim {

// Right-hand side of the coupled amplitude equations:
//   da_j/dt = -v_j dx(a_j) - i w_j a_j + conj(E+) b_{j+1} + conj(E-) b_{j-1}
//   db_m/dt = -v_m dx(b_m) + i(delta - w_m + i gamma/2) b_m - E+ a_{m-1} - E- a_{m+1}
// Mode partners outside the truncation contribute zero. With
// drop_spatial_derivatives set, the transport terms are omitted.
FieldState rhs(const FieldState& state, const FieldPair& fields, const DimensionlessParams& params);

struct Snapshot {
    double t = 0.0;
    FieldState state;
};

struct Trajectory {
    std::vector<PopulationRecord> populations;
    std::vector<Snapshot> snapshots; // at phase boundaries, in time order

    const FieldState& state_at(double t) const {
        for (const auto& s : snapshots)
            if (std::fabs(s.t - t) < 1e-9 * std::max(1.0, std::fabs(t))) return s.state;
        throw StructuralError("no snapshot at the requested time");
    }
    const FieldState& final_state() const {
        if (snapshots.empty()) throw StructuralError("trajectory has no snapshots");
        return snapshots.back().state;
    }
};

// Fixed-step RK4 with the field envelopes recomputed from the stage state at
// every stage (the fields are algebraic functionals of the state, not
// independent dynamical variables). Owns all stepping workspace so repeated
// calls allocate nothing.
class Integrator {
public:
    explicit Integrator(const DimensionlessParams& params);

    const DimensionlessParams& params() const { return params_; }

    // One step of size dt under constant drive amplitude e0_now.
    void step(FieldState& state, double dt, double e0_now);

    // Same, but with E+ = E- = e0 frozen (no self-consistent medium source).
    void step_constant_field(FieldState& state, double dt, double e0);

    // Advance to t_end with the resolved step, shortening the final step to
    // land exactly. on_step(step_index_in_phase) runs after every step.
    void advance_phase(FieldState& state, double t_end, double e0_now,
                       const std::function<void(long)>& on_step = {});

private:
    void rk4(FieldState& state, double dt, double e0_now, bool self_consistent);

    DimensionlessParams params_;
    std::vector<Cvec> k1_, k2_, k3_, k4_, stage_;
    FieldState stage_state_;
    FieldWork field_work_;
    FieldPair fields_;
};

// Convenience single-step entry point (allocates a fresh workspace).
FieldState step(const FieldState& state, const DimensionlessParams& params, double e0_now);

struct RunOptions {
    int sample_every = 100; // population cadence in steps; boundaries always sampled
};

// Integrates the two-pulse schedule from the canonical initial condition:
// pulse 1 on [0, dt_pulse), free evolution on [dt_pulse, tau), pulse 2 on
// [tau, tau + dt_pulse). Snapshots are stored at the three phase boundaries;
// the last one is the measurement-time state.
Trajectory run_ramsey(const DimensionlessParams& params, const PulseSchedule& schedule,
                      const RunOptions& options = {});

} // namespace becsim
