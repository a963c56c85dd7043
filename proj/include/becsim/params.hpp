#pragma once

#include <cmath>
#include <numbers>

#include "becsim/errors.hpp"
#include "becsim/modes.hpp"

namespace becsim {

enum class Stencil { central2, upwind1 };

// Uniform spatial grid on x in [0,1] (sample length L is the unit of length).
struct GridSpec {
    int nx = 256;
    Stencil stencil = Stencil::central2;

    double h() const { return 1.0 / (nx - 1); }

    void validate() const {
        if (nx < 16) throw ConfigError("nx", "must be >= 16");
    }
};

// Two identical rectangular pulses: the first on [0, dt_pulse), the second on
// [tau, tau + dt_pulse). The delay tau is measured from the start of pulse 1;
// the measurement time is tau + dt_pulse.
struct PulseSchedule {
    double dt_pulse = 3000.0; // pulse duration, tau_R units
    double tau = 6000.0;      // delay between pulse starts, tau_R units

    double t_measure() const { return tau + dt_pulse; }

    double envelope(double t, double e0) const {
        if ((t >= 0.0 && t < dt_pulse) || (t >= tau && t < tau + dt_pulse)) return e0;
        return 0.0;
    }

    void validate() const {
        if (!(dt_pulse > 0.0)) throw ConfigError("dt_pulse", "must be positive");
        if (!(tau >= dt_pulse)) throw ConfigError("tau", "pulses must not overlap (tau >= dt_pulse)");
    }
};

// Complete dimensionless input of one run. Time is in units of the
// superradiant constant tau_R, length in units of the sample size L; the
// fields are scaled so that amplitudes are pure numbers.
struct DimensionlessParams {
    double delta = 0.5;         // laser detuning, 1/tau_R
    double gamma = 5e-2;        // spontaneous decay rate, 1/tau_R
    double v_coeff = 7.8e-7;    // v_j = v_coeff * j
    double omega_coeff = 5e-5;  // omega_j = omega_coeff * j^2
    double e0 = 6e-3;           // incident pulse amplitude
    double k0L = 2.0 * std::numbers::pi * 16e-6 / 780e-9; // optical wavenumber * sample size
    ModeSet modes{};
    GridSpec grid{};
    double dt = 0.0;            // time step; 0 selects the detuning-aware default
    bool drop_spatial_derivatives = false;

    double v(int j) const { return v_coeff * j; }
    double omega(int j) const { return omega_coeff * double(j) * double(j); }
    // bare recoil frequency of the |+-2> clouds
    double omega2() const { return 4.0 * omega_coeff; }

    // Default step 0.1, shrunk for large detunings so the i*delta phase
    // rotation stays well inside the RK4 stability region.
    double resolved_dt() const {
        if (dt > 0.0) return dt;
        return std::min(0.1, 0.2 / std::max(1.0, std::fabs(delta)));
    }

    void validate() const {
        modes.validate();
        grid.validate();
        if (!(gamma >= 0.0)) throw ConfigError("gamma", "must be nonnegative");
        if (!(e0 >= 0.0)) throw ConfigError("e0", "must be nonnegative");
        if (!std::isfinite(delta)) throw ConfigError("delta", "must be finite");
        if (!std::isfinite(v_coeff)) throw ConfigError("v_coeff", "must be finite");
        if (!std::isfinite(omega_coeff)) throw ConfigError("omega_coeff", "must be finite");
        if (dt < 0.0) throw ConfigError("dt", "must be positive (or 0 for automatic)");
        const double step = resolved_dt();
        const double omega_max = omega(modes.max_order + 1);
        const double rate = std::max({std::fabs(delta) + omega_max, gamma / 2.0, e0});
        // explicit RK4 is stable on the imaginary axis up to |lambda*dt| = 2*sqrt(2)
        if (step * rate >= 2.8) throw ConfigError("dt", "violates the RK4 stability bound dt*max_rate < 2.8");
    }
};

// Reference dimensionless set for the Rb-87 experiment geometry
// (L = 16 um, lambda = 780 nm). Authoritative for regression values.
DimensionlessParams reference_params();

// Physical inputs in SI units.
struct PhysicalParams {
    double L = 16e-6;            // condensate transversal size, m
    double N0 = 4.15e19;         // atom number density, m^-3
    double lambda = 780e-9;      // transition wavelength, m
    double Gamma = 0.37e8;       // spontaneous emission rate, s^-1
    double d = 2.07e-29;         // transition dipole moment, C*m
    double m_atom = 1.44316060e-25; // Rb-87 mass, kg
    double hbar = 1.054571817e-34;  // J*s
    double c = 2.99792458e8;        // m/s

    void validate() const;
};

struct DerivedUnits {
    double tau_R_seconds = 0.0;
    DimensionlessParams params;
};

// Converts physical inputs to the dimensionless set. The superradiant
// constant tau_R = hbar/(pi d^2 k0 N0 L) is evaluated in Gaussian units
// (the dipole moment converted C*m -> esu*cm); evaluating the same formula
// in SI misses the 4*pi*eps0 factor by many orders of magnitude.
DerivedUnits derive_dimensionless(const PhysicalParams& p);

} // namespace becsim
