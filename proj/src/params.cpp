#include "becsim/params.hpp"

namespace becsim {

DimensionlessParams reference_params() {
    DimensionlessParams p;
    p.delta = 0.5;
    p.gamma = 5e-2;
    p.v_coeff = 7.8e-7;
    p.omega_coeff = 5e-5;
    p.e0 = 6e-3;
    p.k0L = 2.0 * std::numbers::pi * 16e-6 / 780e-9;
    p.modes.max_order = 10;
    p.grid = GridSpec{};
    p.dt = 0.0;
    p.drop_spatial_derivatives = false;
    return p;
}

void PhysicalParams::validate() const {
    auto require_positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name, "must be strictly positive");
    };
    require_positive(L, "L");
    require_positive(N0, "N0");
    require_positive(lambda, "lambda");
    require_positive(Gamma, "Gamma");
    require_positive(d, "d");
    require_positive(m_atom, "m_atom");
    require_positive(hbar, "hbar");
    require_positive(c, "c");
    if (!(lambda < L)) throw ConfigError("lambda", "must be smaller than the sample size L");
}

DerivedUnits derive_dimensionless(const PhysicalParams& p) {
    p.validate();

    const double k0 = 2.0 * std::numbers::pi / p.lambda; // m^-1

    // Gaussian-unit evaluation of tau_R = hbar/(pi d^2 k0 N0 L):
    //   charge: 1 C = (c/10 m/s) statC, so d [C*m] -> d * (c*10) [esu*cm]
    //   hbar: J*s -> erg*s (1e7), k0: m^-1 -> cm^-1 (1e-2),
    //   N0: m^-3 -> cm^-3 (1e-6), L: m -> cm (1e2)
    const double d_esu = p.d * (p.c * 10.0) * 100.0;
    const double hbar_cgs = p.hbar * 1e7;
    const double k0_cgs = k0 * 1e-2;
    const double N0_cgs = p.N0 * 1e-6;
    const double L_cgs = p.L * 1e2;
    const double tau_R = hbar_cgs / (std::numbers::pi * d_esu * d_esu * k0_cgs * N0_cgs * L_cgs);

    DerivedUnits out;
    out.tau_R_seconds = tau_R;
    out.params = reference_params();
    out.params.gamma = p.Gamma * tau_R;
    out.params.v_coeff = p.hbar * k0 * tau_R / (p.m_atom * p.L);
    out.params.omega_coeff = p.hbar * k0 * k0 * tau_R / (2.0 * p.m_atom);
    out.params.k0L = k0 * p.L;
    return out;
}

} // namespace becsim
