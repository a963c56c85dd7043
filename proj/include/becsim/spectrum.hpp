#pragma once

#include "becsim/state.hpp"

namespace becsim {

// Uniform wavenumber grid, symmetric about k = 0. The default window holds
// the shifts of interest (|kappa_2| ~ 8/L) with two decades of margin; the
// box-envelope tails it truncates fall off as k^-2, so second moments are
// reported together with the window they were taken over.
struct KGrid {
    double k_max = 64.0 * std::numbers::pi;
    int n = 4096;

    std::vector<double> points() const {
        std::vector<double> k(n);
        const double step = 2.0 * k_max / (n - 1);
        for (int i = 0; i < n; ++i) k[i] = -k_max + step * i;
        return k;
    }

    void validate() const {
        if (n < 16) throw ConfigError("k_grid.n", "must be >= 16");
        if (!(k_max > 0.0)) throw ConfigError("k_grid.k_max", "must be positive");
    }
};

// Envelope momentum distribution of one ground mode: w_j(k) normalized over
// the k window, with mean shift kappa and central variance. The full cloud
// momentum is j*k0 + kappa/L.
struct MomentumSpectrum {
    int mode_j = 0;
    std::vector<double> k;
    std::vector<double> w;
    double kappa = 0.0;    // 1/L units
    double variance = 0.0; // 1/L^2 units
    double k_window = 0.0; // half-width the moments were taken over
};

// f_j(k) = int_0^1 exp(-i k x) a_j(x) dx by trapezoid quadrature per k;
// w_j = |f_j|^2 / int |f_j|^2 dk; kappa_j and D_j are its first and second
// central moments on the same k grid.
MomentumSpectrum envelope_spectrum(const FieldState& state, int mode_j, const KGrid& grid = {});

// Per-cloud recoil summary in photon-wavenumber units. The |-j> report
// mirrors the |+j> one (sign(j) folded in) so both clouds quote the same
// physical index shift.
struct RecoilReport {
    int mode_j = 0;
    double delta_k_over_k0 = 0.0;
    double std_over_k0 = 0.0;
    double delta_omega_ratio = 0.0;          // delta_omega_j / omega_j = 2 delta_k_j / k_j
    double refraction_index_minus_1 = 0.0;   // n - 1 = delta_k_2 / (2 k0), |j| = 2 clouds
};

RecoilReport recoil_report(const MomentumSpectrum& spectrum, double k0L);

} // namespace becsim
