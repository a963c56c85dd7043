#include "becsim/spectrum.hpp"

#include <cmath>

namespace becsim {

MomentumSpectrum envelope_spectrum(const FieldState& state, int mode_j, const KGrid& grid) {
    grid.validate();
    const int gi = state.modes.ground_index(mode_j);
    if (gi < 0) throw StructuralError("envelope spectrum is defined for ground modes inside the truncation");
    const Cvec& amp = state.a[gi];
    const int nx = state.grid.nx;
    const double h = state.grid.h();

    MomentumSpectrum out;
    out.mode_j = mode_j;
    out.k = grid.points();
    out.w.resize(grid.n);
    out.k_window = grid.k_max;

    // trapezoid transform per k; the phasor recurrence avoids nx trig calls
    for (int iq = 0; iq < grid.n; ++iq) {
        const double k = out.k[iq];
        const cplx rot = std::polar(1.0, -k * h);
        cplx ph(1.0, 0.0);
        cplx acc = 0.5 * amp[0];
        for (int i = 1; i < nx - 1; ++i) {
            ph *= rot;
            acc += ph * amp[i];
        }
        ph *= rot;
        acc += 0.5 * ph * amp[nx - 1];
        out.w[iq] = std::norm(acc * h); // |f(k)|^2 for now; normalized below
    }

    const double dk = (out.k.back() - out.k.front()) / (grid.n - 1);
    auto kquad = [&](auto&& f) {
        double s = 0.5 * (f(0) + f(grid.n - 1));
        for (int i = 1; i < grid.n - 1; ++i) s += f(i);
        return s * dk;
    };

    const double total = kquad([&](int i) { return out.w[i]; });
    if (!(total > 0.0))
        throw SpectrumError("momentum distribution undefined: amplitude has zero norm");
    for (double& v : out.w) v /= total;

    out.kappa = kquad([&](int i) { return out.k[i] * out.w[i]; });
    out.variance = kquad([&](int i) {
        const double d = out.k[i] - out.kappa;
        return d * d * out.w[i];
    });
    return out;
}

RecoilReport recoil_report(const MomentumSpectrum& spectrum, double k0L) {
    if (spectrum.mode_j == 0)
        throw StructuralError("no recoil report for the static cloud (j = 0)");
    if (!(k0L > 0.0)) throw ConfigError("k0L", "must be positive");

    RecoilReport rep;
    rep.mode_j = spectrum.mode_j;
    const double sign = spectrum.mode_j > 0 ? 1.0 : -1.0;
    rep.delta_k_over_k0 = sign * spectrum.kappa / k0L;
    rep.std_over_k0 = std::sqrt(std::max(0.0, spectrum.variance)) / k0L;
    rep.delta_omega_ratio = 2.0 * rep.delta_k_over_k0 / std::abs(spectrum.mode_j);
    rep.refraction_index_minus_1 = rep.delta_k_over_k0 / 2.0;
    return rep;
}

} // namespace becsim
