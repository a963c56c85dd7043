#pragma once

#include <complex>
#include <vector>

#include "becsim/params.hpp"

namespace becsim {

using cplx = std::complex<double>;
using Cvec = std::vector<cplx>;

// Complex envelope amplitudes of all modes on the shared spatial grid at one
// instant. a[gi] is the ground mode with index ModeSet::ground_j(gi), b[ei]
// the excited mode with ModeSet::excited_j(ei).
struct FieldState {
    double t = 0.0;
    ModeSet modes{};
    GridSpec grid{};
    std::vector<Cvec> a;
    std::vector<Cvec> b;

    static FieldState zero(const ModeSet& modes, const GridSpec& grid) {
        FieldState s;
        s.modes = modes;
        s.grid = grid;
        s.a.assign(modes.n_ground(), Cvec(grid.nx, cplx(0.0, 0.0)));
        s.b.assign(modes.n_excited(), Cvec(grid.nx, cplx(0.0, 0.0)));
        return s;
    }

    // a_0(x,0) = 1 is the only nonzero initial condition.
    static FieldState initial(const ModeSet& modes, const GridSpec& grid) {
        FieldState s = zero(modes, grid);
        int gi0 = modes.ground_index(0);
        for (auto& z : s.a[gi0]) z = cplx(1.0, 0.0);
        return s;
    }

    const Cvec& ground(int j) const {
        int gi = modes.ground_index(j);
        if (gi < 0) throw StructuralError("ground mode outside truncation");
        return a[gi];
    }
    const Cvec& excited(int m) const {
        int ei = modes.excited_index(m);
        if (ei < 0) throw StructuralError("excited mode outside truncation");
        return b[ei];
    }
    Cvec& ground(int j) { return const_cast<Cvec&>(static_cast<const FieldState*>(this)->ground(j)); }
    Cvec& excited(int m) { return const_cast<Cvec&>(static_cast<const FieldState*>(this)->excited(m)); }

    bool finite() const {
        auto vec_finite = [](const std::vector<Cvec>& vv) {
            for (const auto& v : vv) {
                double acc = 0.0;
                for (const auto& z : v) acc += z.real() + z.imag();
                if (!std::isfinite(acc)) return false;
            }
            return true;
        };
        return vec_finite(a) && vec_finite(b);
    }
};

// Trapezoid quadrature of |f|^2 over the grid.
inline double norm_integral(const Cvec& f, const GridSpec& grid) {
    const double h = grid.h();
    double s = 0.5 * (std::norm(f.front()) + std::norm(f.back()));
    for (int i = 1; i + 1 < grid.nx; ++i) s += std::norm(f[i]);
    return s * h;
}

} // namespace becsim
