#include "becsim/fields.hpp"

namespace becsim {

namespace {
// a * conj(b) without the NaN-handling detour of the library operator
inline cplx mul_conj(cplx a, cplx b) {
    return {a.real() * b.real() + a.imag() * b.imag(),
            a.imag() * b.real() - a.real() * b.imag()};
}
} // namespace

void compute_fields_into(const FieldState& state, double e0_now, FieldWork& work, FieldPair& out) {
    const int nx = state.grid.nx;
    const int ng = state.modes.n_ground();
    if ((int)state.a.size() != ng || (int)state.b.size() != state.modes.n_excited())
        throw StructuralError("state mode arrays do not match the mode set");
    for (const auto& v : state.a)
        if ((int)v.size() != nx) throw StructuralError("ground array length does not match the grid");
    for (const auto& v : state.b)
        if ((int)v.size() != nx) throw StructuralError("excited array length does not match the grid");

    work.resize(nx);
    cplx* sp = work.src_plus.data();
    cplx* sm = work.src_minus.data();
    for (int gi = 0; gi < ng; ++gi) {
        const cplx* ag = state.a[gi].data();
        const cplx* bplus = state.b[gi + 1].data(); // b_{j+1}
        const cplx* bminus = state.b[gi].data();    // b_{j-1}
        for (int i = 0; i < nx; ++i) {
            sp[i] += mul_conj(bplus[i], ag[i]);
            sm[i] += mul_conj(bminus[i], ag[i]);
        }
    }

    const double h = state.grid.h();
    out.e_plus.resize(nx);
    out.e_minus.resize(nx);
    cplx* ep = out.e_plus.data();
    cplx* em = out.e_minus.data();
    // factor 2 from the field equations combines with the trapezoid 1/2
    ep[0] = e0_now;
    for (int i = 1; i < nx; ++i) ep[i] = ep[i - 1] + h * (sp[i - 1] + sp[i]);
    em[nx - 1] = e0_now;
    for (int i = nx - 2; i >= 0; --i) em[i] = em[i + 1] + h * (sm[i] + sm[i + 1]);
}

FieldPair compute_fields(const FieldState& state, double e0_now) {
    FieldWork work;
    FieldPair out;
    compute_fields_into(state, e0_now, work, out);
    return out;
}

} // namespace becsim
