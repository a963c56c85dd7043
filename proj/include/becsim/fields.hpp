#pragma once

#include "becsim/state.hpp"

namespace becsim {

// Slowly varying envelopes of the forward and backward fields on the grid.
// e_plus[0] == e0 and e_minus[nx-1] == e0 exactly (the source integrals
// vanish at their lower/upper limits).
struct FieldPair {
    Cvec e_plus;
    Cvec e_minus;
};

// Scratch buffers so the solver can run allocation-free inside the stepper.
struct FieldWork {
    Cvec src_plus, src_minus;
    void resize(int nx) {
        src_plus.assign(nx, cplx(0.0, 0.0));
        src_minus.assign(nx, cplx(0.0, 0.0));
    }
};

// E+(x) = e0 + 2 * int_0^x sum_j b_{j+1} conj(a_j) dx'
// E-(x) = e0 + 2 * int_x^1 sum_j b_{j-1} conj(a_j) dx'
// by cumulative trapezoid quadrature on the state's grid; the backward
// integral accumulates right-to-left so the two envelopes are exact mirror
// images of each other on mirror-symmetric states.
void compute_fields_into(const FieldState& state, double e0_now, FieldWork& work, FieldPair& out);

FieldPair compute_fields(const FieldState& state, double e0_now);

} // namespace becsim
