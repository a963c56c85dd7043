#include "becsim/observables.hpp"

namespace becsim {

PopulationRecord populations(const FieldState& state) {
    PopulationRecord rec;
    rec.t = state.t;
    rec.s_ground.resize(state.a.size());
    rec.p_excited.resize(state.b.size());
    double total = 0.0;
    for (size_t gi = 0; gi < state.a.size(); ++gi) {
        rec.s_ground[gi] = norm_integral(state.a[gi], state.grid);
        total += rec.s_ground[gi];
    }
    for (size_t ei = 0; ei < state.b.size(); ++ei) {
        rec.p_excited[ei] = norm_integral(state.b[ei], state.grid);
        total += rec.p_excited[ei];
    }
    rec.total_norm = total;
    return rec;
}

} // namespace becsim
