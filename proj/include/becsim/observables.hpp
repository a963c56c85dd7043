#pragma once

#include "becsim/state.hpp"

namespace becsim {

// Population fractions S_j = int |a_j|^2 dx and P_m = int |b_m|^2 dx,
// indexed like the state arrays, plus their sum.
struct PopulationRecord {
    double t = 0.0;
    std::vector<double> s_ground;
    std::vector<double> p_excited;
    double total_norm = 0.0;

    double s(const ModeSet& modes, int j) const { return s_ground.at(modes.ground_index(j)); }
    double p(const ModeSet& modes, int m) const { return p_excited.at(modes.excited_index(m)); }
    double excited_total() const {
        double sum = 0.0;
        for (double v : p_excited) sum += v;
        return sum;
    }
};

PopulationRecord populations(const FieldState& state);

} // namespace becsim
