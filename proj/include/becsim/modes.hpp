#pragma once

#include <vector>

#include "becsim/errors.hpp"

namespace becsim {

// Truncated lattice of photon-recoil momentum indices. Ground-state modes
// carry even multiples of the photon wavenumber (0, ±2, ..., ±M), excited
// modes the odd ones (±1, ±3, ..., ±(M+1)). Storage order is ascending in j.
struct ModeSet {
    int max_order = 10; // M, positive even

    int n_ground() const { return max_order + 1; }
    int n_excited() const { return max_order + 2; }

    // physical index j of the gi-th ground mode, gi in [0, n_ground)
    int ground_j(int gi) const { return 2 * gi - max_order; }
    // physical index m of the ei-th excited mode, ei in [0, n_excited)
    int excited_j(int ei) const { return 2 * ei - (max_order + 1); }

    // inverse maps; return -1 when the index is outside the truncation
    int ground_index(int j) const {
        if (j % 2 != 0 || j < -max_order || j > max_order) return -1;
        return (j + max_order) / 2;
    }
    int excited_index(int m) const {
        if ((m % 2) == 0 || m < -(max_order + 1) || m > max_order + 1) return -1;
        return (m + max_order + 1) / 2;
    }

    std::vector<int> ground_modes() const {
        std::vector<int> out(n_ground());
        for (int gi = 0; gi < n_ground(); ++gi) out[gi] = ground_j(gi);
        return out;
    }
    std::vector<int> excited_modes() const {
        std::vector<int> out(n_excited());
        for (int ei = 0; ei < n_excited(); ++ei) out[ei] = excited_j(ei);
        return out;
    }

    // max_order = 0 degenerates to the three-mode system {a_0, b_-1, b_1},
    // which the constant-field oracle checks against its closed form.
    void validate() const {
        if (max_order < 0) throw ConfigError("max_order", "must be nonnegative");
        if (max_order % 2 != 0) throw ConfigError("max_order", "must be even");
    }
};

} // namespace becsim
