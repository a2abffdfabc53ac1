#pragma once

// Default rotation generators for lattice signal sets. Dimension 2 uses the
// 31.718 degree rotation; dimensions 3 and 4 come from tools/search_rotation
// (random orthogonal search plus Cayley-step refinement) and are stored with
// the minimum product distance they reach on the 4-PAM grid {-3,-1,1,3}^dim.
//
//   search_rotation --dim 3 --samples 200000 --refine 60000 --seed 1
//   search_rotation --dim 4 --samples 300000 --refine 300000 --seed 3

#include "cliffstbc/signal_sets.hpp"

namespace cliffstbc {

struct LatticeTableEntry {
    int dim;
    RMatrix generator;
    double min_product_distance_4pam;
};

inline LatticeTableEntry default_lattice_generator(int dim) {
    switch (dim) {
    case 1:
        return {1, RMatrix::Identity(1, 1), 2.0};
    case 2:
        return {2, rotation2(deg_to_rad(kPciodAngleDeg)), 1.7883785030266945};
    case 3: {
        RMatrix g(3, 3);
        g << 0.73697633387213812, 0.59100912773014336, 0.32798489942684617,
             0.59100881829636509, -0.32798546733234213, -0.73697632927708123,
             -0.32798545700734483, 0.73697608113048063, -0.59100913346008632;
        return {3, g, 1.1428254361420043};
    }
    case 4: {
        RMatrix g(4, 4);
        g << -0.42022387347207468, 0.73181650005748533, 0.16826121122277768, 0.50945526909197769,
             -0.30159710571323223, -0.56548669939346752, -0.35480824450511084, 0.68071659908194349,
             0.29671884038046603, -0.26814923682504094, 0.84700719200976282, 0.35018956757327152,
             0.80275090267953331, 0.26975060675156465, -0.35829888516820624, 0.39299810087528703;
        return {4, g, 0.1244309270300602};
    }
    default:
        throw std::invalid_argument("no default lattice generator for dimension " + std::to_string(dim));
    }
}

// side^dim points of the default rotated lattice, energy-normalized.
inline SignalSet default_lattice_signal_set(int dim, int side) {
    const auto e = default_lattice_generator(dim);
    SignalSet s = lattice_signal_set(e.generator, pam_grid(dim, side), true);
    s.label = "lattice(dim=" + std::to_string(dim) + ",side=" + std::to_string(side) + ")";
    return s;
}

}  // namespace cliffstbc
