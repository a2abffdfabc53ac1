#pragma once

// Finite per-group signal sets: rotated QAM pairs, lattice points G z, and
// plain PAM grids. Energies are normalized to 1/2 per real dimension unless a
// caller asks otherwise, i.e. one unit per complex symbol.

#include "cliffstbc/core.hpp"

#include <cmath>
#include <numbers>

namespace cliffstbc {

struct SignalSet {
    int dim = 0;
    std::vector<RVector> points;
    std::string label;

    std::size_t size() const { return points.size(); }
    double average_energy() const {
        double e = 0.0;
        for (const auto& p : points) e += p.squaredNorm();
        return points.empty() ? 0.0 : e / static_cast<double>(points.size());
    }
};

inline constexpr double kPciodAngleDeg = 31.718;
inline constexpr double kEcaAngleDeg = 166.71;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

inline RMatrix rotation2(double angle) {
    RMatrix r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

// Levels 2k - (side-1), k = 0..side-1.
inline std::vector<double> pam_levels(int side) {
    if (side < 1) throw std::invalid_argument("pam_levels: side must be positive");
    std::vector<double> out;
    for (int k = 0; k < side; ++k) out.push_back(2.0 * k - (side - 1));
    return out;
}

// All side^dim vectors with PAM coordinates, first coordinate varying fastest.
inline std::vector<RVector> pam_grid(int dim, int side) {
    const auto lv = pam_levels(side);
    std::size_t count = 1;
    for (int j = 0; j < dim; ++j) count *= static_cast<std::size_t>(side);
    std::vector<RVector> out;
    out.reserve(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        RVector v(dim);
        std::size_t r = idx;
        for (int j = 0; j < dim; ++j) {
            v(j) = lv[r % static_cast<std::size_t>(side)];
            r /= static_cast<std::size_t>(side);
        }
        out.push_back(v);
    }
    return out;
}

inline void normalize_energy(SignalSet& s, double per_real_dim = 0.5) {
    const double e = s.average_energy();
    if (e <= 0.0) throw std::invalid_argument("normalize_energy: zero-energy signal set");
    const double scale = std::sqrt(per_real_dim * s.dim / e);
    for (auto& p : s.points) p *= scale;
}

inline SignalSet lattice_signal_set(const RMatrix& generator, const std::vector<RVector>& integer_points, bool normalize = false,
                                    std::string label = "lattice") {
    if (generator.rows() != generator.cols()) throw std::invalid_argument("lattice_signal_set: generator must be square");
    if (numeric_rank(generator) != generator.rows()) throw std::invalid_argument("lattice_signal_set: singular generator");
    SignalSet s;
    s.dim = static_cast<int>(generator.rows());
    s.label = std::move(label);
    for (const auto& z : integer_points) {
        if (z.size() != s.dim) throw std::invalid_argument("lattice_signal_set: point dimension mismatch");
        s.points.push_back(generator * z);
    }
    if (normalize) normalize_energy(s);
    return s;
}

// side x side QAM in (y_I, y_Q), rotated by angle (radians).
inline SignalSet rotated_qam(int side, double angle) {
    if (side < 2) throw std::invalid_argument("rotated_qam: side must be at least 2");
    SignalSet s = lattice_signal_set(rotation2(angle), pam_grid(2, side), true);
    s.label = "rotated-qam(side=" + std::to_string(side) + ",deg=" + std::to_string(angle * 180.0 / std::numbers::pi) + ")";
    return s;
}

// Independent PAM on each of dim real coordinates, normalized.
inline SignalSet pam_signal_set(int dim, int side) {
    SignalSet s = lattice_signal_set(RMatrix::Identity(dim, dim), pam_grid(dim, side), true);
    s.label = "pam(dim=" + std::to_string(dim) + ",side=" + std::to_string(side) + ")";
    return s;
}

}  // namespace cliffstbc
