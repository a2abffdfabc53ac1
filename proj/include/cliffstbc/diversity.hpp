#pragma once

// Full-diversity machinery: simultaneous diagonalization of a commuting
// first group, product distances, coding gain and rank checks over codeword
// pairs.

#include "cliffstbc/codebook.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace cliffstbc {

struct DiagonalizationResult {
    CMatrix U;                    // U A_i U^H = D_i
    std::vector<RVector> D;       // diagonals of D_i
    Eigen::MatrixXi P;            // N_T x lambda, column i = diag(D_i)
};

// signs: the CUWD case, unitary involutions with A_1 = I.
// signs_or_zero: commuting Hermitian matrices with eigenvalues in {-1,0,1},
// as for the block-diagonal PCIOD weights.
enum class DiagonalEntries { signs, signs_or_zero };

inline DiagonalizationResult joint_diagonalize(const std::vector<CMatrix>& first_group,
                                               DiagonalEntries entries = DiagonalEntries::signs, double tol = 1e-10) {
    if (first_group.empty()) throw std::invalid_argument("joint_diagonalize: empty input");
    const Eigen::Index n = first_group.front().rows();
    const bool strict = entries == DiagonalEntries::signs;
    for (const auto& a : first_group) {
        if (a.rows() != n || a.cols() != n) throw std::invalid_argument("joint_diagonalize: matrices must be square and equal size");
        if (!approx_equal(a, a.adjoint(), tol)) throw std::invalid_argument("joint_diagonalize: matrix is not Hermitian");
        if (strict && !approx_equal(a.adjoint() * a, identity(n), tol)) throw std::invalid_argument("joint_diagonalize: matrix is not unitary");
        if (strict && !approx_equal(a * a, identity(n), tol)) throw std::invalid_argument("joint_diagonalize: matrix does not square to I");
    }
    if (strict && !approx_equal(first_group.front(), identity(n), tol)) throw std::invalid_argument("joint_diagonalize: first matrix must be I");
    for (std::size_t i = 0; i < first_group.size(); ++i)
        for (std::size_t j = i + 1; j < first_group.size(); ++j)
            if (!is_zero(first_group[i] * first_group[j] - first_group[j] * first_group[i], tol))
                throw std::invalid_argument("joint_diagonalize: matrices do not commute");

    // Each block is an orthonormal basis of a common eigenspace plus its sign pattern.
    struct Block {
        CMatrix V;
        std::vector<int> signs;
    };
    std::vector<Block> blocks{{identity(n), {}}};
    for (std::size_t i = 0; i < first_group.size(); ++i) {
        std::vector<Block> next;
        for (const auto& b : blocks) {
            const CMatrix m = b.V.adjoint() * first_group[i] * b.V;
            Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
            CMatrix parts[3] = {CMatrix(n, 0), CMatrix(n, 0), CMatrix(n, 0)};  // eigenvalue +1, 0, -1
            for (Eigen::Index k = 0; k < m.rows(); ++k) {
                const double ev = es.eigenvalues()(k);
                const double snapped = std::round(ev);
                if (std::abs(ev - snapped) > 1e-6 || std::abs(snapped) > 1.0 || (strict && snapped == 0.0))
                    throw std::runtime_error("joint_diagonalize: eigenvalue " + std::to_string(ev) + " cannot be snapped");
                CMatrix& dst = parts[1 - static_cast<int>(snapped)];
                dst.conservativeResize(Eigen::NoChange, dst.cols() + 1);
                dst.col(dst.cols() - 1) = b.V * es.eigenvectors().col(k);
            }
            for (int p = 0; p < 3; ++p) {
                if (parts[p].cols() == 0) continue;
                Block nb{parts[p], b.signs};
                nb.signs.push_back(1 - p);
                next.push_back(std::move(nb));
            }
        }
        blocks = std::move(next);
    }
    // Deterministic order: +1 before 0 before -1 at the first differing matrix.
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
        return std::lexicographical_compare(b.signs.begin(), b.signs.end(), a.signs.begin(), a.signs.end());
    });

    DiagonalizationResult res;
    CMatrix Vall(n, n);
    Eigen::Index col = 0;
    res.P.resize(n, static_cast<Eigen::Index>(first_group.size()));
    for (const auto& b : blocks)
        for (Eigen::Index k = 0; k < b.V.cols(); ++k, ++col) {
            Vall.col(col) = b.V.col(k);
            for (std::size_t i = 0; i < b.signs.size(); ++i) res.P(col, static_cast<Eigen::Index>(i)) = b.signs[i];
        }
    res.U = Vall.adjoint();
    for (std::size_t i = 0; i < first_group.size(); ++i) {
        res.D.push_back(res.P.col(static_cast<Eigen::Index>(i)).cast<double>());
        const CMatrix resid = res.U * first_group[i] * res.U.adjoint() - CMatrix(res.D.back().cast<cd>().asDiagonal());
        if (!is_zero(resid, tol)) throw std::runtime_error("joint_diagonalize: reconstruction failed");
    }
    return res;
}

inline double min_product_distance(const std::vector<RVector>& points, const RMatrix& transform) {
    if (points.size() < 2) throw std::invalid_argument("min_product_distance: need at least two points");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const RVector d = transform * (points[i] - points[j]);
            best = std::min(best, std::abs(d.prod()));
        }
    return best;
}

struct PairScan {
    bool exhaustive = true;
    std::size_t pairs = 0;
    double min_det = std::numeric_limits<double>::infinity();
    bool full_rank = true;
    std::size_t worst_a = 0, worst_b = 0;  // a pair attaining min_det
};

namespace detail {

// Visits codeword pairs (a < b), all of them when the count is at most
// max_pairs, otherwise an equal number of random partners per codeword with a
// fixed seed.
template <class F>
bool for_codeword_pairs(std::size_t n, std::size_t max_pairs, std::uint64_t seed, F&& visit) {
    const std::size_t total = n < 2 ? 0 : n * (n - 1) / 2;
    if (total <= max_pairs) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) visit(a, b);
        return true;
    }
    std::mt19937_64 rng(seed);
    const std::size_t per = std::max<std::size_t>(1, max_pairs / n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 2);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t k = 0; k < per; ++k) {
            std::size_t b = pick(rng);
            if (b >= a) ++b;
            visit(std::min(a, b), std::max(a, b));
        }
    return false;
}

}  // namespace detail

// Minimum det(dX^H dX) and the rank condition over codeword pairs.
inline PairScan scan_codeword_pairs(const StbcCodebook& cb, std::size_t max_pairs = 1000000, double rel_tol = 1e-9,
                                    std::uint64_t seed = 0x5eed) {
    PairScan out;
    std::vector<CMatrix> words(cb.size());
    for (std::size_t i = 0; i < cb.size(); ++i) words[i] = cb.codeword(i);
    double scale = 0.0;
    for (const auto& w : words) scale = std::max(scale, max_abs(w));
    out.exhaustive = detail::for_codeword_pairs(cb.size(), max_pairs, seed, [&](std::size_t a, std::size_t b) {
        ++out.pairs;
        const CMatrix d = words[a] - words[b];
        const double det = (d.adjoint() * d).determinant().real();
        if (det < out.min_det) {
            out.min_det = det;
            out.worst_a = a;
            out.worst_b = b;
        }
        Eigen::JacobiSVD<CMatrix> svd(d);
        const auto& sv = svd.singularValues();
        const bool full = sv.size() == d.cols() && sv(sv.size() - 1) > rel_tol * std::max(scale, sv(0));
        if (!full) out.full_rank = false;
    });
    out.min_det = std::max(out.min_det, 0.0);
    if (out.pairs == 0) out.min_det = 0.0;
    return out;
}

inline double coding_gain(const StbcCodebook& cb, std::size_t max_pairs = 1000000) {
    return scan_codeword_pairs(cb, max_pairs).min_det;
}

inline bool check_full_diversity(const StbcCodebook& cb, std::size_t max_pairs = 1000000) {
    return scan_codeword_pairs(cb, max_pairs).full_rank;
}

}  // namespace cliffstbc
