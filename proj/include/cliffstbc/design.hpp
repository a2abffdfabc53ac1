#pragma once

// Linear space-time designs S(x) = sum_i x_i A_i and the algebraic checks on
// them: rate, real linear independence, g-group decodability and the CUWD
// (Clifford unitary weight design) conditions.

#include "cliffstbc/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cliffstbc {

using Partition = std::vector<std::vector<int>>;  // 0-based real-variable indices

struct LinearSpaceTimeDesign {
    std::string name;
    int T = 0;
    int NT = 0;
    std::vector<CMatrix> weights;
    Partition partition;

    int K() const { return static_cast<int>(weights.size()); }
    int groups() const { return static_cast<int>(partition.size()); }

    CMatrix codeword(const RVector& x) const {
        if (x.size() != K()) throw std::invalid_argument("codeword: wrong number of real variables");
        CMatrix out = CMatrix::Zero(T, NT);
        for (int i = 0; i < K(); ++i)
            if (x(i) != 0.0) out += x(i) * weights[static_cast<std::size_t>(i)];
        return out;
    }
};

inline Partition singleton_partition(int K) {
    Partition p;
    for (int i = 0; i < K; ++i) p.push_back({i});
    return p;
}

inline Partition contiguous_partition(int K, int group_size) {
    if (group_size <= 0 || K % group_size != 0) throw std::invalid_argument("contiguous_partition: size does not divide K");
    Partition p;
    for (int start = 0; start < K; start += group_size) {
        std::vector<int> grp;
        for (int i = 0; i < group_size; ++i) grp.push_back(start + i);
        p.push_back(grp);
    }
    return p;
}

// Throws if the partition is not a set partition of {0..K-1}.
inline void validate_partition(const Partition& p, int K) {
    std::vector<int> seen(static_cast<std::size_t>(K), 0);
    for (const auto& grp : p) {
        if (grp.empty()) throw std::invalid_argument("partition contains an empty group");
        for (int v : grp) {
            if (v < 0 || v >= K) throw std::invalid_argument("partition index out of range");
            if (seen[static_cast<std::size_t>(v)]++) throw std::invalid_argument("partition groups overlap");
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw std::invalid_argument("partition does not cover every variable");
}

inline void validate_shape(const LinearSpaceTimeDesign& d) {
    if (d.T <= 0 || d.NT <= 0) throw std::invalid_argument("design has empty dimensions");
    for (const auto& w : d.weights)
        if (w.rows() != d.T || w.cols() != d.NT) throw std::invalid_argument("weight matrix has wrong shape");
    validate_partition(d.partition, d.K());
}

// Stack of real-vectorized weights: column i = [Re vec(A_i); Im vec(A_i)].
inline RMatrix real_vectorize(const std::vector<CMatrix>& weights) {
    if (weights.empty()) return RMatrix(0, 0);
    const Eigen::Index n = weights.front().size();
    RMatrix out(2 * n, static_cast<Eigen::Index>(weights.size()));
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i].size() != n) throw std::invalid_argument("weights have inconsistent shapes");
        const Eigen::Map<const CVector> v(weights[i].data(), n);
        out.col(static_cast<Eigen::Index>(i)) << v.real(), v.imag();
    }
    return out;
}

// Real Gram matrix G_ij = 1/2 Tr(A_i^H A_j + A_j^H A_i) = Re Tr(A_i^H A_j).
inline RMatrix trace_gram(const std::vector<CMatrix>& weights) {
    const RMatrix v = real_vectorize(weights);
    return v.transpose() * v;
}

inline bool check_linear_independence(const std::vector<CMatrix>& weights) {
    if (weights.empty()) return true;
    const RMatrix v = real_vectorize(weights);
    return numeric_rank(v) == static_cast<Eigen::Index>(weights.size());
}

inline Rational rate_dpcu(const LinearSpaceTimeDesign& d) {
    if (!check_linear_independence(d.weights)) throw std::invalid_argument("rate_dpcu: weight matrices are linearly dependent");
    return Rational(d.K(), d.T);
}

inline CMatrix anticommutator_h(const CMatrix& a, const CMatrix& b) { return a.adjoint() * b + b.adjoint() * a; }

// Eq. "A_i^H A_j + A_j^H A_i = 0" for every pair in different groups.
inline bool check_g_group_decodable(const std::vector<CMatrix>& weights, const Partition& partition, double tol = 1e-12) {
    validate_partition(partition, static_cast<int>(weights.size()));
    for (std::size_t ga = 0; ga < partition.size(); ++ga)
        for (std::size_t gb = ga + 1; gb < partition.size(); ++gb)
            for (int i : partition[ga])
                for (int j : partition[gb])
                    if (!is_zero(anticommutator_h(weights[static_cast<std::size_t>(i)], weights[static_cast<std::size_t>(j)]), tol))
                        return false;
    return true;
}

inline bool check_g_group_decodable(const LinearSpaceTimeDesign& d, double tol = 1e-12) {
    return check_g_group_decodable(d.weights, d.partition, tol);
}

struct CuwdReport {
    bool ok = false;
    std::string failure;            // first violated condition, empty when ok
    std::vector<int> product_signs;  // sign s with A(i,j) = s * A_i * A_{(j-1)lambda+1}, column-major
    explicit operator bool() const { return ok; }
};

// Verifies the CUWD conditions for a design whose variables are laid out
// column-by-column as in the CUWD table: group j holds the lambda consecutive
// indices (j-1)lambda+1 .. j lambda; the first row is the first member of
// each group and the first column is group 1.
inline CuwdReport check_cuwd(const LinearSpaceTimeDesign& d, double tol = 1e-12) {
    CuwdReport rep;
    auto fail = [&](const std::string& why) {
        rep.ok = false;
        rep.failure = why;
        return rep;
    };
    if (d.T != d.NT) return fail("design is not square");
    if (d.K() == 0 || d.partition.empty()) return fail("design has no variables");
    const int g = d.groups();
    if (d.K() % g != 0) return fail("groups do not have equal size");
    const int lambda = d.K() / g;
    for (int j = 0; j < g; ++j) {
        std::vector<int> want(static_cast<std::size_t>(lambda));
        std::iota(want.begin(), want.end(), j * lambda);
        std::vector<int> have = d.partition[static_cast<std::size_t>(j)];
        std::sort(have.begin(), have.end());
        if (have != want) return fail("partition is not laid out column-by-column");
    }
    auto A = [&](int k) -> const CMatrix& { return d.weights[static_cast<std::size_t>(k)]; };
    const CMatrix id = identity(d.T);
    for (int k = 0; k < d.K(); ++k)
        if (!approx_equal(A(k).adjoint() * A(k), id, tol)) return fail("weight " + std::to_string(k + 1) + " is not unitary");
    if (!approx_equal(A(0), id, tol)) return fail("A_1 is not the identity");

    std::vector<int> row, col;
    for (int j = 0; j < g; ++j) row.push_back(j * lambda);
    for (int i = 0; i < lambda; ++i) col.push_back(i);

    for (std::size_t p = 1; p < row.size(); ++p) {
        if (!approx_equal(A(row[p]) * A(row[p]), -id, tol)) return fail("first-row weight " + std::to_string(row[p] + 1) + " does not square to -I");
        for (std::size_t q = p + 1; q < row.size(); ++q)
            if (!is_zero(A(row[p]) * A(row[q]) + A(row[q]) * A(row[p]), tol))
                return fail("first-row weights " + std::to_string(row[p] + 1) + " and " + std::to_string(row[q] + 1) + " do not anticommute");
    }
    for (std::size_t p = 1; p < col.size(); ++p) {
        if (!approx_equal(A(col[p]) * A(col[p]), id, tol)) return fail("first-column weight " + std::to_string(col[p] + 1) + " does not square to I");
        for (int other : row)
            if (!is_zero(A(col[p]) * A(other) - A(other) * A(col[p]), tol))
                return fail("first-column weight " + std::to_string(col[p] + 1) + " does not commute with weight " + std::to_string(other + 1));
        for (int other : col)
            if (!is_zero(A(col[p]) * A(other) - A(other) * A(col[p]), tol))
                return fail("first-column weights " + std::to_string(col[p] + 1) + " and " + std::to_string(other + 1) + " do not commute");
    }
    for (int j = 0; j < g; ++j) {
        for (int i = 0; i < lambda; ++i) {
            const CMatrix prod = A(col[static_cast<std::size_t>(i)]) * A(row[static_cast<std::size_t>(j)]);
            const CMatrix& w = A(j * lambda + i);
            if (approx_equal(w, prod, tol)) rep.product_signs.push_back(1);
            else if (approx_equal(w, -prod, tol)) rep.product_signs.push_back(-1);
            else return fail("weight " + std::to_string(j * lambda + i + 1) + " is not +-(first column) x (first row)");
        }
    }
    rep.ok = true;
    return rep;
}

inline std::string partition_string(const Partition& p) {
    std::ostringstream os;
    for (std::size_t g = 0; g < p.size(); ++g) {
        os << (g ? " " : "") << "{";
        for (std::size_t i = 0; i < p[g].size(); ++i) os << (i ? "," : "") << "x" << p[g][i] + 1;
        os << "}";
    }
    return os.str();
}

}  // namespace cliffstbc
