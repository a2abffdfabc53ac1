#pragma once

// Named design constructions: maximal-rate CUWDs, ABBA, tensor-product CUWDs,
// precoded CIODs, designs from the left regular representation of A_2^L and
// A_3^L, and a handful of classical reference designs.

#include "cliffstbc/clifford_algebra.hpp"
#include "cliffstbc/design.hpp"
#include "cliffstbc/template.hpp"

#include <bit>
#include <cmath>

namespace cliffstbc {

namespace detail {

inline CMatrix mat2(cd a, cd b, cd c, cd d) {
    CMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}
// sigma_1 is taken as [[0,-1],[1,0]] so that g = 4 gives the Alamouti weights
// x1 I + x2 (i sigma_3) + x3 sigma_1 + x4 sigma_2 with the usual signs.
inline CMatrix sigma1() { return mat2(0.0, -1.0, 1.0, 0.0); }
inline CMatrix sigma2() { return mat2(0.0, I_UNIT, I_UNIT, 0.0); }
inline CMatrix sigma3() { return mat2(1.0, 0.0, 0.0, -1.0); }

inline CMatrix kron_power(const CMatrix& m, int times) {
    CMatrix out = identity(1);
    for (int i = 0; i < times; ++i) out = kron(out, m);
    return out;
}

// delta_j (1-based) among a deltas: I_{2^{a-j}} (x) diag(1,-1) (x) I_{2^{j-1}}.
inline CMatrix delta_diagonal(int a, int j) {
    return kron(kron(identity(1 << (a - j)), sigma3()), identity(1 << (j - 1)));
}

inline CMatrix delta_monomial_matrix(int a, std::uint32_t mask) {
    CMatrix out = identity(1 << a);
    for (int j = 1; j <= a; ++j)
        if (mask & (1u << (j - 1))) out = out * delta_diagonal(a, j);
    return out;
}

}  // namespace detail

// g-1 pairwise anticommuting unitary matrices squaring to -I, of size
// 2^floor((g-1)/2): gamma_1 = +-i s3^(x)m, gamma_2k = I^(x)(m-k) s1 s3^(x)(k-1),
// gamma_2k+1 = I^(x)(m-k) s2 s3^(x)(k-1).
inline std::vector<CMatrix> clifford_generator_matrices(int g, int gamma1_sign = 1) {
    if (g < 1) throw std::invalid_argument("clifford_generator_matrices: g must be at least 1");
    if (gamma1_sign != 1 && gamma1_sign != -1) throw std::invalid_argument("clifford_generator_matrices: sign must be +-1");
    const int m = (g - 1) / 2;
    std::vector<CMatrix> out;
    if (g == 1) return out;
    out.push_back(static_cast<double>(gamma1_sign) * I_UNIT * detail::kron_power(detail::sigma3(), m));
    for (int k = 1; k <= m; ++k) {
        const CMatrix left = identity(1 << (m - k));
        const CMatrix right = detail::kron_power(detail::sigma3(), k - 1);
        out.push_back(kron(kron(left, detail::sigma1()), right));
        out.push_back(kron(kron(left, detail::sigma2()), right));
    }
    out.resize(static_cast<std::size_t>(g - 1));
    return out;
}

// Layout shared by the CUWD-style constructions: weight (j, i) = col_i * row_j
// stored at index j * lambda + i, one group per first-row matrix.
inline LinearSpaceTimeDesign product_table_design(std::string name, const std::vector<CMatrix>& first_col,
                                                  const std::vector<CMatrix>& first_row) {
    LinearSpaceTimeDesign d;
    d.name = std::move(name);
    d.T = static_cast<int>(first_col.front().rows());
    d.NT = d.T;
    for (const auto& r : first_row)
        for (const auto& c : first_col) d.weights.push_back(c * r);
    d.partition = contiguous_partition(d.K(), static_cast<int>(first_col.size()));
    return d;
}

inline LinearSpaceTimeDesign construct_max_rate_cuwd(int a, int g, int gamma1_sign = 1) {
    if (a < 0 || g < 1) throw std::invalid_argument("construct_max_rate_cuwd: need a >= 0 and g >= 1");
    if (a > 10) throw std::invalid_argument("construct_max_rate_cuwd: a too large");
    const std::vector<CMatrix> gens = clifford_generator_matrices(g, gamma1_sign);
    const Eigen::Index s = gens.empty() ? 1 : gens.front().rows();
    std::vector<CMatrix> first_row{identity((1 << a) * s)};
    for (const auto& r : gens) first_row.push_back(kron(identity(1 << a), r));
    std::vector<CMatrix> first_col;
    for (std::uint32_t mask = 0; mask < (1u << a); ++mask)
        first_col.push_back(kron(detail::delta_monomial_matrix(a, mask), identity(s)));
    return product_table_design("max-rate-cuwd(a=" + std::to_string(a) + ",g=" + std::to_string(g) + ")", first_col, first_row);
}

// lambda linearly independent +-1 diagonals, the first one the identity.
inline std::vector<RVector> independent_sign_diagonals(int lambda) {
    if (lambda < 1) throw std::invalid_argument("independent_sign_diagonals: lambda must be positive");
    std::vector<RVector> out;
    if (std::has_single_bit(static_cast<unsigned>(lambda))) {
        for (int r = 0; r < lambda; ++r) {
            RVector v(lambda);
            for (int c = 0; c < lambda; ++c) v(c) = (std::popcount(static_cast<unsigned>(r & c)) & 1) ? -1.0 : 1.0;
            out.push_back(v);
        }
        return out;
    }
    if (lambda > 24) throw std::invalid_argument("independent_sign_diagonals: lambda too large for greedy search");
    RMatrix basis(lambda, 0);
    for (std::uint32_t bits = 0; bits < (1u << (lambda - 1)) && static_cast<int>(out.size()) < lambda; ++bits) {
        RVector v = RVector::Ones(lambda);
        for (int k = 0; k < lambda - 1; ++k)
            if (bits & (1u << k)) v(k + 1) = -1.0;
        RMatrix trial(lambda, basis.cols() + 1);
        trial << basis, v;
        if (numeric_rank(trial) == trial.cols()) {
            basis = trial;
            out.push_back(v);
        }
    }
    if (static_cast<int>(out.size()) != lambda) throw std::runtime_error("independent_sign_diagonals: search failed");
    return out;
}

inline LinearSpaceTimeDesign construct_tensor_cuwd(int lambda, int g, int gamma1_sign = 1) {
    if (g < 1) throw std::invalid_argument("construct_tensor_cuwd: g must be at least 1");
    const std::vector<CMatrix> gens = clifford_generator_matrices(g, gamma1_sign);
    const Eigen::Index s = gens.empty() ? 1 : gens.front().rows();
    std::vector<CMatrix> first_col;
    for (const RVector& v : independent_sign_diagonals(lambda)) first_col.push_back(kron(CMatrix(v.cast<cd>().asDiagonal()), identity(s)));
    std::vector<CMatrix> first_row{identity(lambda * s)};
    for (const auto& r : gens) first_row.push_back(kron(identity(lambda), r));
    return product_table_design("tensor-cuwd(lambda=" + std::to_string(lambda) + ",g=" + std::to_string(g) + ")", first_col, first_row);
}

enum class AbbaGrouping { per_column, paired_in_block };

// L x L block pattern with block (r, c) = c_{r xor c}, each c_i a square OD
// x_{i,0} I + sum_j x_{i,j} R(gamma_j) in n+1 real variables.
inline LinearSpaceTimeDesign construct_abba(int n, int a, AbbaGrouping grouping = AbbaGrouping::per_column) {
    if (n < 1 || a < 0) throw std::invalid_argument("construct_abba: need n >= 1 and a >= 0");
    const int L = 1 << a;
    const std::vector<CMatrix> gens = clifford_generator_matrices(n + 1);
    const Eigen::Index s = gens.front().rows();
    std::vector<CMatrix> od{identity(s)};
    od.insert(od.end(), gens.begin(), gens.end());

    LinearSpaceTimeDesign d;
    d.name = "abba(n=" + std::to_string(n) + ",a=" + std::to_string(a) + ")";
    d.T = d.NT = static_cast<int>(L * s);
    for (int i = 0; i < L; ++i) {
        CMatrix perm = CMatrix::Zero(L, L);
        for (int r = 0; r < L; ++r) perm(r, r ^ i) = 1.0;
        for (const auto& w : od) d.weights.push_back(kron(perm, w));
    }
    const int per_block = n + 1;
    if (grouping == AbbaGrouping::per_column) {
        for (int j = 0; j < per_block; ++j) {
            std::vector<int> grp;
            for (int i = 0; i < L; ++i) grp.push_back(i * per_block + j);
            d.partition.push_back(grp);
        }
    } else {
        if (per_block % 2 != 0) throw std::invalid_argument("construct_abba: in-block pairing needs an even block size");
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < per_block; j += 2) d.partition.push_back({i * per_block + j, i * per_block + j + 1});
    }
    return d;
}

// Block-diagonal Alamouti blocks; odd R drops the last column of the R+1 design.
inline LinearSpaceTimeDesign construct_pciod(int R) {
    if (R < 2) throw std::invalid_argument("construct_pciod: needs at least 2 relays");
    const int Re = R + (R % 2);
    const int blocks = Re / 2;
    const std::vector<CMatrix> ala{identity(2), I_UNIT * detail::sigma3(), detail::sigma1(), detail::sigma2()};
    LinearSpaceTimeDesign d;
    d.name = "pciod(" + std::to_string(R) + ")";
    d.T = Re;
    d.NT = R;
    for (int b = 0; b < blocks; ++b) {
        CMatrix sel = CMatrix::Zero(blocks, blocks);
        sel(b, b) = 1.0;
        for (const auto& w : ala) d.weights.push_back(kron(sel, w).leftCols(R));
    }
    d.partition.assign(4, {});
    for (int k = 0; k < d.K(); ++k) d.partition[static_cast<std::size_t>(k % 4)].push_back(k);
    return d;
}

// Design in complex variables z_k = x_{2k-1} + i x_{2k} from the left regular
// representation of x = sum_k m_k z_k, with m_k = basis[k]. The partition
// groups variables by the column of a CUWD table (first_col[i] * first_row[j]).
inline LinearSpaceTimeDesign design_from_left_regular(std::string name, const AlgebraSignature& sig,
                                                      const std::vector<BasisMonomial>& basis,
                                                      const std::vector<BasisMonomial>& first_row,
                                                      const std::vector<BasisMonomial>& first_col) {
    LinearSpaceTimeDesign d;
    d.name = std::move(name);
    d.T = d.NT = static_cast<int>(basis.size());
    std::vector<BasisMonomial> var_mono;
    for (const auto& m : basis) {
        var_mono.push_back(m);
        const SignedMonomial mg = monomial_product(sig, m, gamma(1));
        var_mono.push_back(mg.m);
        d.weights.push_back(left_regular_repr(sig, {1, m}, basis));
        d.weights.push_back(left_regular_repr(sig, mg, basis));
    }
    std::vector<std::vector<std::pair<int, int>>> cells(first_row.size());
    for (int k = 0; k < d.K(); ++k) {
        const auto pos = table_position(sig, var_mono[static_cast<std::size_t>(k)], first_row, first_col);
        if (!pos) throw std::invalid_argument("design_from_left_regular: variable outside the table");
        cells[static_cast<std::size_t>(pos->second)].push_back({pos->first, k});
    }
    for (auto& col : cells) {
        std::sort(col.begin(), col.end());
        std::vector<int> grp;
        for (const auto& [row, k] : col) grp.push_back(k);
        d.partition.push_back(grp);
    }
    return d;
}

// 2^{a+1} relays from A_2^{2^a}; basis 1, d1, d2, d1d2, ..., then the same times gamma_2.
inline LinearSpaceTimeDesign construct_eca_a2(int a) {
    if (a < 0 || a > 6) throw std::invalid_argument("construct_eca_a2: a out of range");
    const AlgebraSignature sig(2, a);
    std::vector<BasisMonomial> basis = delta_monomials(sig);
    const std::size_t nd = basis.size();
    for (std::size_t i = 0; i < nd; ++i) basis.push_back({gamma(2).gamma, basis[i].delta});
    const std::vector<BasisMonomial> row{unit_monomial(), gamma(1), gamma(2), {0b11u, 0u}};
    return design_from_left_regular("eca-a2(" + std::to_string(2 * nd) + ")", sig, basis, row, delta_monomials(sig));
}

// 2^{a+2} relays from A_3^{2^a}; basis 1, g2, g3, g2g3, then the same times d1, d2, ...
inline LinearSpaceTimeDesign construct_eca_a3(int a) {
    if (a < 0 || a > 6) throw std::invalid_argument("construct_eca_a3: a out of range");
    const AlgebraSignature sig(3, a);
    std::vector<BasisMonomial> basis;
    for (const auto& dm : delta_monomials(sig))
        for (std::uint32_t gm : {0b000u, 0b010u, 0b100u, 0b110u}) basis.push_back({gm, dm.delta});
    const std::vector<BasisMonomial> row{unit_monomial(), gamma(1), gamma(2), gamma(3)};
    std::vector<BasisMonomial> col;
    for (const auto& dm : delta_monomials(sig)) {
        col.push_back(dm);
        col.push_back({0b111u, dm.delta});
    }
    return design_from_left_regular("eca-a3(" + std::to_string(basis.size()) + ")", sig, basis, row, col);
}

inline LinearSpaceTimeDesign permute_variables(const LinearSpaceTimeDesign& d, const std::vector<int>& order) {
    if (static_cast<int>(order.size()) != d.K()) throw std::invalid_argument("permute_variables: wrong order length");
    LinearSpaceTimeDesign out = d;
    std::vector<int> where(order.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.weights[i] = d.weights[static_cast<std::size_t>(order[i])];
        where[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    }
    for (auto& grp : out.partition)
        for (int& v : grp) v = where[static_cast<std::size_t>(v)];
    return out;
}

// Reorders variables so that each group is contiguous, keeping group order.
inline LinearSpaceTimeDesign group_contiguous(const LinearSpaceTimeDesign& d) {
    std::vector<int> order;
    for (const auto& grp : d.partition) order.insert(order.end(), grp.begin(), grp.end());
    return permute_variables(d, order);
}

inline LinearSpaceTimeDesign alamouti_design() {
    LinearSpaceTimeDesign d = construct_max_rate_cuwd(0, 4);
    d.name = "alamouti";
    return d;
}

inline LinearSpaceTimeDesign golden_code_design() {
    const double th = (1.0 + std::sqrt(5.0)) / 2.0;
    const double thb = (1.0 - std::sqrt(5.0)) / 2.0;
    const cd al{1.0, 1.0 - th};
    const cd alb{1.0, 1.0 - thb};
    LinearSpaceTimeDesign d;
    d.name = "golden";
    d.T = d.NT = 2;
    // (z_a + z_b theta) on the diagonal, (z_c + z_d theta) off the diagonal.
    const cd scale[2] = {1.0, I_UNIT};
    for (int k = 0; k < 4; ++k) {
        for (int part = 0; part < 2; ++part) {
            const cd s = scale[part];
            const bool with_theta = (k % 2) == 1;
            const cd t = with_theta ? cd{th} : cd{1.0};
            const cd tb = with_theta ? cd{thb} : cd{1.0};
            CMatrix w = CMatrix::Zero(2, 2);
            if (k < 2) {
                w(0, 0) = s * al * t;
                w(1, 1) = s * alb * tb;
            } else {
                w(0, 1) = s * al * t;
                w(1, 0) = I_UNIT * s * alb * tb;
            }
            d.weights.push_back(w);
        }
    }
    d.partition = singleton_partition(8);
    return d;
}

inline LinearSpaceTimeDesign od_rate_three_halves() {
    return design_from_template("od-4x4-rate-3/2",
                                "x1+ix2, -x3+ix4, -x5+ix6, 0;"
                                "x3+ix4, x1-ix2, 0, -x5+ix6;"
                                "x5+ix6, 0, x1-ix2, x3-ix4;"
                                "0, x5+ix6, -x3-ix4, x1+ix2");
}

// 4x4 orthogonal design in z1..z3; its last two columns mix z and z*.
inline LinearSpaceTimeDesign od_4x4_complex() {
    return design_from_template("od-4x4-complex",
                                "z1, -z2*, -z3*, 0;"
                                "z2, z1*, 0, -z3*;"
                                "z3, 0, z1*, z2*;"
                                "0, z3, -z2, z1");
}

// Conjugate design whose row structure admits no consistent time-reversal assignment.
inline LinearSpaceTimeDesign row_structure_counterexample() {
    return design_from_template("row-structure-counterexample",
                                "z1, z2, -z3*, -z4*;"
                                "z2, z3, -z4*, -z1*;"
                                "z3, z4, z1*, z2*;"
                                "z4, z1, z2*, z3*");
}

inline Partition single_group(int K) {
    Partition p(1);
    for (int i = 0; i < K; ++i) p[0].push_back(i);
    return p;
}

// Cyclic field-extension design; decoded jointly over all variables.
inline LinearSpaceTimeDesign field_extension_design() {
    LinearSpaceTimeDesign d = design_from_template("field-extension-4",
                                                   "z1, iz4, iz3, iz2;"
                                                   "z2, z1, iz4, iz3;"
                                                   "z3, z2, z1, iz4;"
                                                   "z4, z3, z2, z1");
    d.partition = single_group(d.K());
    return d;
}

inline LinearSpaceTimeDesign single_relay_design() {
    LinearSpaceTimeDesign d = design_from_template("single-relay", "z1");
    d.partition = single_group(d.K());
    return d;
}

}  // namespace cliffstbc
