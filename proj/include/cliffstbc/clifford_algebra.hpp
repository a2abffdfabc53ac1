#pragma once

// Extended Clifford algebra A_n^L, L = 2^a, generated over the reals by
// gamma_1..gamma_n and delta_1..delta_a with
//   gamma_k^2 = -1, gamma_k gamma_j = -gamma_j gamma_k (k != j),
//   delta_k^2 = +1, delta_k central.
// A basis monomial is stored as a pair of bit masks; its canonical word puts
// the gammas first, then the deltas, each in ascending index order.

#include "cliffstbc/core.hpp"

#include <bit>
#include <optional>
#include <string>
#include <vector>

namespace cliffstbc {

struct AlgebraSignature {
    int n = 0;  // number of gamma generators
    int a = 0;  // number of delta generators, L = 2^a

    AlgebraSignature() = default;
    AlgebraSignature(int n_, int a_) : n(n_), a(a_) {
        if (n < 0 || a < 0) throw std::invalid_argument("AlgebraSignature: negative generator count");
        if (n + a > 20) throw std::invalid_argument("AlgebraSignature: algebra too large");
    }
    int L() const { return 1 << a; }
    int dimension() const { return 1 << (n + a); }
    bool operator==(const AlgebraSignature&) const = default;
};

struct BasisMonomial {
    std::uint32_t gamma = 0;
    std::uint32_t delta = 0;

    bool operator==(const BasisMonomial&) const = default;
    int index(const AlgebraSignature& s) const { return static_cast<int>(gamma | (delta << s.n)); }
    static BasisMonomial from_index(const AlgebraSignature& s, int idx) {
        const std::uint32_t u = static_cast<std::uint32_t>(idx);
        return {u & ((1u << s.n) - 1u), u >> s.n};
    }
};

struct SignedMonomial {
    int sign = 1;
    BasisMonomial m;
    bool operator==(const SignedMonomial&) const = default;
};

inline BasisMonomial gamma(int k) { return {1u << (k - 1), 0u}; }
inline BasisMonomial delta(int k) { return {0u, 1u << (k - 1)}; }
inline BasisMonomial unit_monomial() { return {0u, 0u}; }

inline void check_monomial(const AlgebraSignature& s, const BasisMonomial& m) {
    if ((m.gamma >> s.n) != 0u || (m.delta >> s.a) != 0u)
        throw std::invalid_argument("monomial uses a generator outside the algebra");
}

inline SignedMonomial monomial_product(const AlgebraSignature& s, const BasisMonomial& x, const BasisMonomial& y) {
    check_monomial(s, x);
    check_monomial(s, y);
    // Moving each gamma of y leftwards past the higher-indexed gammas of x.
    int swaps = 0;
    for (std::uint32_t rest = y.gamma; rest != 0u; rest &= rest - 1u) {
        const int j = std::countr_zero(rest);
        swaps += std::popcount(x.gamma >> (j + 1));
    }
    swaps += std::popcount(x.gamma & y.gamma);  // gamma_k^2 = -1
    return {(swaps & 1) ? -1 : 1, {x.gamma ^ y.gamma, x.delta ^ y.delta}};
}

inline SignedMonomial signed_product(const AlgebraSignature& s, const SignedMonomial& x, const SignedMonomial& y) {
    SignedMonomial p = monomial_product(s, x.m, y.m);
    p.sign *= x.sign * y.sign;
    return p;
}

inline SignedMonomial monomial_inverse(const AlgebraSignature& s, const SignedMonomial& x) {
    check_monomial(s, x.m);
    const int m = std::popcount(x.m.gamma);
    const int flip = (m + 1) / 2;  // reversing the word and inverting each gamma
    return {(flip & 1) ? -x.sign : x.sign, x.m};
}

inline bool monomials_commute(const AlgebraSignature& s, const BasisMonomial& x, const BasisMonomial& y) {
    return monomial_product(s, x, y).sign == monomial_product(s, y, x).sign;
}

inline std::string to_string(const BasisMonomial& m) {
    std::string out;
    for (int k = 0; k < 32; ++k)
        if (m.gamma & (1u << k)) out += "g" + std::to_string(k + 1);
    for (int k = 0; k < 32; ++k)
        if (m.delta & (1u << k)) out += "d" + std::to_string(k + 1);
    return out.empty() ? "1" : out;
}

inline std::string to_string(const SignedMonomial& m) { return (m.sign < 0 ? "-" : "") + to_string(m.m); }

// The finite group of signed basis monomials, ordered by (monomial index, sign).
inline std::vector<SignedMonomial> group_elements(const AlgebraSignature& s) {
    std::vector<SignedMonomial> out;
    out.reserve(2 * static_cast<std::size_t>(s.dimension()));
    for (int i = 0; i < s.dimension(); ++i) {
        out.push_back({1, BasisMonomial::from_index(s, i)});
        out.push_back({-1, BasisMonomial::from_index(s, i)});
    }
    return out;
}

// Dense real-coefficient element of the algebra.
class AlgebraElement {
public:
    explicit AlgebraElement(AlgebraSignature s) : sig_(s), c_(static_cast<std::size_t>(s.dimension()), 0.0) {}
    AlgebraElement(AlgebraSignature s, const SignedMonomial& m) : AlgebraElement(s) {
        check_monomial(s, m.m);
        c_[static_cast<std::size_t>(m.m.index(s))] = m.sign;
    }

    const AlgebraSignature& signature() const { return sig_; }
    double coeff(const BasisMonomial& m) const { return c_[static_cast<std::size_t>(m.index(sig_))]; }
    double& coeff(const BasisMonomial& m) { return c_[static_cast<std::size_t>(m.index(sig_))]; }
    const std::vector<double>& coefficients() const { return c_; }

    AlgebraElement& operator+=(const AlgebraElement& o) {
        require_same(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    friend AlgebraElement operator+(AlgebraElement x, const AlgebraElement& y) { return x += y; }
    friend AlgebraElement operator*(double k, AlgebraElement x) {
        for (double& v : x.c_) v *= k;
        return x;
    }
    friend AlgebraElement operator*(const AlgebraElement& x, const AlgebraElement& y) {
        x.require_same(y);
        AlgebraElement out(x.sig_);
        const int d = x.sig_.dimension();
        for (int i = 0; i < d; ++i) {
            if (x.c_[i] == 0.0) continue;
            for (int j = 0; j < d; ++j) {
                if (y.c_[j] == 0.0) continue;
                const SignedMonomial p = monomial_product(x.sig_, BasisMonomial::from_index(x.sig_, i),
                                                          BasisMonomial::from_index(x.sig_, j));
                out.c_[static_cast<std::size_t>(p.m.index(x.sig_))] += p.sign * x.c_[i] * y.c_[j];
            }
        }
        return out;
    }
    double max_abs_diff(const AlgebraElement& o) const {
        require_same(o);
        double m = 0.0;
        for (std::size_t i = 0; i < c_.size(); ++i) m = std::max(m, std::abs(c_[i] - o.c_[i]));
        return m;
    }

private:
    void require_same(const AlgebraElement& o) const {
        if (!(sig_ == o.sig_)) throw std::invalid_argument("AlgebraElement: signature mismatch");
    }
    AlgebraSignature sig_;
    std::vector<double> c_;
};

inline bool anticommutes_with_gamma1(const AlgebraSignature& s, const BasisMonomial& b) {
    if (s.n < 1) throw std::invalid_argument("algebra has no gamma_1");
    return !monomials_commute(s, b, gamma(1));
}

// Matrix of the left multiplication y -> x y on the algebra viewed as a right
// vector space over C = span{1, gamma_1}. Column j holds the coordinates of
// x * b_j; a coordinate c = re + im*i stands for b_l * (re + gamma_1 im).
inline CMatrix left_regular_repr(const AlgebraElement& x, const std::vector<BasisMonomial>& basis_order) {
    const AlgebraSignature& s = x.signature();
    if (s.n < 1) throw std::invalid_argument("left_regular_repr: needs at least one gamma generator");
    const std::size_t m = static_cast<std::size_t>(s.dimension() / 2);
    if (basis_order.size() != m) throw std::invalid_argument("left_regular_repr: basis has wrong size");

    // coord[q] = (l, c) with monomial q equal to b_l * c.
    std::vector<std::optional<std::pair<std::size_t, cd>>> coord(static_cast<std::size_t>(s.dimension()));
    for (std::size_t l = 0; l < m; ++l) {
        check_monomial(s, basis_order[l]);
        const SignedMonomial bg = monomial_product(s, basis_order[l], gamma(1));
        const std::size_t q0 = static_cast<std::size_t>(basis_order[l].index(s));
        const std::size_t q1 = static_cast<std::size_t>(bg.m.index(s));
        if (coord[q0] || coord[q1]) throw std::invalid_argument("left_regular_repr: basis_order is not a basis over C");
        coord[q0] = std::make_pair(l, cd{1.0, 0.0});
        coord[q1] = std::make_pair(l, cd{0.0, static_cast<double>(bg.sign)});
    }

    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    const auto& c = x.coefficients();
    for (std::size_t j = 0; j < m; ++j) {
        for (int q = 0; q < s.dimension(); ++q) {
            if (c[static_cast<std::size_t>(q)] == 0.0) continue;
            const SignedMonomial p = monomial_product(s, BasisMonomial::from_index(s, q), basis_order[j]);
            const auto& [l, unit] = *coord[static_cast<std::size_t>(p.m.index(s))];
            out(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) += c[static_cast<std::size_t>(q)] * p.sign * unit;
        }
    }
    return out;
}

inline CMatrix left_regular_repr(const AlgebraSignature& s, const SignedMonomial& m,
                                 const std::vector<BasisMonomial>& basis_order) {
    return left_regular_repr(AlgebraElement(s, m), basis_order);
}

// All monomials in the deltas, ordered by bit mask: 1, d1, d2, d1d2, d3, ...
inline std::vector<BasisMonomial> delta_monomials(const AlgebraSignature& s) {
    std::vector<BasisMonomial> out;
    for (std::uint32_t d = 0; d < (1u << s.a); ++d) out.push_back({0u, d});
    return out;
}

// Locates +-m in a table whose (i, j) cell is first_col[i] * first_row[j].
inline std::optional<std::pair<int, int>> table_position(const AlgebraSignature& s, const BasisMonomial& m,
                                                        const std::vector<BasisMonomial>& first_row,
                                                        const std::vector<BasisMonomial>& first_col) {
    for (std::size_t i = 0; i < first_col.size(); ++i)
        for (std::size_t j = 0; j < first_row.size(); ++j)
            if (monomial_product(s, first_col[i], first_row[j]).m == m)
                return std::make_pair(static_cast<int>(i), static_cast<int>(j));
    return std::nullopt;
}

}  // namespace cliffstbc
