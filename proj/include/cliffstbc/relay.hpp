#pragma once

// Two-phase amplify-and-forward relaying with distributed space-time codes.
// The source broadcasts sqrt(pi1 P) z, relay j sends
// sqrt(pi2 P / (pi1 P + 1)) B_j r_j (or B_j r_j^*), and the destination sees
// y = sqrt(pi1 pi2 P^2 / (pi1 P + 1)) X h + n.

#include "cliffstbc/codebook.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace cliffstbc {

struct RelayStructure {
    std::vector<CMatrix> B;        // T x T, one per relay (column of the design)
    std::vector<bool> conjugated;  // relay j processes r_j^*
    int M = 0;                     // relays that do not conjugate
};

// z_k = x_{2k-1} + i x_{2k}
inline CVector complex_symbols(const RVector& x) {
    if (x.size() % 2 != 0) throw std::invalid_argument("complex_symbols: odd number of real symbols");
    CVector z(x.size() / 2);
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = cd(x(2 * k), x(2 * k + 1));
    return z;
}

inline RVector real_symbols(const CVector& z) {
    RVector x(2 * z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        x(2 * k) = z(k).real();
        x(2 * k + 1) = z(k).imag();
    }
    return x;
}

// Column c of S(z) must equal B_c z or B_c z^*; anything else means the
// design is not a conjugate design and cannot be run on relays.
inline RelayStructure extract_relay_structure(const LinearSpaceTimeDesign& d, double tol = 1e-12) {
    validate_shape(d);
    if (d.K() != 2 * d.T) throw std::invalid_argument("extract_relay_structure: need K = 2T complex-paired variables");
    RelayStructure rs;
    const int nz = d.K() / 2;
    for (int c = 0; c < d.NT; ++c) {
        bool plain = true, conj = true;
        CMatrix B(d.T, nz);
        for (int k = 0; k < nz; ++k) {
            const CVector re = d.weights[static_cast<std::size_t>(2 * k)].col(c);
            const CVector im = d.weights[static_cast<std::size_t>(2 * k + 1)].col(c);
            plain = plain && max_abs(im - I_UNIT * re) <= tol;
            conj = conj && max_abs(im + I_UNIT * re) <= tol;
            B.col(k) = re;
        }
        if (plain == conj) {
            // Both can only hold for an all-zero column.
            if (plain) throw std::invalid_argument("extract_relay_structure: column " + std::to_string(c + 1) + " is identically zero");
            throw std::invalid_argument("extract_relay_structure: column " + std::to_string(c + 1) + " mixes z and z*, not a conjugate LSTD");
        }
        rs.B.push_back(B);
        rs.conjugated.push_back(conj);
        if (plain) ++rs.M;
    }
    return rs;
}

inline bool check_row_orthogonal(const CMatrix& B, double tol = 1e-12) {
    CMatrix g = B * B.adjoint();
    g.diagonal().setZero();
    return is_zero(g, tol);
}

// Scales every column so that its relay matrix has ||B_j||_F^2 = T.
// Scaling columns leaves conjugate structure and group decodability intact.
inline LinearSpaceTimeDesign normalize_relay_power(const LinearSpaceTimeDesign& d) {
    const RelayStructure rs = extract_relay_structure(d);
    LinearSpaceTimeDesign out = d;
    for (int c = 0; c < d.NT; ++c) {
        const double n2 = rs.B[static_cast<std::size_t>(c)].squaredNorm();
        const double s = std::sqrt(static_cast<double>(d.T) / n2);
        for (auto& w : out.weights) w.col(c) *= s;
    }
    return out;
}

struct RelayNetworkConfig {
    int R = 0;
    int T = 0;
    RelayStructure relays;
    double pi1 = 1.0;
    double pi2 = 0.0;
    double P = 1.0;

    int M() const { return relays.M; }
    double relay_gain() const { return std::sqrt(pi2 * P / (pi1 * P + 1.0)); }
    double noise_scale() const { return pi2 * P / (pi1 * P + 1.0); }
    double signal_amplitude() const { return std::sqrt(pi1 * pi2 * P * P / (pi1 * P + 1.0)); }
};

// pi2 <= 0 selects the default split pi1 = 1, pi2 = 1/R.
inline RelayNetworkConfig make_relay_config(const LinearSpaceTimeDesign& d, double P, double pi1 = 1.0, double pi2 = 0.0,
                                            bool check_norms = true) {
    RelayNetworkConfig cfg;
    cfg.relays = extract_relay_structure(d);
    cfg.R = d.NT;
    cfg.T = d.T;
    cfg.P = P;
    cfg.pi1 = pi1;
    cfg.pi2 = pi2 > 0.0 ? pi2 : 1.0 / cfg.R;
    if (P <= 0.0) throw std::invalid_argument("relay config: power must be positive");
    // pi1 P T + R pi2 P T = 2 P T
    if (std::abs(cfg.pi1 + cfg.R * cfg.pi2 - 2.0) > 1e-12) throw std::invalid_argument("relay config: power split violates pi1 + R pi2 = 2");
    if (check_norms)
        for (const auto& B : cfg.relays.B)
            if (std::abs(B.squaredNorm() - cfg.T) > 1e-9) throw std::invalid_argument("relay config: relay matrix does not satisfy ||B||_F^2 = T");
    return cfg;
}

struct ChannelRealization {
    CVector f;  // source -> relay
    CVector g;  // relay -> destination
};

inline cd complex_normal(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    return {re, n(rng)};
}

inline CVector complex_normal_vector(Eigen::Index n, std::mt19937_64& rng) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal(rng);
    return v;
}

inline ChannelRealization sample_channel(int R, std::mt19937_64& rng) {
    ChannelRealization ch;
    ch.f = complex_normal_vector(R, rng);
    ch.g = complex_normal_vector(R, rng);
    return ch;
}

inline CVector equivalent_channel(const RelayStructure& rs, const ChannelRealization& ch) {
    const Eigen::Index R = static_cast<Eigen::Index>(rs.B.size());
    if (ch.f.size() != R || ch.g.size() != R) throw std::invalid_argument("channel has the wrong number of relays");
    CVector h(R);
    for (Eigen::Index j = 0; j < R; ++j) h(j) = (rs.conjugated[static_cast<std::size_t>(j)] ? std::conj(ch.f(j)) : ch.f(j)) * ch.g(j);
    return h;
}

inline CMatrix noise_covariance(const RelayNetworkConfig& cfg, const ChannelRealization& ch) {
    CMatrix G = identity(cfg.T);
    for (int j = 0; j < cfg.R; ++j) {
        const CMatrix& B = cfg.relays.B[static_cast<std::size_t>(j)];
        G += cfg.noise_scale() * std::norm(ch.g(j)) * (B * B.adjoint());
    }
    return G;
}

// Gamma^{-1/2}; diagonal covariances (row-orthogonal relays) take the closed form.
inline CMatrix whitening_matrix(const CMatrix& Gamma) {
    CMatrix off = Gamma;
    off.diagonal().setZero();
    if (is_zero(off, 0.0)) {
        CVector d(Gamma.rows());
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (Gamma(i, i).real() <= 0.0) throw std::domain_error("covariance is not positive definite");
            d(i) = 1.0 / std::sqrt(Gamma(i, i).real());
        }
        return d.asDiagonal();
    }
    return inverse_sqrt_hermitian(Gamma);
}

// Runs both phases sample by sample. Passing rng == nullptr zeroes all noise.
inline CVector simulate_two_phase(const RelayNetworkConfig& cfg, const CVector& z, const ChannelRealization& ch,
                                  std::mt19937_64* rng) {
    if (z.size() != cfg.T) throw std::invalid_argument("simulate_two_phase: source vector has the wrong length");
    if (ch.f.size() != cfg.R || ch.g.size() != cfg.R) throw std::invalid_argument("simulate_two_phase: channel has the wrong number of relays");
    const double src = std::sqrt(cfg.pi1 * cfg.P);
    CVector y = CVector::Zero(cfg.T);
    for (int j = 0; j < cfg.R; ++j) {
        CVector r = src * ch.f(j) * z;
        if (rng) r += complex_normal_vector(cfg.T, *rng);
        if (cfg.relays.conjugated[static_cast<std::size_t>(j)]) r = r.conjugate().eval();
        const CVector t = cfg.relay_gain() * (cfg.relays.B[static_cast<std::size_t>(j)] * r);
        y += ch.g(j) * t;
    }
    if (rng) y += complex_normal_vector(cfg.T, *rng);
    return y;
}

inline bool check_multigroup_condition(const LinearSpaceTimeDesign& d, const CMatrix& Gamma, double tol = 1e-10) {
    validate_partition(d.partition, d.K());
    const CMatrix Gi = Gamma.inverse();
    for (std::size_t a = 0; a < d.partition.size(); ++a)
        for (std::size_t b = a + 1; b < d.partition.size(); ++b)
            for (int i : d.partition[a])
                for (int j : d.partition[b]) {
                    const CMatrix& Ai = d.weights[static_cast<std::size_t>(i)];
                    const CMatrix& Aj = d.weights[static_cast<std::size_t>(j)];
                    if (!is_zero(Ai.adjoint() * Gi * Aj + Aj.adjoint() * Gi * Ai, tol)) return false;
                }
    return true;
}

// Whitened per-group received contributions sqrt(...) Gamma^{-1/2} X_g(p) h,
// shared by both decoders.
struct WhitenedModel {
    CVector y;                                // Gamma^{-1/2} y
    std::vector<std::vector<CVector>> parts;  // [group][point]
};

inline WhitenedModel whiten_model(const CVector& y, const StbcCodebook& cb, const CMatrix& W, const CVector& h, double amplitude) {
    WhitenedModel m;
    m.y = W * y;
    m.parts.resize(static_cast<std::size_t>(cb.groups()));
    for (int g = 0; g < cb.groups(); ++g)
        for (std::size_t p = 0; p < cb.signal_sets()[static_cast<std::size_t>(g)].size(); ++p)
            m.parts[static_cast<std::size_t>(g)].push_back(amplitude * (W * (cb.group_codeword(g, p) * h)));
    return m;
}

inline std::size_t ml_decode_full(const WhitenedModel& m, const StbcCodebook& cb) {
    if (cb.size() == 0) throw std::invalid_argument("ml_decode_full: empty codebook");
    std::size_t best = 0;
    double best_metric = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < cb.size(); ++idx) {
        const auto parts = cb.split_index(idx);
        CVector r = m.y;
        for (std::size_t g = 0; g < parts.size(); ++g) r -= m.parts[g][parts[g]];
        const double metric = r.squaredNorm();
        if (metric < best_metric) {
            best_metric = metric;
            best = idx;
        }
    }
    return best;
}

// Group g alone: argmin ||y~ - u_{g,p}||^2, valid once cross terms vanish.
inline std::size_t ml_decode_groups(const WhitenedModel& m, const StbcCodebook& cb) {
    std::vector<std::size_t> parts(static_cast<std::size_t>(cb.groups()), 0);
    for (std::size_t g = 0; g < parts.size(); ++g) {
        double best_metric = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < m.parts[g].size(); ++p) {
            const double metric = (m.y - m.parts[g][p]).squaredNorm();
            if (metric < best_metric) {
                best_metric = metric;
                parts[g] = p;
            }
        }
    }
    return cb.join_index(parts);
}

// Convenience front-ends that build the whitened model from the channel.
inline WhitenedModel relay_model(const CVector& y, const StbcCodebook& cb, const RelayNetworkConfig& cfg, const ChannelRealization& ch,
                                 CMatrix* gamma_out = nullptr) {
    const CMatrix G = noise_covariance(cfg, ch);
    if (gamma_out) *gamma_out = G;
    return whiten_model(y, cb, whitening_matrix(G), equivalent_channel(cfg.relays, ch), cfg.signal_amplitude());
}

inline std::size_t ml_decode_full(const CVector& y, const StbcCodebook& cb, const RelayNetworkConfig& cfg, const ChannelRealization& ch) {
    return ml_decode_full(relay_model(y, cb, cfg, ch), cb);
}

inline std::size_t ml_decode_groups(const CVector& y, const StbcCodebook& cb, const RelayNetworkConfig& cfg, const ChannelRealization& ch) {
    CMatrix G;
    const WhitenedModel m = relay_model(y, cb, cfg, ch, &G);
    if (!check_multigroup_condition(cb.design(), G))
        throw std::invalid_argument("ml_decode_groups: design is not group decodable under this noise covariance");
    return ml_decode_groups(m, cb);
}

}  // namespace cliffstbc
