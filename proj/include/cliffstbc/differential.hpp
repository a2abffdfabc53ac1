#pragma once

// Differential encoding on top of the relay schemes. Per subcarrier the source
// sends a^t = (1/b_{t-1}) C_t a^{t-1}, a^0 = (sqrt(R), 0, ..., 0), with
// C^H C = b^2 I. When every codeword satisfies C B_i = B_i C (plain relays)
// and C B_i = B_i C^* (conjugating relays), the destination sees
// y^t = (1/b_{t-1}) C_t y^{t-1} + noise and needs no channel knowledge.

#include "cliffstbc/constructions.hpp"
#include "cliffstbc/ofdm.hpp"

#include <optional>

namespace cliffstbc {

// b with C^H C = b^2 I, or nothing if C is not a scaled unitary matrix.
inline std::optional<double> scaled_unitary_factor(const CMatrix& C, double tol = 1e-12) {
    if (C.rows() != C.cols() || C.rows() == 0) return std::nullopt;
    const CMatrix G = C.adjoint() * C;
    const double b2 = G(0, 0).real();
    if (b2 <= tol) return std::nullopt;
    if (!approx_equal(G, b2 * identity(C.rows()), tol * std::max(1.0, b2))) return std::nullopt;
    return std::sqrt(b2);
}

inline CVector differential_encode(const CMatrix& C, const CVector& a_prev, double b_prev) {
    if (!scaled_unitary_factor(C)) throw std::invalid_argument("differential_encode: codeword is not scaled unitary");
    if (C.cols() != a_prev.size()) throw std::invalid_argument("differential_encode: dimension mismatch");
    if (b_prev <= 0.0) throw std::invalid_argument("differential_encode: b must be positive");
    return (C * a_prev) / b_prev;
}

inline CVector differential_initial_vector(int R) {
    CVector a = CVector::Zero(R);
    a(0) = std::sqrt(static_cast<double>(R));
    return a;
}

inline bool check_commutation(const std::vector<CMatrix>& codewords, const RelayStructure& rs, double tol = 1e-12) {
    for (const auto& C : codewords)
        for (std::size_t i = 0; i < rs.B.size(); ++i) {
            const CMatrix& B = rs.B[i];
            if (C.cols() != B.rows() || C.rows() != B.rows()) return false;
            const CMatrix rhs = rs.conjugated[i] ? CMatrix(B * C.conjugate()) : CMatrix(B * C);
            if (!approx_equal(C * B, rhs, tol)) return false;
        }
    return true;
}

inline bool check_commutation(const StbcCodebook& cb, const RelayStructure& rs, double tol = 1e-12) {
    std::vector<CMatrix> all;
    all.reserve(cb.size());
    for (std::size_t i = 0; i < cb.size(); ++i) all.push_back(cb.codeword(i));
    return check_commutation(all, rs, tol);
}

// The four points {(+-1/sqrt 3, 0), (0, +-sqrt(5/3))}: one coordinate is always
// zero, which removes the within-group cross terms from C^H C.
inline SignalSet differential_signal_set() {
    SignalSet s;
    s.dim = 2;
    s.label = "diff-4";
    const double a = 1.0 / std::sqrt(3.0), b = std::sqrt(5.0 / 3.0);
    for (const auto& [x, y] : {std::pair{a, 0.0}, std::pair{-a, 0.0}, std::pair{0.0, b}, std::pair{0.0, -b}}) {
        RVector p(2);
        p << x, y;
        s.points.push_back(p);
    }
    return s;
}

// (1/2) times the A_2^2 design with one differential set per group: 256
// scaled unitary codewords with b^2 = (1/4) sum_i x_i^2 and E[b^2] = 1.
inline StbcCodebook differential_codebook_eca4() {
    LinearSpaceTimeDesign d = construct_eca_a2(1);
    d.name = "diff-eca4";
    for (auto& w : d.weights) w *= 0.5;
    return StbcCodebook(d, std::vector<SignalSet>(4, differential_signal_set()));
}

// Per-codeword b, throwing if any codeword is not scaled unitary.
inline std::vector<double> codebook_scale_factors(const StbcCodebook& cb) {
    std::vector<double> b;
    b.reserve(cb.size());
    for (std::size_t i = 0; i < cb.size(); ++i) {
        const auto f = scaled_unitary_factor(cb.codeword(i), 1e-10);
        if (!f) throw std::invalid_argument("codebook: codeword " + std::to_string(i) + " is not scaled unitary");
        b.push_back(*f);
    }
    return b;
}

// argmin_C || y - (1/b_prev) C y_prev ||^2 over the whole codebook.
inline std::size_t differential_decode_full(const CVector& y, const CVector& y_prev, double b_prev, const StbcCodebook& cb) {
    const CVector ref = y_prev / b_prev;
    std::size_t best = 0;
    double best_metric = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < cb.size(); ++idx) {
        const double metric = (y - cb.codeword(idx) * ref).squaredNorm();
        if (metric < best_metric) {
            best_metric = metric;
            best = idx;
        }
    }
    return best;
}

// Group-wise version. With C = sum_g C_g and C_g^H C_h + C_h^H C_g = 0 for
// g != h the metric splits, up to terms independent of C, into
// sum_g || y - C_g y' ||^2.
inline std::size_t differential_decode_groups(const CVector& y, const CVector& y_prev, double b_prev, const StbcCodebook& cb) {
    if (!check_g_group_decodable(cb.design())) throw std::invalid_argument("differential_decode_groups: codebook design is not group decodable");
    const CVector ref = y_prev / b_prev;
    std::vector<std::size_t> parts(static_cast<std::size_t>(cb.groups()), 0);
    for (int g = 0; g < cb.groups(); ++g) {
        double best_metric = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < cb.signal_sets()[static_cast<std::size_t>(g)].size(); ++p) {
            const double metric = (y - cb.group_codeword(g, p) * ref).squaredNorm();
            if (metric < best_metric) {
                best_metric = metric;
                parts[static_cast<std::size_t>(g)] = p;
            }
        }
    }
    return cb.join_index(parts);
}

// Runs frames 0..F over the asynchronous OFDM scheme with a fixed channel.
// sent[t][k] is the codeword index for frame t+1 on subcarrier k; frame 0
// carries the reference vector. Returns the decisions in the same layout.
// The decoder tracks b from its own previous decisions.
inline std::vector<std::vector<std::size_t>> run_differential_async(const StbcCodebook& cb, const std::vector<double>& scale,
                                                                    const OfdmSchedule& s, const OfdmParams& p,
                                                                    const RelayNetworkConfig& cfg, const ChannelRealization& ch,
                                                                    const std::vector<int>& delays,
                                                                    const std::vector<std::vector<std::size_t>>& sent,
                                                                    std::mt19937_64* rng, bool group_decoder = true) {
    const int T = cb.design().T;
    auto to_blocks = [&](const std::vector<CVector>& a) {
        std::vector<CVector> blocks(static_cast<std::size_t>(T), CVector(p.N));
        for (int k = 0; k < p.N; ++k)
            for (int j = 0; j < T; ++j) blocks[static_cast<std::size_t>(j)](k) = a[static_cast<std::size_t>(k)](j);
        return blocks;
    };
    std::vector<CVector> a(static_cast<std::size_t>(p.N), differential_initial_vector(T));
    std::vector<double> b_tx(static_cast<std::size_t>(p.N), 1.0), b_rx(static_cast<std::size_t>(p.N), 1.0);
    CMatrix prev = simulate_async_frame(s, p, cfg, ch, delays, to_blocks(a), rng);

    std::vector<std::vector<std::size_t>> decided;
    for (const auto& frame : sent) {
        if (static_cast<int>(frame.size()) != p.N) throw std::invalid_argument("run_differential_async: need one codeword per subcarrier");
        for (int k = 0; k < p.N; ++k) {
            const std::size_t idx = frame[static_cast<std::size_t>(k)];
            a[static_cast<std::size_t>(k)] = differential_encode(cb.codeword(idx), a[static_cast<std::size_t>(k)], b_tx[static_cast<std::size_t>(k)]);
            b_tx[static_cast<std::size_t>(k)] = scale[idx];
        }
        const CMatrix cur = simulate_async_frame(s, p, cfg, ch, delays, to_blocks(a), rng);
        std::vector<std::size_t> out(static_cast<std::size_t>(p.N));
        for (int k = 0; k < p.N; ++k) {
            const CVector y = cur.row(k).transpose(), yp = prev.row(k).transpose();
            const double bp = b_rx[static_cast<std::size_t>(k)];
            const std::size_t d = group_decoder ? differential_decode_groups(y, yp, bp, cb) : differential_decode_full(y, yp, bp, cb);
            out[static_cast<std::size_t>(k)] = d;
            b_rx[static_cast<std::size_t>(k)] = scale[d];
        }
        decided.push_back(std::move(out));
        prev = cur;
    }
    return decided;
}

}  // namespace cliffstbc
