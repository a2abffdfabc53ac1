#pragma once

// OFDM transmission over relays with unknown integer timing offsets.
//
// The source sends block j as CP + IDFT(a_j) or CP + DFT(a_j). Each relay
// forwards, in every OFDM slot, at most one received block, possibly
// conjugated, and in "reversed" slots time-reversed. After CP handling and a
// DFT at the destination every subcarrier k sees the synchronous model
//   y_k = sqrt(pi1 pi2 P^2 / (pi1 P + 1)) X_k h_k + n_k
// with h_k picking up e^{-i 2 pi k tau_j / N} per relay.

#include "cliffstbc/relay.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

namespace cliffstbc {

struct OfdmParams {
    int N = 64;
    int lcp = 16;
    int Ls() const { return N + lcp; }

    void validate() const {
        if (N < 1 || lcp < 0) throw std::invalid_argument("ofdm: need N >= 1 and lcp >= 0");
        if (lcp > N) throw std::invalid_argument("ofdm: cyclic prefix longer than the symbol");
    }
};

namespace detail {

// exp(-i 2 pi m / N), m = 0..N-1
inline const std::vector<cd>& twiddles(int N) {
    thread_local std::map<int, std::vector<cd>> cache;
    auto it = cache.find(N);
    if (it != cache.end()) return it->second;
    std::vector<cd> w(static_cast<std::size_t>(N));
    for (int m = 0; m < N; ++m) w[static_cast<std::size_t>(m)] = std::polar(1.0, -2.0 * std::numbers::pi * m / N);
    return cache.emplace(N, std::move(w)).first->second;
}

inline CVector transform(const CVector& x, bool inverse) {
    const int N = static_cast<int>(x.size());
    if (N == 0) return x;
    const auto& w = twiddles(N);
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    CVector out(N);
    for (int k = 0; k < N; ++k) {
        cd acc = 0.0;
        for (int n = 0; n < N; ++n) {
            const cd t = w[static_cast<std::size_t>((static_cast<long>(k) * n) % N)];
            acc += x(n) * (inverse ? std::conj(t) : t);
        }
        out(k) = s * acc;
    }
    return out;
}

}  // namespace detail

// Unitary transforms: (DFT x)_k = N^{-1/2} sum_n x_n e^{-i 2 pi k n / N}.
inline CVector dft(const CVector& x) { return detail::transform(x, false); }
inline CVector idft(const CVector& x) { return detail::transform(x, true); }

// zeta(r)[n] = r[(N - n) mod N]
inline CVector time_reverse(const CVector& r) {
    const Eigen::Index N = r.size();
    CVector out(N);
    for (Eigen::Index n = 0; n < N; ++n) out(n) = r((N - n) % N);
    return out;
}

inline CVector add_cp(const CVector& x, const OfdmParams& p) {
    if (x.size() != p.N) throw std::invalid_argument("add_cp: payload must have N samples");
    CVector out(p.Ls());
    out << x.tail(p.lcp), x;
    return out;
}

// Drops the first lcp samples; with `shifted` the last lcp samples of the
// remaining N are then moved to the front.
inline CVector remove_cp_with_shift(const CVector& y, bool shifted, const OfdmParams& p) {
    if (y.size() != p.Ls()) throw std::invalid_argument("remove_cp: symbol must have N + lcp samples");
    CVector body = y.tail(p.N);
    if (!shifted || p.lcp == 0) return body;
    CVector out(p.N);
    out << body.tail(p.lcp), body.head(p.N - p.lcp);
    return out;
}

// Relay-side reversal of a received CP-bearing symbol r: out[m] = r[Ls - m],
// with index Ls read cyclically. This is the reversed payload followed by a
// cyclic postfix, which the destination's shifted CP removal undoes.
inline CVector reverse_symbol(const CVector& r, const OfdmParams& p) {
    if (r.size() != p.Ls()) throw std::invalid_argument("reverse_symbol: symbol must have N + lcp samples");
    const CVector payload = r.tail(p.N);
    CVector out(p.Ls());
    for (int m = 0; m < p.Ls(); ++m) out(m) = payload(((p.N - m) % p.N + p.N) % p.N);
    return out;
}

// ---------------------------------------------------------------------------
// Row structure

struct RowStructure {
    std::vector<std::set<int>> P;   // per row: 0-based complex variables without conjugation
    std::vector<std::set<int>> Pc;  // per row: conjugated
    std::vector<std::string> violations;

    bool disjoint = true;  // P_i and P_i^c share nothing
    bool balanced = true;  // |P_i| = |P_i^c|
    bool nested = true;    // P_i and P_j are disjoint or one contains the other
    bool ok() const { return disjoint && balanced && nested; }
};

namespace detail {

inline std::string var_set_string(const std::set<int>& s) {
    std::string out = "{";
    for (int v : s) out += (out.size() > 1 ? "," : "") + std::string("z") + std::to_string(v + 1);
    return out + "}";
}

}  // namespace detail

inline RowStructure derive_row_structure(const LinearSpaceTimeDesign& d, double tol = 1e-12) {
    const RelayStructure rs = extract_relay_structure(d, tol);
    RowStructure out;
    out.P.resize(static_cast<std::size_t>(d.T));
    out.Pc.resize(static_cast<std::size_t>(d.T));
    for (std::size_t c = 0; c < rs.B.size(); ++c)
        for (int r = 0; r < d.T; ++r)
            for (int k = 0; k < rs.B[c].cols(); ++k)
                if (std::abs(rs.B[c](r, k)) > tol) (rs.conjugated[c] ? out.Pc : out.P)[static_cast<std::size_t>(r)].insert(k);

    for (int r = 0; r < d.T; ++r) {
        const auto& p = out.P[static_cast<std::size_t>(r)];
        const auto& pc = out.Pc[static_cast<std::size_t>(r)];
        const std::string row = "row " + std::to_string(r + 1);
        for (int v : p)
            if (pc.count(v)) {
                out.disjoint = false;
                out.violations.push_back(row + ": z" + std::to_string(v + 1) + " appears both plain and conjugated");
            }
        if (p.size() != pc.size()) {
            out.balanced = false;
            out.violations.push_back(row + ": " + detail::var_set_string(p) + " and conjugated " + detail::var_set_string(pc) + " differ in size");
        }
        for (int q = r + 1; q < d.T; ++q) {
            const auto& o = out.P[static_cast<std::size_t>(q)];
            std::set<int> both;
            std::set_intersection(p.begin(), p.end(), o.begin(), o.end(), std::inserter(both, both.begin()));
            if (!both.empty() && both != p && both != o) {
                out.nested = false;
                out.violations.push_back(row + " and row " + std::to_string(q + 1) + ": unconjugated sets " + detail::var_set_string(p) + " and " +
                                         detail::var_set_string(o) + " partially overlap");
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schedule

struct RelayAction {
    int block = -1;      // 0-based source block, -1 = silent
    double coef = 0.0;   // real multiplier, normally +-1
    bool conj = false;
    bool reversed = false;
    bool silent() const { return block < 0; }
};

struct OfdmSchedule {
    int T = 0;  // slots = source blocks
    int R = 0;
    int M = 0;
    std::vector<bool> idft_block;                   // per block: IDFT (true) or DFT modulated
    std::vector<bool> reversed_slot;                // per slot
    std::vector<std::vector<RelayAction>> actions;  // [relay][slot]
    RelayStructure relays;
};

// Table-style text for one action, e.g. "r1,1", "-r3,3*", "Z(r1,3)", "-Z(r3,2*)", "0".
inline std::string action_string(const RelayAction& a, int relay) {
    if (a.silent()) return "0";
    std::string s = "r" + std::to_string(relay + 1) + "," + std::to_string(a.block + 1) + (a.conj ? "*" : "");
    if (a.reversed) s = "Z(" + s + ")";
    std::string lead;
    if (a.coef < 0) lead = "-";
    if (std::abs(std::abs(a.coef) - 1.0) > 1e-12) {
        std::ostringstream os;
        os << std::abs(a.coef);
        lead += os.str() + "*";
    }
    return lead + s;
}

inline std::string schedule_table(const OfdmSchedule& s) {
    std::ostringstream os;
    os << "slot";
    for (int i = 0; i < s.R; ++i) os << "\tU" << i + 1;
    os << "\n";
    for (int t = 0; t < s.T; ++t) {
        os << t + 1;
        for (int i = 0; i < s.R; ++i) os << "\t" << action_string(s.actions[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)], i);
        os << "\n";
    }
    return os.str();
}

namespace detail {

// Union-find over nodes with a parity label relative to the root.
class ParityUnionFind {
public:
    explicit ParityUnionFind(int n) : parent_(static_cast<std::size_t>(n)), parity_(static_cast<std::size_t>(n), 0) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::pair<int, int> find(int x) {
        int p = 0;
        int r = x;
        while (parent_[static_cast<std::size_t>(r)] != r) {
            p ^= parity_[static_cast<std::size_t>(r)];
            r = parent_[static_cast<std::size_t>(r)];
        }
        return {r, p};
    }
    // Requires label(a) xor label(b) == rel; false on contradiction.
    bool unite(int a, int b, int rel) {
        const auto [ra, pa] = find(a);
        const auto [rb, pb] = find(b);
        if (ra == rb) return (pa ^ pb) == rel;
        parent_[static_cast<std::size_t>(rb)] = ra;
        parity_[static_cast<std::size_t>(rb)] = pa ^ pb ^ rel;
        return true;
    }

private:
    std::vector<int> parent_;
    std::vector<int> parity_;
};

}  // namespace detail

// Chooses IDFT/DFT per block and reversed/plain per slot so that every relay
// entry is recoverable at the destination:
//   plain slot:    z appears via an IDFT block, z* via a DFT block
//   reversed slot: z via a DFT block, z* via an IDFT block.
// Each connected component of the constraint graph has two solutions; the one
// keeping reversed and plain slots balanced is taken, with ties resolved by
// leaving the component's first slot plain.
inline OfdmSchedule build_schedule(const LinearSpaceTimeDesign& d, double tol = 1e-12) {
    const RowStructure rows = derive_row_structure(d, tol);
    if (!rows.disjoint || !rows.nested) {
        std::string why = "build_schedule: row structure unsuitable for OFDM relaying";
        for (const auto& v : rows.violations) why += "; " + v;
        throw std::invalid_argument(why);
    }
    OfdmSchedule s;
    s.relays = extract_relay_structure(d, tol);
    s.T = d.T;
    s.R = d.NT;
    s.M = s.relays.M;
    const int nz = d.K() / 2;

    // Nodes: slots 0..T-1 (label 1 = reversed), blocks T..T+nz-1 (label 1 = DFT).
    detail::ParityUnionFind uf(s.T + nz);
    for (int r = 0; r < s.T; ++r) {
        for (int v : rows.P[static_cast<std::size_t>(r)])
            if (!uf.unite(r, s.T + v, 0)) throw std::invalid_argument("build_schedule: no consistent reversal assignment (row " + std::to_string(r + 1) + ")");
        for (int v : rows.Pc[static_cast<std::size_t>(r)])
            if (!uf.unite(r, s.T + v, 1)) throw std::invalid_argument("build_schedule: no consistent reversal assignment (row " + std::to_string(r + 1) + ")");
    }

    std::vector<int> label(static_cast<std::size_t>(s.T + nz), 0);
    std::map<int, int> flip;  // component root -> chosen label of the root
    int reversed = 0, plain = 0;
    for (int r = 0; r < s.T; ++r) {
        const auto [root, p] = uf.find(r);
        if (flip.count(root)) continue;
        int rev0 = 0, plain0 = 0;  // counts if root label = 0
        for (int q = 0; q < s.T; ++q) {
            const auto [rq, pq] = uf.find(q);
            if (rq == root) (pq ? rev0 : plain0)++;
        }
        const int imbalance0 = std::abs((reversed + rev0) - (plain + plain0));
        const int imbalance1 = std::abs((reversed + plain0) - (plain + rev0));
        // Root label p leaves slot r plain.
        const int choice = imbalance0 < imbalance1 ? 0 : imbalance1 < imbalance0 ? 1 : p;
        flip[root] = choice;
        reversed += choice ? plain0 : rev0;
        plain += choice ? rev0 : plain0;
    }
    for (int n = 0; n < s.T + nz; ++n) {
        const auto [root, p] = uf.find(n);
        label[static_cast<std::size_t>(n)] = flip.count(root) ? (p ^ flip[root]) : p;  // blocks in no row stay IDFT
    }
    for (int r = 0; r < s.T; ++r) s.reversed_slot.push_back(label[static_cast<std::size_t>(r)] == 1);
    for (int v = 0; v < nz; ++v) s.idft_block.push_back(label[static_cast<std::size_t>(s.T + v)] == 0);

    s.actions.assign(static_cast<std::size_t>(s.R), std::vector<RelayAction>(static_cast<std::size_t>(s.T)));
    for (int i = 0; i < s.R; ++i) {
        const CMatrix& B = s.relays.B[static_cast<std::size_t>(i)];
        for (int r = 0; r < s.T; ++r) {
            RelayAction a;
            for (int k = 0; k < nz; ++k) {
                if (std::abs(B(r, k)) <= tol) continue;
                if (!a.silent()) throw std::invalid_argument("build_schedule: relay " + std::to_string(i + 1) + " combines two blocks in row " + std::to_string(r + 1));
                if (std::abs(B(r, k).imag()) > tol) throw std::invalid_argument("build_schedule: relay matrices must be real");
                a.block = k;
                a.coef = B(r, k).real();
            }
            a.conj = s.relays.conjugated[static_cast<std::size_t>(i)];
            a.reversed = s.reversed_slot[static_cast<std::size_t>(r)];
            if (a.silent()) a.conj = a.reversed = false;
            s.actions[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] = a;
        }
    }
    return s;
}

// True when the action would leave the destination with DFT(DFT a) or a
// reversed IDFT symbol, i.e. nothing that maps back to +-a or +-a*.
inline bool is_forbidden(const RelayAction& a, const OfdmSchedule& s) {
    if (a.silent()) return false;
    const bool idft = s.idft_block[static_cast<std::size_t>(a.block)];
    // Recoverable iff (IDFT block) == (conj == reversed).
    return idft != (a.conj == a.reversed);
}

// ---------------------------------------------------------------------------
// Channel model

inline void validate_delays(const std::vector<int>& delays, int R, const OfdmParams& p) {
    if (static_cast<int>(delays.size()) != R) throw std::invalid_argument("ofdm: need one delay per relay");
    for (int t : delays)
        if (t < 0 || t > p.lcp) throw std::invalid_argument("ofdm: relay delay " + std::to_string(t) + " outside [0, lcp]");
}

// h_k: f_i g_i (or f_i^* g_i for conjugating relays) times e^{-i 2 pi k tau_i / N}.
inline CVector equivalent_channel(int k, const RelayStructure& rs, const ChannelRealization& ch, const std::vector<int>& delays,
                                  const OfdmParams& p) {
    validate_delays(delays, static_cast<int>(rs.B.size()), p);
    CVector h = equivalent_channel(rs, ch);
    const auto& w = detail::twiddles(p.N);
    for (Eigen::Index i = 0; i < h.size(); ++i)
        h(i) *= w[static_cast<std::size_t>((static_cast<long>(k) * delays[static_cast<std::size_t>(i)]) % p.N)];
    return h;
}

// Per-subcarrier noise covariance. Relay noise enters slot t through row t of
// B_i, so silent entries simply contribute nothing and the diagonal carries
// the per-slot variance; it has the same form as the synchronous covariance
// and does not depend on k or the delays.
inline CMatrix ofdm_noise_covariance(const RelayNetworkConfig& cfg, const ChannelRealization& ch) { return noise_covariance(cfg, ch); }

// Full sample-level simulation of one frame. blocks[j] is a_j (N symbols);
// returns Y with Y(k, t) = y_{k,t}. Passing rng == nullptr zeroes all noise.
inline CMatrix simulate_async_frame(const OfdmSchedule& s, const OfdmParams& p, const RelayNetworkConfig& cfg, const ChannelRealization& ch,
                                    const std::vector<int>& delays, const std::vector<CVector>& blocks, std::mt19937_64* rng) {
    p.validate();
    validate_delays(delays, s.R, p);
    if (static_cast<int>(blocks.size()) != static_cast<int>(s.idft_block.size())) throw std::invalid_argument("simulate_async_frame: wrong number of blocks");
    if (ch.f.size() != s.R || ch.g.size() != s.R) throw std::invalid_argument("simulate_async_frame: channel has the wrong number of relays");
    const int Ls = p.Ls();
    const double src = std::sqrt(cfg.pi1 * cfg.P);

    std::vector<CVector> sent;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (blocks[j].size() != p.N) throw std::invalid_argument("simulate_async_frame: block length must be N");
        sent.push_back(src * add_cp(s.idft_block[j] ? idft(blocks[j]) : dft(blocks[j]), p));
    }

    // Destination stream: T symbols plus room for the last delayed tail.
    CVector stream = CVector::Zero(static_cast<Eigen::Index>(s.T) * Ls + p.lcp);
    for (int i = 0; i < s.R; ++i) {
        // Relay i hears every block once, with its own noise.
        std::vector<CVector> heard;
        for (const auto& a : sent) {
            CVector r = ch.f(i) * a;
            if (rng) r += complex_normal_vector(Ls, *rng);
            heard.push_back(std::move(r));
        }
        const int tau = delays[static_cast<std::size_t>(i)];
        for (int t = 0; t < s.T; ++t) {
            const RelayAction& a = s.actions[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
            if (a.silent()) continue;
            CVector x = heard[static_cast<std::size_t>(a.block)];
            if (a.conj) x = x.conjugate().eval();
            if (a.reversed) x = reverse_symbol(x, p);
            stream.segment(static_cast<Eigen::Index>(t) * Ls + tau, Ls) += (cfg.relay_gain() * a.coef) * ch.g(i) * x;
        }
    }
    if (rng) stream += complex_normal_vector(stream.size(), *rng);

    CMatrix Y(p.N, s.T);
    for (int t = 0; t < s.T; ++t) {
        const CVector sym = stream.segment(static_cast<Eigen::Index>(t) * Ls, Ls);
        Y.col(t) = dft(remove_cp_with_shift(sym, s.reversed_slot[static_cast<std::size_t>(t)], p));
    }
    return Y;
}

// Closed-form noise-free model: row k of the result is (amp X_k h_k)^T.
inline CMatrix async_model(const LinearSpaceTimeDesign& d, const OfdmParams& p, const RelayNetworkConfig& cfg, const ChannelRealization& ch,
                           const std::vector<int>& delays, const std::vector<CVector>& blocks) {
    CMatrix Y(p.N, d.T);
    CVector z(static_cast<Eigen::Index>(blocks.size()));
    for (int k = 0; k < p.N; ++k) {
        for (std::size_t j = 0; j < blocks.size(); ++j) z(static_cast<Eigen::Index>(j)) = blocks[j](k);
        Y.row(k) = (cfg.signal_amplitude() * d.codeword(real_symbols(z)) * equivalent_channel(k, cfg.relays, ch, delays, p)).transpose();
    }
    return Y;
}

// Delays with tau_1 = 0 and the rest uniform on {0..max_delay}. Relay order is
// irrelevant to the model, so the delays are not sorted.
inline std::vector<int> sample_delays(int R, int max_delay, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> u(0, max_delay);
    std::vector<int> d(static_cast<std::size_t>(R), 0);
    for (int i = 1; i < R; ++i) d[static_cast<std::size_t>(i)] = u(rng);
    return d;
}

}  // namespace cliffstbc
