#pragma once

// Codeword-error-rate sweeps for the synchronous, asynchronous coherent and
// asynchronous differential relay schemes.
//
// Config grammar: one "key = value" per line, '#' starts a comment, blank
// lines ignored, unknown keys rejected. Keys and defaults:
//   mode         sync | async-coherent | async-differential   (sync)
//   design       pciod4 | pciod<R> | eca4 | eca8 | eca-a3-4 | field-ext4 | alamouti2 | single
//   design_file  path to a design file (overrides design)
//   signal       default | qam | bpsk | lattice | rotated:<deg> | rotated-bpsk:<deg> | diff   (default)
//   side         PAM levels per real dimension for qam/lattice/rotated/default   (2)
//   p_db         "start:step:stop" or comma list of total power values in dB
//   trials       trials per power point (>= 1)
//   trial_offset first trial index, so runs can be split and merged   (0)
//   seed         64-bit seed   (1)
//   decoder      auto | groups | full   (auto)
//   pi1          source power fraction; relays get (2 - pi1)/R each   (1)
//   N, lcp, d_max, frames   OFDM settings   (64, 16, 15, 4)
//   threads      worker threads, 0 = hardware   (1); not part of the result
//
// Power convention: P is the total power per channel use with unit-variance
// noise everywhere, so P in dB plays the role of SNR. In the asynchronous
// modes one trial is one frame and contributes N codeword decisions (times
// `frames` in the differential mode).

#include "cliffstbc/design_io.hpp"
#include "cliffstbc/differential.hpp"
#include "cliffstbc/lattice_tables.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <thread>

namespace cliffstbc {

inline constexpr const char* kVersion = "cliffstbc 0.1.0";

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Independent stream per (seed, power point, trial).
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t trial) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (point * 0xD1B54A32D192ED03ull);
    a = splitmix64(s);
    s = a ^ (trial * 0x8CB92BA72F3D8DD7ull);
    return splitmix64(s);
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

enum class SweepMode { sync, async_coherent, async_differential };

struct ExperimentConfig {
    SweepMode mode = SweepMode::sync;
    std::string design = "pciod4";
    std::string design_file;
    std::string signal = "default";
    int side = 2;
    std::vector<double> p_db;
    long trials = 1000;
    long trial_offset = 0;
    std::uint64_t seed = 1;
    std::string decoder = "auto";
    double pi1 = 1.0;
    int N = 64;
    int lcp = 16;
    int d_max = 15;
    int frames = 4;
    int threads = 1;
};

inline std::string mode_name(SweepMode m) {
    switch (m) {
    case SweepMode::sync: return "sync";
    case SweepMode::async_coherent: return "async-coherent";
    case SweepMode::async_differential: return "async-differential";
    }
    return "?";
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_grid(const std::string& v) {
    std::vector<double> out;
    if (v.find(':') != std::string::npos) {
        const auto parts = split(v, ':');
        if (parts.size() != 3) throw std::invalid_argument("p_db: expected start:step:stop");
        const double a = parse_double(trim(parts[0])), step = parse_double(trim(parts[1])), b = parse_double(trim(parts[2]));
        if (step <= 0.0 || b < a) throw std::invalid_argument("p_db: need step > 0 and stop >= start");
        const long n = static_cast<long>(std::floor((b - a) / step + 1e-9));
        for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    } else {
        for (const auto& t : split(v, ',')) out.push_back(parse_double(trim(t)));
    }
    if (out.empty()) throw std::invalid_argument("p_db: empty grid");
    return out;
}

inline long parse_long(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    long x = 0;
    try {
        x = std::stol(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw std::invalid_argument("config: " + key + " must be an integer, got '" + v + "'");
    return x;
}

inline std::string format_grid(const std::vector<double>& g) {
    std::string out;
    for (double v : g) out += (out.empty() ? "" : ",") + fmt_double(v);
    return out;
}

}  // namespace detail

inline void apply_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_long;
    if (key == "mode") {
        if (value == "sync") c.mode = SweepMode::sync;
        else if (value == "async-coherent") c.mode = SweepMode::async_coherent;
        else if (value == "async-differential") c.mode = SweepMode::async_differential;
        else throw std::invalid_argument("config: unknown mode '" + value + "'");
    } else if (key == "design") c.design = value;
    else if (key == "design_file") c.design_file = value;
    else if (key == "signal") c.signal = value;
    else if (key == "side") c.side = static_cast<int>(parse_long(value, key));
    else if (key == "p_db") c.p_db = detail::parse_grid(value);
    else if (key == "trials") c.trials = parse_long(value, key);
    else if (key == "trial_offset") c.trial_offset = parse_long(value, key);
    else if (key == "seed") {
        std::size_t used = 0;
        c.seed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("config: seed must be an unsigned integer");
    } else if (key == "decoder") {
        if (value != "auto" && value != "groups" && value != "full") throw std::invalid_argument("config: decoder must be auto, groups or full");
        c.decoder = value;
    } else if (key == "pi1") c.pi1 = detail::parse_double(value);
    else if (key == "N") c.N = static_cast<int>(parse_long(value, key));
    else if (key == "lcp") c.lcp = static_cast<int>(parse_long(value, key));
    else if (key == "d_max") c.d_max = static_cast<int>(parse_long(value, key));
    else if (key == "frames") c.frames = static_cast<int>(parse_long(value, key));
    else if (key == "threads") c.threads = static_cast<int>(parse_long(value, key));
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

inline void validate_config(const ExperimentConfig& c) {
    if (c.trials < 1) throw std::invalid_argument("config: trials must be at least 1");
    if (c.trial_offset < 0) throw std::invalid_argument("config: trial_offset must be non-negative");
    if (c.p_db.empty()) throw std::invalid_argument("config: p_db is required");
    if (c.side < 2) throw std::invalid_argument("config: side must be at least 2");
    if (c.pi1 <= 0.0 || c.pi1 >= 2.0) throw std::invalid_argument("config: pi1 must lie in (0, 2)");
    if (c.threads < 0) throw std::invalid_argument("config: threads must be non-negative");
    if (c.mode != SweepMode::sync) {
        if (c.N < 1 || c.lcp < 0 || c.lcp > c.N) throw std::invalid_argument("config: need N >= 1 and 0 <= lcp <= N");
        if (c.d_max < 0 || c.d_max > c.lcp) throw std::invalid_argument("config: d_max must lie in [0, lcp]");
        if (c.frames < 1) throw std::invalid_argument("config: frames must be at least 1");
    }
}

// Parses "key = value" text on top of `base`.
inline ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {}) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        try {
            apply_config_value(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

// Everything that affects the numbers, in a fixed order. threads is left out
// on purpose: results do not depend on it.
inline std::string canonical_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "mode=" << mode_name(c.mode) << ";design=" << c.design << ";design_file=" << c.design_file << ";signal=" << c.signal
       << ";side=" << c.side << ";p_db=" << detail::format_grid(c.p_db) << ";trials=" << c.trials << ";trial_offset=" << c.trial_offset
       << ";seed=" << c.seed << ";decoder=" << c.decoder << ";pi1=" << detail::fmt_double(c.pi1);
    if (c.mode != SweepMode::sync) os << ";N=" << c.N << ";lcp=" << c.lcp << ";d_max=" << c.d_max;
    if (c.mode == SweepMode::async_differential) os << ";frames=" << c.frames;
    return os.str();
}

// ---------------------------------------------------------------------------
// Designs and signal sets

inline LinearSpaceTimeDesign named_design(const std::string& id) {
    if (id == "pciod4") return normalize_relay_power(construct_pciod(4));
    if (id == "eca4") return construct_eca_a2(1);
    if (id == "eca8") return construct_eca_a2(2);
    if (id == "eca-a3-4") return construct_eca_a3(0);
    if (id == "field-ext4") return field_extension_design();
    if (id == "alamouti2") return alamouti_design();
    if (id == "single") return single_relay_design();
    if (id.rfind("pciod", 0) == 0) {
        int R = 0;
        try {
            R = std::stoi(id.substr(5));
        } catch (const std::exception&) {
            R = 0;
        }
        if (R >= 2 && std::to_string(R) == id.substr(5)) return normalize_relay_power(construct_pciod(R));
    }
    throw std::invalid_argument("unknown design '" + id + "'");
}

namespace detail {

// +-1 on the real part of each complex symbol in the group, imaginary part 0.
inline SignalSet bpsk_group_set(const std::vector<int>& vars) {
    SignalSet s;
    s.dim = static_cast<int>(vars.size());
    s.label = "bpsk";
    std::vector<int> real_slots;
    for (std::size_t j = 0; j < vars.size(); ++j)
        if (vars[j] % 2 == 0) real_slots.push_back(static_cast<int>(j));
    const std::size_t n = std::size_t{1} << real_slots.size();
    for (std::size_t m = 0; m < n; ++m) {
        RVector p = RVector::Zero(s.dim);
        for (std::size_t b = 0; b < real_slots.size(); ++b) p(real_slots[b]) = (m >> b) & 1u ? -1.0 : 1.0;
        s.points.push_back(p);
    }
    return s;
}

inline SignalSet rotated_bpsk(double deg) {
    SignalSet s;
    s.dim = 2;
    s.label = "rotated-bpsk";
    const double t = deg_to_rad(deg);
    RVector p(2);
    p << std::cos(t), std::sin(t);
    s.points = {p, -p};
    return s;
}

inline double parse_angle(const std::string& spec, const std::string& prefix) { return parse_double(spec.substr(prefix.size())); }

}  // namespace detail

inline std::vector<SignalSet> build_signal_sets(const LinearSpaceTimeDesign& d, const std::string& design_id, const std::string& spec, int side) {
    std::vector<SignalSet> sets;
    for (const auto& grp : d.partition) {
        const int dim = static_cast<int>(grp.size());
        auto need_dim2 = [&](const std::string& what) {
            if (dim != 2) throw std::invalid_argument("signal set '" + what + "' needs groups of 2 real variables, design has a group of " + std::to_string(dim));
        };
        std::string s = spec;
        if (s == "default") {
            if (design_id == "eca4" || design_id == "eca8") s = "rotated:" + detail::fmt_double(kEcaAngleDeg);
            else if (design_id.rfind("pciod", 0) == 0) s = "lattice";
            else s = "qam";
        }
        if (s == "qam") {
            sets.push_back(pam_signal_set(dim, side));
        } else if (s == "bpsk") {
            sets.push_back(detail::bpsk_group_set(grp));
        } else if (s == "lattice") {
            sets.push_back(default_lattice_signal_set(dim, side));
        } else if (s.rfind("rotated-bpsk:", 0) == 0) {
            need_dim2(s);
            sets.push_back(detail::rotated_bpsk(detail::parse_angle(s, "rotated-bpsk:")));
        } else if (s.rfind("rotated:", 0) == 0) {
            need_dim2(s);
            sets.push_back(rotated_qam(side, deg_to_rad(detail::parse_angle(s, "rotated:"))));
        } else if (s == "diff") {
            need_dim2(s);
            sets.push_back(differential_signal_set());
        } else {
            throw std::invalid_argument("unknown signal set '" + spec + "'");
        }
    }
    return sets;
}

// ---------------------------------------------------------------------------
// Setup shared by all trials of a sweep

struct SweepSetup {
    ExperimentConfig config;
    LinearSpaceTimeDesign relay_design;  // what the relays run
    std::unique_ptr<StbcCodebook> codebook;
    bool group_decoding = false;
    OfdmSchedule schedule;
    std::vector<double> scale;  // differential: b per codeword
};

inline bool groups_decodable_for_relays(const LinearSpaceTimeDesign& d, double P, double pi1) {
    if (d.groups() < 2) return false;
    if (!check_g_group_decodable(d)) return false;
    // Gamma depends on the channel; probe a few draws.
    const auto cfg = make_relay_config(d, P, pi1, (2.0 - pi1) / d.NT, false);
    std::mt19937_64 rng(12345);
    for (int t = 0; t < 4; ++t)
        if (!check_multigroup_condition(d, noise_covariance(cfg, sample_channel(d.NT, rng)))) return false;
    return true;
}

inline SweepSetup prepare_sweep(const ExperimentConfig& c) {
    validate_config(c);
    SweepSetup s;
    s.config = c;
    const std::string id = c.design_file.empty() ? c.design : "file";
    s.relay_design = c.design_file.empty() ? named_design(c.design) : load_design(c.design_file);
    validate_shape(s.relay_design);
    if (c.mode != SweepMode::async_differential) s.relay_design = normalize_relay_power(s.relay_design);
    const auto sets = build_signal_sets(s.relay_design, id, c.signal, c.side);

    if (c.mode == SweepMode::async_differential) {
        // Scale the source codebook to E[b^2] = 1; relays keep the design.
        StbcCodebook raw(s.relay_design, sets);
        double mean = 0.0;
        for (double b : codebook_scale_factors(raw)) mean += b * b;
        mean /= static_cast<double>(raw.size());
        LinearSpaceTimeDesign scaled = s.relay_design;
        for (auto& w : scaled.weights) w /= std::sqrt(mean);
        s.codebook = std::make_unique<StbcCodebook>(scaled, sets);
        s.scale = codebook_scale_factors(*s.codebook);
        if (!check_commutation(*s.codebook, extract_relay_structure(s.relay_design), 1e-10))
            throw std::invalid_argument("invalid design/signal-set pairing: codebook does not commute with the relay matrices");
        s.group_decoding = c.decoder != "full" && s.codebook->groups() > 1 && check_g_group_decodable(s.codebook->design());
    } else {
        s.codebook = std::make_unique<StbcCodebook>(s.relay_design, sets);
        const bool ok = groups_decodable_for_relays(s.relay_design, std::pow(10.0, c.p_db.front() / 10.0), c.pi1);
        if (c.decoder == "groups" && !ok) throw std::invalid_argument("decoder=groups: design is not group decodable under the relay noise covariance");
        s.group_decoding = c.decoder == "groups" || (c.decoder == "auto" && ok);
    }
    if (c.mode != SweepMode::sync) s.schedule = build_schedule(s.relay_design);
    return s;
}

struct TrialOutcome {
    long errors = 0;
    long decisions = 0;
};

inline TrialOutcome run_trial(const SweepSetup& s, double P, std::mt19937_64& rng) {
    const ExperimentConfig& c = s.config;
    const StbcCodebook& cb = *s.codebook;
    const LinearSpaceTimeDesign& d = s.relay_design;
    const auto cfg = make_relay_config(d, P, c.pi1, (2.0 - c.pi1) / d.NT);
    std::uniform_int_distribution<std::size_t> pick(0, cb.size() - 1);
    TrialOutcome out;
    auto decide = [&](const WhitenedModel& m) { return s.group_decoding ? ml_decode_groups(m, cb) : ml_decode_full(m, cb); };

    if (c.mode == SweepMode::sync) {
        const auto ch = sample_channel(d.NT, rng);
        const std::size_t sent = pick(rng);
        const CVector y = simulate_two_phase(cfg, complex_symbols(cb.symbols(sent)), ch, &rng);
        out.errors = decide(relay_model(y, cb, cfg, ch)) != sent ? 1 : 0;
        out.decisions = 1;
        return out;
    }

    const OfdmParams p{c.N, c.lcp};
    const auto ch = sample_channel(d.NT, rng);
    const auto delays = sample_delays(d.NT, c.d_max, rng);
    if (c.mode == SweepMode::async_coherent) {
        std::vector<std::size_t> sent(static_cast<std::size_t>(p.N));
        std::vector<CVector> blocks(static_cast<std::size_t>(d.T), CVector(p.N));
        for (int k = 0; k < p.N; ++k) {
            sent[static_cast<std::size_t>(k)] = pick(rng);
            const CVector z = complex_symbols(cb.symbols(sent[static_cast<std::size_t>(k)]));
            for (int j = 0; j < d.T; ++j) blocks[static_cast<std::size_t>(j)](k) = z(j);
        }
        const CMatrix Y = simulate_async_frame(s.schedule, p, cfg, ch, delays, blocks, &rng);
        const CMatrix W = whitening_matrix(ofdm_noise_covariance(cfg, ch));
        for (int k = 0; k < p.N; ++k) {
            const CVector h = equivalent_channel(k, cfg.relays, ch, delays, p);
            out.errors += decide(whiten_model(Y.row(k).transpose(), cb, W, h, cfg.signal_amplitude())) != sent[static_cast<std::size_t>(k)] ? 1 : 0;
        }
        out.decisions = p.N;
        return out;
    }

    std::vector<std::vector<std::size_t>> sent(static_cast<std::size_t>(c.frames), std::vector<std::size_t>(static_cast<std::size_t>(p.N)));
    for (auto& f : sent)
        for (auto& v : f) v = pick(rng);
    const auto got = run_differential_async(cb, s.scale, s.schedule, p, cfg, ch, delays, sent, &rng, s.group_decoding);
    for (std::size_t t = 0; t < sent.size(); ++t)
        for (std::size_t k = 0; k < sent[t].size(); ++k) out.errors += got[t][k] != sent[t][k] ? 1 : 0;
    out.decisions = static_cast<long>(c.frames) * p.N;
    return out;
}

struct ResultRow {
    double p_db = 0.0;
    long trials = 0;  // codeword decisions
    long errors = 0;
    double cer = 0.0;
    double seconds = 0.0;  // wall time, reported but not written to CSV
};

inline std::vector<ResultRow> run_sweep(const SweepSetup& s) {
    const ExperimentConfig& c = s.config;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int threads = static_cast<int>(std::min<long>(c.threads == 0 ? hw : static_cast<unsigned>(c.threads), c.trials));
    std::vector<ResultRow> rows;
    for (std::size_t pt = 0; pt < c.p_db.size(); ++pt) {
        const auto start = std::chrono::steady_clock::now();
        const double P = std::pow(10.0, c.p_db[pt] / 10.0);
        std::vector<TrialOutcome> partial(static_cast<std::size_t>(threads));
        auto work = [&](int w) {
            for (long t = w; t < c.trials; t += threads) {
                std::mt19937_64 rng(trial_seed(c.seed, pt, static_cast<std::uint64_t>(c.trial_offset + t)));
                const TrialOutcome o = run_trial(s, P, rng);
                partial[static_cast<std::size_t>(w)].errors += o.errors;
                partial[static_cast<std::size_t>(w)].decisions += o.decisions;
            }
        };
        if (threads == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
            for (auto& th : pool) th.join();
        }
        ResultRow r;
        r.p_db = c.p_db[pt];
        for (const auto& o : partial) {
            r.errors += o.errors;
            r.trials += o.decisions;
        }
        r.cer = static_cast<double>(r.errors) / static_cast<double>(r.trials);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<ResultRow> run_sweep(const ExperimentConfig& c) { return run_sweep(prepare_sweep(c)); }

// ---------------------------------------------------------------------------
// CSV

inline std::string format_csv(const std::vector<ResultRow>& rows, const ExperimentConfig& c) {
    std::ostringstream os;
    os << "# " << kVersion << "\n";
    os << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical_config(c)) << std::dec << std::setfill(' ') << "\n";
    os << "# seed=" << c.seed << "\n";
    os << "# config=" << canonical_config(c) << "\n";
    os << "P_dB,trials,errors,cer\n";
    for (const auto& r : rows) os << detail::fmt_double(r.p_db) << "," << r.trials << "," << r.errors << "," << detail::fmt_double(r.cer) << "\n";
    return os.str();
}

inline std::vector<ResultRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<ResultRow> rows;
    bool header = false;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "P_dB,trials,errors,cer") throw std::invalid_argument("csv: expected header P_dB,trials,errors,cer");
            header = true;
            continue;
        }
        const auto f = detail::split(line, ',');
        if (f.size() != 4) throw std::invalid_argument("csv: expected 4 fields in '" + line + "'");
        ResultRow r;
        r.p_db = detail::parse_double(f[0]);
        r.trials = detail::parse_long(f[1], "trials");
        r.errors = detail::parse_long(f[2], "errors");
        r.cer = detail::parse_double(f[3]);
        if (r.trials < 1 || r.errors < 0 || r.errors > r.trials) throw std::invalid_argument("csv: inconsistent counts in '" + line + "'");
        rows.push_back(r);
    }
    if (!header) throw std::invalid_argument("csv: missing header");
    return rows;
}

// ---------------------------------------------------------------------------
// Post-processing

// Least-squares slope of log10(CER) against P_dB / 10 over rows whose CER lies
// in [min_cer, max_cer] and has at least one error.
inline double estimate_diversity_slope(const std::vector<ResultRow>& rows, double min_cer = 0.0, double max_cer = 1.0) {
    std::vector<double> xs, ys;
    for (const auto& r : rows)
        if (r.errors > 0 && r.cer >= min_cer && r.cer <= max_cer) {
            xs.push_back(r.p_db / 10.0);
            ys.push_back(std::log10(r.cer));
        }
    if (xs.size() < 2) throw std::invalid_argument("estimate_diversity_slope: need at least 2 points with nonzero CER in the window");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("estimate_diversity_slope: all points at the same power");
    return sxy / sxx;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

inline Interval wilson_interval(long errors, long n, double z = 1.96) {
    if (n <= 0) throw std::invalid_argument("wilson_interval: n must be positive");
    const double p = static_cast<double>(errors) / static_cast<double>(n);
    const double z2 = z * z, nn = static_cast<double>(n);
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace detail {

// Power at which a piecewise log-linear CER curve first drops to `target`.
inline std::optional<double> crossing(const std::vector<double>& p_db, const std::vector<double>& cer, double target) {
    for (std::size_t i = 0; i + 1 < p_db.size(); ++i) {
        const double a = cer[i], b = cer[i + 1];
        if (a >= target && b <= target && a > 0.0 && b > 0.0) {
            if (a == b) return p_db[i];
            const double t = (std::log10(a) - std::log10(target)) / (std::log10(a) - std::log10(b));
            return p_db[i] + t * (p_db[i + 1] - p_db[i]);
        }
    }
    return std::nullopt;
}

}  // namespace detail

struct PowerAtCer {
    double p_db = 0.0;
    double lo = 0.0;  // from the lower Wilson bound curve
    double hi = 0.0;  // from the upper Wilson bound curve
};

// Interpolates the power needed for CER = target and brackets it with the
// crossings of the pointwise Wilson bound curves.
inline std::optional<PowerAtCer> power_at_cer(const std::vector<ResultRow>& rows, double target, double z = 1.96) {
    std::vector<double> p, mid, lo, hi;
    for (const auto& r : rows) {
        const Interval w = wilson_interval(r.errors, r.trials, z);
        p.push_back(r.p_db);
        mid.push_back(r.cer);
        lo.push_back(std::max(w.lo, 1e-300));
        hi.push_back(w.hi);
    }
    const auto m = detail::crossing(p, mid, target);
    const auto a = detail::crossing(p, lo, target);
    const auto b = detail::crossing(p, hi, target);
    if (!m || !a || !b) return std::nullopt;
    return PowerAtCer{*m, *a, *b};
}

}  // namespace cliffstbc
