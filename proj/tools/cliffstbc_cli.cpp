#include "cliffstbc/cliffstbc.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace cliffstbc;

namespace {

LinearSpaceTimeDesign build_family(const std::string& family, int relays, int a, int g) {
    if (family == "pciod") return normalize_relay_power(construct_pciod(relays));
    if (family == "cuwd") return construct_max_rate_cuwd(a, g);
    if (family == "eca-a2") return construct_eca_a2(a);
    if (family == "eca-a3") return construct_eca_a3(a);
    if (family == "abba") return construct_abba(g, a);
    if (family == "alamouti") return alamouti_design();
    if (family == "field-ext") return field_extension_design();
    if (family == "golden") return golden_code_design();
    if (family == "single") return single_relay_design();
    throw std::invalid_argument("unknown family '" + family + "'");
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

struct Report {
    std::vector<std::string> lines;
    std::string failure;  // first hard failure
};

// Relay matrices, orthogonality and the noise-covariance group condition,
// or nothing when the design is not a conjugate LSTD.
std::optional<RelayStructure> relay_structure(const LinearSpaceTimeDesign& d, std::string& why) {
    try {
        return extract_relay_structure(d);
    } catch (const std::invalid_argument& e) {
        why = e.what();
        return std::nullopt;
    }
}

Report analyse(const LinearSpaceTimeDesign& d) {
    Report rep;
    auto fail = [&](const std::string& why) {
        if (rep.failure.empty()) rep.failure = why;
    };
    const int g = d.groups();
    const bool independent = check_linear_independence(d.weights);
    const bool grouped = check_g_group_decodable(d);
    const CuwdReport cuwd = check_cuwd(d);
    std::string relay_why;
    const auto rs = relay_structure(d, relay_why);
    bool row_orth = false;
    if (rs) {
        row_orth = true;
        for (const auto& B : rs->B) row_orth = row_orth && check_row_orthogonal(B);
    }

    std::ostringstream summary;
    summary << "CUWD: " << yes_no(bool(cuwd)) << "; " << g << "-group decodable: " << yes_no(grouped)
            << "; row-orthogonal relays: " << (rs ? yes_no(row_orth) : "n/a");
    rep.lines.push_back(summary.str());

    const Rational r = rate_dpcu(d);
    std::ostringstream shape;
    shape << "T=" << d.T << " NT=" << d.NT << " K=" << d.K() << " rate=" << r.num << "/" << r.den << " dpcu";
    rep.lines.push_back(shape.str());
    if (!cuwd) rep.lines.push_back("CUWD check: " + cuwd.failure);
    if (rs) {
        int conj = 0;
        for (bool c : rs->conjugated) conj += c ? 1 : 0;
        rep.lines.push_back("conjugate LSTD: yes (" + std::to_string(rs->M) + " plain relays, " + std::to_string(conj) + " conjugating)");
    } else {
        rep.lines.push_back("conjugate LSTD: no (" + relay_why + ")");
    }

    if (!independent) fail("weight matrices are linearly dependent");
    if (!grouped) fail("design is not " + std::to_string(g) + "-group decodable under its partition");
    if (rs && grouped && g > 1) {
        // Probe the group condition under Gamma with a few channel draws.
        std::mt19937_64 rng(1);
        RelayNetworkConfig cfg;
        cfg.relays = *rs;
        cfg.R = d.NT;
        cfg.T = d.T;
        cfg.P = 10.0;
        cfg.pi2 = 1.0 / d.NT;
        bool ok = true;
        for (int t = 0; t < 8 && ok; ++t) ok = check_multigroup_condition(d, noise_covariance(cfg, sample_channel(d.NT, rng)));
        rep.lines.push_back("group decodable under relay noise covariance: " + yes_no(ok));
        if (!ok) fail("design is not group decodable under the relay noise covariance");
    }
    return rep;
}

int print_report(const Report& rep) {
    for (const auto& l : rep.lines) std::cout << l << "\n";
    if (!rep.failure.empty()) {
        std::cout << "FAILED: " << rep.failure << "\n";
        return 1;
    }
    std::cout << "OK\n";
    return 0;
}

void print_rows(const std::vector<ResultRow>& rows) {
    std::cout << std::setw(8) << "P_dB" << std::setw(12) << "trials" << std::setw(10) << "errors" << std::setw(14) << "cer" << std::setw(10) << "seconds" << "\n";
    for (const auto& r : rows)
        std::cout << std::setw(8) << r.p_db << std::setw(12) << r.trials << std::setw(10) << r.errors << std::setw(14) << r.cer << std::setw(10)
                  << std::fixed << std::setprecision(2) << r.seconds << std::defaultfloat << std::setprecision(6) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clifford-algebra space-time block codes for relay networks"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    auto* construct = app.add_subcommand("construct", "build a design, write it to a file and print its checks");
    std::string family = "pciod", out_design;
    int relays = 4, a = 0, g = 4;
    construct->add_option("--family", family, "pciod | cuwd | eca-a2 | eca-a3 | abba | alamouti | field-ext | golden | single")->capture_default_str();
    construct->add_option("--relays", relays, "number of relays (pciod)")->capture_default_str();
    construct->add_option("-a", a, "number of central generators (cuwd, eca-a2, eca-a3, abba)")->capture_default_str();
    construct->add_option("-g", g, "number of groups (cuwd) or anticommuting generators (abba)")->capture_default_str();
    construct->add_option("--out", out_design, "design file to write");

    auto* verify = app.add_subcommand("verify", "run all checks on a design file");
    std::string verify_path, verify_signal;
    int verify_side = 2;
    verify->add_option("design", verify_path, "design file")->required()->check(CLI::ExistingFile);
    verify->add_option("--signal", verify_signal, "also check full diversity with this signal set (qam, lattice, rotated:<deg>, ...)");
    verify->add_option("--side", verify_side, "PAM levels per dimension for --signal")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep and write a CSV");
    std::string config_path, out_csv;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    sweep->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    sweep->add_option("--out", out_csv, "CSV output (stdout when omitted)");
    sweep->add_option("--seed", seed, "overrides the config seed");
    sweep->add_option("--threads", threads, "worker threads, 0 = all cores");
    sweep->add_option("--set", overrides, "override a config key, key=value (repeatable)");

    auto* slope = app.add_subcommand("slope", "fit the diversity slope of a sweep CSV");
    std::string in_csv;
    double min_cer = 1e-4, max_cer = 1e-1;
    std::optional<double> target;
    slope->add_option("--in", in_csv, "CSV written by sweep")->required()->check(CLI::ExistingFile);
    slope->add_option("--min-cer", min_cer, "lower edge of the fit window")->capture_default_str();
    slope->add_option("--max-cer", max_cer, "upper edge of the fit window")->capture_default_str();
    slope->add_option("--at-cer", target, "also report the power needed for this CER");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*construct) {
            const auto d = build_family(family, relays, a, g);
            if (!out_design.empty()) {
                save_design(out_design, d);
                std::cout << "wrote " << out_design << "\n";
            }
            return print_report(analyse(d));
        }
        if (*verify) {
            const auto d = load_design(verify_path);
            Report rep = analyse(d);
            if (!verify_signal.empty() && rep.failure.empty()) {
                const StbcCodebook cb(d, build_signal_sets(d, "file", verify_signal, verify_side));
                const bool full = check_full_diversity(cb);
                rep.lines.push_back("full diversity with " + verify_signal + " (" + std::to_string(cb.size()) + " codewords): " + yes_no(full));
                if (!full) rep.failure = "codebook is not fully diverse";
            }
            return print_report(rep);
        }
        if (*sweep) {
            ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
            for (const auto& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
                apply_config_value(c, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
            }
            if (seed) c.seed = *seed;
            if (threads) c.threads = *threads;
            const auto rows = run_sweep(c);
            const std::string csv = format_csv(rows, c);
            if (out_csv.empty()) {
                std::cout << csv;
            } else {
                std::ofstream f(out_csv);
                if (!f) throw std::runtime_error("cannot write " + out_csv);
                f << csv;
                print_rows(rows);
                std::cout << "wrote " << out_csv << "\n";
            }
            return 0;
        }
        if (*slope) {
            std::ifstream f(in_csv);
            std::ostringstream ss;
            ss << f.rdbuf();
            const auto rows = parse_csv(ss.str());
            std::cout << "slope " << estimate_diversity_slope(rows, min_cer, max_cer) << " over CER in [" << min_cer << ", " << max_cer << "]\n";
            if (target) {
                if (const auto at = power_at_cer(rows, *target))
                    std::cout << "P at CER " << *target << ": " << at->p_db << " dB (95% CI " << at->lo << " to " << at->hi << ")\n";
                else
                    std::cout << "P at CER " << *target << ": not bracketed by the sweep\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
