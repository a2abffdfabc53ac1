#include "cliffstbc/constructions.hpp"
#include "cliffstbc/lattice_tables.hpp"
#include "cliffstbc/relay.hpp"
#include "test_util.hpp"

#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>

using namespace cliffstbc;

namespace {

CMatrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

StbcCodebook pciod4_codebook() {
    return StbcCodebook(normalize_relay_power(construct_pciod(4)), std::vector<SignalSet>(4, rotated_qam(2, deg_to_rad(kPciodAngleDeg))));
}

StbcCodebook eca4_codebook() {
    return StbcCodebook(construct_eca_a2(1), std::vector<SignalSet>(4, rotated_qam(2, deg_to_rad(kEcaAngleDeg))));
}

StbcCodebook pciod3_codebook() {
    return StbcCodebook(normalize_relay_power(construct_pciod(3)), std::vector<SignalSet>(4, rotated_qam(2, deg_to_rad(kPciodAngleDeg))));
}

}  // namespace

TEST_CASE("PCIOD relay matrices", "[relay][golden]") {
    const auto d = normalize_relay_power(construct_pciod(4));
    auto golden = testutil::golden_design("pciod4.txt");
    for (auto& w : golden.weights) w *= std::sqrt(2.0);
    CHECK(testutil::same_weights(d, golden));

    const auto rs = extract_relay_structure(d);
    const auto want = testutil::read_matrix_lines("pciod4_relay_matrices.txt", std::sqrt(2.0));
    REQUIRE(rs.B.size() == 4u);
    for (std::size_t j = 0; j < 4; ++j) CHECK(approx_equal(rs.B[j], want[j], 1e-15));
    CHECK(rs.conjugated == std::vector<bool>{false, true, false, true});
    CHECK(rs.M == 2);
    for (const auto& B : rs.B) {
        CHECK(check_row_orthogonal(B));
        CHECK(B.squaredNorm() == Catch::Approx(4.0));
    }
}

TEST_CASE("relay matrices of the A_2^2 design", "[relay]") {
    const auto rs = extract_relay_structure(construct_eca_a2(1));
    CHECK(rs.M == 2);
    CHECK(rs.conjugated == std::vector<bool>{false, false, true, true});
    CHECK(approx_equal(rs.B[0], identity(4), 0.0));
    CHECK(approx_equal(rs.B[1], real_matrix({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}), 0.0));
    CHECK(approx_equal(rs.B[2], real_matrix({{0, 0, -1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}}), 0.0));
    CHECK(approx_equal(rs.B[3], real_matrix({{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}}), 0.0));
}

TEST_CASE("non-conjugate designs are rejected", "[relay]") {
    try {
        extract_relay_structure(design_from_template("mixed", "z1, z2; z2 + z1*, z1"));
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("not a conjugate LSTD") != std::string::npos);
    }
    CHECK_THROWS_AS(extract_relay_structure(golden_code_design()), std::invalid_argument);
    CHECK_THROWS_AS(extract_relay_structure(od_4x4_complex()), std::invalid_argument);  // K != 2T
    // Conjugate but with rows that are not a relay schedule: extraction itself succeeds.
    CHECK(extract_relay_structure(row_structure_counterexample()).M == 2);
}

TEST_CASE("row orthogonality", "[relay]") {
    CHECK(check_row_orthogonal(identity(3)));
    CHECK(check_row_orthogonal(real_matrix({{0, -1}, {1, 0}})));
    CHECK_FALSE(check_row_orthogonal(CMatrix::Ones(2, 2)));
}

TEST_CASE("noise covariance", "[relay]") {
    std::mt19937_64 rng(2);
    {
        const auto cfg = make_relay_config(construct_eca_a2(1), 100.0);
        const auto ch = sample_channel(4, rng);
        const double want = 1.0 + cfg.noise_scale() * ch.g.squaredNorm();
        CHECK(approx_equal(noise_covariance(cfg, ch), want * identity(4), 1e-12));
        ChannelRealization quiet{ch.f, CVector::Zero(4)};
        CHECK(approx_equal(noise_covariance(cfg, quiet), identity(4), 0.0));
    }
    {
        const auto cfg = make_relay_config(normalize_relay_power(construct_pciod(4)), 10.0);
        const auto ch = sample_channel(4, rng);
        const double c = cfg.pi2 * cfg.P / (cfg.pi1 * cfg.P + 1.0);
        CVector diag(4);
        const double top = 1.0 + c * 2.0 * (std::norm(ch.g(0)) + std::norm(ch.g(1)));
        const double bottom = 1.0 + c * 2.0 * (std::norm(ch.g(2)) + std::norm(ch.g(3)));
        diag << top, top, bottom, bottom;
        const CMatrix G = noise_covariance(cfg, ch);
        CHECK(approx_equal(G, CMatrix(diag.asDiagonal()), 1e-12));
        const CMatrix W = whitening_matrix(G);
        CHECK(approx_equal(W * G * W.adjoint(), identity(4), 1e-12));
        CHECK(approx_equal(W, inverse_sqrt_hermitian(G), 1e-12));
    }
}

TEST_CASE("multi-group condition under the relay noise covariance", "[relay]") {
    std::mt19937_64 rng(4);
    const auto pc = normalize_relay_power(construct_pciod(4));
    const auto cfg = make_relay_config(pc, 10.0);
    for (int t = 0; t < 20; ++t) CHECK(check_multigroup_condition(pc, noise_covariance(cfg, sample_channel(4, rng))));

    // Unitary relays: scaled identity, so the condition is the collocated one.
    const auto eca = construct_eca_a2(1);
    const auto ecfg = make_relay_config(eca, 10.0);
    const CMatrix G = noise_covariance(ecfg, sample_channel(4, rng));
    CHECK(check_multigroup_condition(eca, G) == check_g_group_decodable(eca));
    auto wrong = eca;
    wrong.partition = {{0, 1}, {2, 3}, {4, 5}, {6, 7}};
    CHECK(check_multigroup_condition(wrong, G) == check_g_group_decodable(wrong));
    CHECK_FALSE(check_multigroup_condition(wrong, G));

    auto golden = golden_code_design();
    for (const Partition& p : {Partition{{0, 1, 2, 3}, {4, 5, 6, 7}}, Partition{{0, 2, 4, 6}, {1, 3, 5, 7}}, Partition{{0}, {1, 2, 3, 4, 5, 6, 7}}}) {
        golden.partition = p;
        CHECK_FALSE(check_multigroup_condition(golden, identity(2)));
    }

    // A non-diagonal covariance breaks the PCIOD grouping.
    CMatrix mixed = identity(4);
    mixed(0, 2) = mixed(2, 0) = 0.5;
    CHECK_FALSE(check_multigroup_condition(pc, mixed));
}

TEST_CASE("noise-free pipeline equals the closed-form model", "[relay]") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n01;
    std::vector<LinearSpaceTimeDesign> designs{alamouti_design(), normalize_relay_power(construct_pciod(4)), construct_eca_a2(1),
                                               construct_eca_a2(2), construct_eca_a3(0), normalize_relay_power(construct_pciod(3)),
                                               normalize_relay_power(construct_pciod(6)), field_extension_design(), single_relay_design()};
    for (const auto& d : designs) {
        const auto cfg = make_relay_config(d, 31.6);
        for (int t = 0; t < 20; ++t) {
            RVector x(d.K());
            for (int k = 0; k < d.K(); ++k) x(k) = n01(rng);
            const auto ch = sample_channel(cfg.R, rng);
            const CVector y = simulate_two_phase(cfg, complex_symbols(x), ch, nullptr);
            const CVector model = cfg.signal_amplitude() * d.codeword(x) * equivalent_channel(cfg.relays, ch);
            CHECK(max_abs(y - model) <= 1e-10 * std::max(1.0, max_abs(model)));
        }
    }
}

TEST_CASE("equivalent channel assembly", "[relay]") {
    const auto rs = extract_relay_structure(construct_eca_a2(1));
    ChannelRealization ch;
    ch.f = CVector(4);
    ch.g = CVector(4);
    ch.f << cd(1, 2), cd(3, -1), cd(0.5, 0.5), cd(-2, 1);
    ch.g << cd(0, 1), cd(1, 1), cd(2, 0), cd(1, -1);
    const CVector h = equivalent_channel(rs, ch);
    CHECK(h(0) == ch.f(0) * ch.g(0));
    CHECK(h(1) == ch.f(1) * ch.g(1));
    CHECK(h(2) == std::conj(ch.f(2)) * ch.g(2));
    CHECK(h(3) == std::conj(ch.f(3)) * ch.g(3));
}

TEST_CASE("noise-free decoding returns the transmitted codeword", "[relay]") {
    std::mt19937_64 rng(8);
    for (const auto& cb : {pciod4_codebook(), eca4_codebook(), pciod3_codebook()}) {
        const auto cfg = make_relay_config(cb.design(), 100.0);
        std::uniform_int_distribution<std::size_t> pick(0, cb.size() - 1);
        for (int t = 0; t < 30; ++t) {
            const std::size_t sent = pick(rng);
            const auto ch = sample_channel(cfg.R, rng);
            const CVector y = simulate_two_phase(cfg, complex_symbols(cb.symbols(sent)), ch, nullptr);
            CHECK(ml_decode_full(y, cb, cfg, ch) == sent);
            CHECK(ml_decode_groups(y, cb, cfg, ch) == sent);
        }
    }
}

TEST_CASE("group decoder agrees with full ML decoder", "[relay][oracle]") {
    std::mt19937_64 rng(10);
    for (const auto& cb : {pciod4_codebook(), eca4_codebook(), pciod3_codebook()}) {
        for (double P : {10.0, 100.0}) {
            const auto cfg = make_relay_config(cb.design(), P);
            std::uniform_int_distribution<std::size_t> pick(0, cb.size() - 1);
            int agree = 0, errors = 0;
            const int trials = 1000;
            for (int t = 0; t < trials; ++t) {
                const std::size_t sent = pick(rng);
                const auto ch = sample_channel(cfg.R, rng);
                const CVector y = simulate_two_phase(cfg, complex_symbols(cb.symbols(sent)), ch, &rng);
                const std::size_t full = ml_decode_full(y, cb, cfg, ch);
                agree += full == ml_decode_groups(y, cb, cfg, ch) ? 1 : 0;
                errors += full != sent ? 1 : 0;
            }
            CHECK(agree == trials);
            CHECK(errors > 0);  // the noise actually matters at these powers
        }
    }
}

TEST_CASE("cross-group terms of the whitened metric vanish", "[relay][property]") {
    std::mt19937_64 rng(12);
    for (const auto& cb : {pciod4_codebook(), eca4_codebook()}) {
        const auto cfg = make_relay_config(cb.design(), 10.0);
        for (int t = 0; t < 20; ++t) {
            const auto ch = sample_channel(cfg.R, rng);
            const CMatrix Gi = noise_covariance(cfg, ch).inverse();
            const CVector h = equivalent_channel(cfg.relays, ch);
            for (int a = 0; a < cb.groups(); ++a)
                for (int b = a + 1; b < cb.groups(); ++b)
                    for (std::size_t p = 0; p < 4; ++p) {
                        const CMatrix& Xa = cb.group_codeword(a, p);
                        const CMatrix& Xb = cb.group_codeword(b, 3 - p);
                        CHECK(std::abs((h.adjoint() * Xa.adjoint() * Gi * Xb * h)(0, 0).real()) <= 1e-9);
                    }
        }
    }
}

TEST_CASE("group decoding is refused when the condition fails", "[relay]") {
    auto d = field_extension_design();
    d.partition = {{0, 1, 2, 3}, {4, 5, 6, 7}};
    const StbcCodebook cb(d, std::vector<SignalSet>(2, pam_signal_set(4, 2)));
    const auto cfg = make_relay_config(d, 10.0);
    std::mt19937_64 rng(1);
    const auto ch = sample_channel(4, rng);
    const CVector y = simulate_two_phase(cfg, complex_symbols(cb.symbols(3)), ch, nullptr);
    CHECK_THROWS_AS(ml_decode_groups(y, cb, cfg, ch), std::invalid_argument);
    CHECK(ml_decode_full(y, cb, cfg, ch) == 3u);
}

TEST_CASE("relay transmit power", "[relay][statistical]") {
    std::mt19937_64 rng(14);
    const auto cb = pciod4_codebook();
    const auto cfg = make_relay_config(cb.design(), 1000.0);
    std::uniform_int_distribution<std::size_t> pick(0, cb.size() - 1);
    const int samples = 10000;
    std::vector<double> energy(4, 0.0);
    for (int s = 0; s < samples; ++s) {
        const CVector z = complex_symbols(cb.symbols(pick(rng)));
        for (int j = 0; j < 4; ++j) {
            CVector r = std::sqrt(cfg.pi1 * cfg.P) * complex_normal(rng) * z + complex_normal_vector(4, rng);
            if (cfg.relays.conjugated[static_cast<std::size_t>(j)]) r = r.conjugate().eval();
            energy[static_cast<std::size_t>(j)] += (cfg.relay_gain() * (cfg.relays.B[static_cast<std::size_t>(j)] * r)).squaredNorm();
        }
    }
    for (double e : energy) CHECK(e / samples / cfg.T == Catch::Approx(cfg.pi2 * cfg.P).epsilon(0.05));
}

TEST_CASE("relay configuration checks", "[relay]") {
    CHECK_THROWS_AS(make_relay_config(construct_pciod(4), 10.0), std::invalid_argument);  // ||B||^2 = 2, not 4
    CHECK_NOTHROW(make_relay_config(construct_pciod(4), 10.0, 1.0, 0.0, false));
    CHECK_THROWS_AS(make_relay_config(construct_eca_a2(1), 10.0, 1.0, 0.5), std::invalid_argument);
    CHECK_NOTHROW(make_relay_config(construct_eca_a2(1), 10.0, 1.2, 0.2));
    CHECK_THROWS_AS(make_relay_config(construct_eca_a2(1), -1.0), std::invalid_argument);
    const auto cfg = make_relay_config(construct_eca_a2(1), 10.0);
    CHECK(cfg.pi2 == 0.25);
    CHECK_THROWS_AS(simulate_two_phase(cfg, CVector::Zero(3), sample_channel(4, *std::make_unique<std::mt19937_64>(1)), nullptr),
                    std::invalid_argument);
    CHECK(complex_symbols(real_symbols(CVector::Ones(3) * cd(1, -2))) == CVector::Ones(3) * cd(1, -2));
}
