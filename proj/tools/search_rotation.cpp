// Random search for rotations with large minimum product distance on a
// 4-PAM grid. Its output is pasted into include/cliffstbc/lattice_tables.hpp.
//
//   search_rotation --dim 3 --samples 20000 --refine 20000 --seed 1

#include "cliffstbc/diversity.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <random>

using namespace cliffstbc;

namespace {

// Differences of 4-PAM points are 2 d with d in {-3..3}^dim; one of +-d suffices.
std::vector<RVector> half_differences(int dim) {
    std::vector<RVector> out;
    for (const auto& v : pam_grid(dim, 7)) {
        const RVector d = v / 2.0;
        int first = 0;
        while (first < dim && d(first) == 0.0) ++first;
        if (first < dim && d(first) > 0.0) out.push_back(d);
    }
    return out;
}

double metric(const RMatrix& g, const std::vector<RVector>& diffs) {
    double best = 1e300;
    for (const auto& d : diffs) best = std::min(best, std::abs((g * d).prod()));
    return best;
}

RMatrix random_orthogonal(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n01;
    RMatrix a(dim, dim);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n01(rng);
    Eigen::HouseholderQR<RMatrix> qr(a);
    RMatrix q = qr.householderQ();
    const RMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
}

RMatrix nearby(const RMatrix& q, double step, std::mt19937_64& rng) {
    std::normal_distribution<double> n01;
    RMatrix s = RMatrix::Zero(q.rows(), q.cols());
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = i + 1; j < q.cols(); ++j) {
            s(i, j) = step * n01(rng);
            s(j, i) = -s(i, j);
        }
    // Cayley transform keeps the result exactly orthogonal.
    const RMatrix id = RMatrix::Identity(q.rows(), q.cols());
    return q * (id - s).inverse() * (id + s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"search rotations maximizing the minimum product distance"};
    int dim = 3;
    long samples = 20000, refine = 20000;
    std::uint64_t seed = 1;
    app.add_option("--dim", dim, "lattice dimension")->check(CLI::Range(2, 8));
    app.add_option("--samples", samples, "random starting rotations");
    app.add_option("--refine", refine, "local refinement steps");
    app.add_option("--seed", seed, "RNG seed");
    CLI11_PARSE(app, argc, argv);

    std::mt19937_64 rng(seed);
    const auto diffs = half_differences(dim);
    RMatrix best = RMatrix::Identity(dim, dim);
    double best_m = 0.0;
    for (long s = 0; s < samples; ++s) {
        const RMatrix q = random_orthogonal(dim, rng);
        const double m = metric(q, diffs);
        if (m > best_m) {
            best_m = m;
            best = q;
        }
    }
    double step = 0.05;
    for (long s = 0; s < refine; ++s) {
        const RMatrix q = nearby(best, step, rng);
        const double m = metric(q, diffs);
        if (m > best_m) {
            best_m = m;
            best = q;
        }
        if (s % 2000 == 1999) step *= 0.7;
    }
    const double on_grid = min_product_distance(pam_grid(dim, 4), best);
    std::printf("// dim %d, seed %llu: min product distance on the 4-PAM grid = %.17g\n", dim,
                static_cast<unsigned long long>(seed), on_grid);
    for (int i = 0; i < dim; ++i) {
        std::printf("  ");
        for (int j = 0; j < dim; ++j) std::printf("%.17g%s", best(i, j), j + 1 < dim ? ", " : (i + 1 < dim ? ",\n" : "\n"));
    }
    return 0;
}
