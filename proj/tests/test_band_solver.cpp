#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "superbloch/band_solver.hpp"

using namespace sbl;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("free-particle Bloch matrix reproduces folded parabolas") {
    SUBCASE("k = 0") {
        const auto sol = solve_bands({0, 0, 0}, 0.0, 6);
        const double expected[] = {0.0, 0.25, 0.25, 1.0, 1.0, 2.25};
        for (int b = 0; b < 6; ++b)
            CHECK(sol.energies(b) == doctest::Approx(expected[b]).epsilon(1e-12));
    }
    SUBCASE("k = 1 (zone edge)") {
        const auto sol = solve_bands({0, 0, 0}, 1.0, 5);
        const double expected[] = {0.0625, 0.0625, 0.5625, 0.5625, 1.5625};
        for (int b = 0; b < 5; ++b)
            CHECK(sol.energies(b) == doctest::Approx(expected[b]).epsilon(1e-12));
    }
    SUBCASE("free vectors are unit plane-wave selectors") {
        const auto sol = solve_bands({0, 0, 0}, 0.37, 5);
        for (int b = 0; b < 5; ++b) {
            Eigen::VectorXd mags = sol.vectors.col(b).cwiseAbs();
            int imax = 0;
            CHECK(mags.maxCoeff(&imax) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(sol.vectors(imax, b).real() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("Bloch matrix structure") {
    const auto bm = bloch_hamiltonian({3.0, 2.0, kPi / 8.0}, 0.5, 12);
    SUBCASE("Hermitian") {
        CHECK((bm.entries - bm.entries.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("couplings only at |n-n'| = 4 and 5") {
        const int dim = 2 * bm.cutoff + 1;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                const int d = std::abs(i - j);
                if (d != 0 && d != 4 && d != 5)
                    CHECK(std::abs(bm.entries(i, j)) == 0.0);
            }
        CHECK(bm.entries(4, 0).real() == doctest::Approx(-0.75));
        const std::complex<double> c5 =
            -0.5 * std::exp(std::complex<double>(0.0, 2.0 * kPi / 8.0));
        CHECK(std::abs(bm.entries(5, 0) - c5) < 1e-14);
    }
    SUBCASE("cutoff below 10 rejected") {
        CHECK_THROWS_AS(bloch_hamiltonian({1, 1, 0}, 0.0, 9), std::invalid_argument);
    }
}

TEST_CASE("plane-wave energies match the real-space finite-difference oracle") {
    // Spot instance from the solver contract; the full 33-point sweep runs in
    // the acceptance suite.
    const LatticeParams p{3.0, 2.0, 0.0};
    const auto pw = solve_bands(p, 0.5, 5);
    const auto fd = sbl::oracle::finite_difference_bands(p, 0.5, 5, 4096);
    for (int b = 0; b < 5; ++b)
        CHECK(std::abs(pw.energies(b) - fd(b)) / std::abs(fd(b)) < 1e-6);
}

TEST_CASE("eigenvalue convergence in the plane-wave cutoff") {
    for (const LatticeParams p : {LatticeParams{10.0, 8.0, 0.2}, {3.0, 2.0, 0.0}}) {
        const auto a = solve_bands(p, 0.35, 5, 25);
        const auto b = solve_bands(p, 0.35, 5, 50);
        CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("band structure symmetries") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ks(-1.0, 1.0);
    SUBCASE("parity E(k) = E(-k)") {
        const LatticeParams p{2.0, 1.3, 0.47};
        for (int i = 0; i < 8; ++i) {
            const double k = ks(rng);
            const auto a = solve_bands(p, k, 5);
            const auto b = solve_bands(p, -k, 5);
            CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
    SUBCASE("phi -> phi + pi/4 leaves the spectrum unchanged") {
        for (int i = 0; i < 8; ++i) {
            const double k = ks(rng);
            const auto a = solve_bands({2.5, 1.1, 0.31}, k, 5);
            const auto b = solve_bands({2.5, 1.1, 0.31 + kPi / 4.0}, k, 5);
            CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
    SUBCASE("phi -> -phi leaves the spectrum unchanged") {
        for (int i = 0; i < 8; ++i) {
            const double k = ks(rng);
            const auto a = solve_bands({2.5, 1.1, 0.31}, k, 5);
            const auto b = solve_bands({2.5, 1.1, -0.31}, k, 5);
            CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("band scan") {
    SUBCASE("gauge smoothness away from sharp crossings") {
        const auto bs = band_scan({3.0, 2.0, 0.0}, 1024, 5);
        CHECK(bs.min_successive_overlap > 0.9);
        CHECK(bs.hard_degeneracies.empty());
    }
    SUBCASE("scan parity within 1e-9") {
        const auto bs = band_scan({2.0, 2.0, 0.0}, 513, 4);
        const int n = bs.n_points();
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < 4; ++b)
                CHECK(std::abs(bs.energies(i, b) - bs.energies(n - 1 - i, b)) < 1e-9);
    }
    SUBCASE("(8,5,0): bands 2 and 3 nearly degenerate across the zone") {
        const auto prof = gap_profile({8.0, 5.0, 0.0}, 2, 512);
        CHECK(prof.max < 0.02); // close throughout, not just at one k
    }
    SUBCASE("(3,2,0): gap 4-5 much larger than gaps among bands 1-4") {
        const auto bs = band_scan({3.0, 2.0, 0.0}, 513, 5);
        double max_low = 0.0, min_45 = 1e30;
        for (int i = 0; i < bs.n_points(); ++i) {
            for (int b = 0; b < 3; ++b)
                max_low = std::max(max_low, bs.energies(i, b + 1) - bs.energies(i, b));
            min_45 = std::min(min_45, bs.energies(i, 4) - bs.energies(i, 3));
        }
        CHECK(min_45 > 2.0 * max_low);
    }
    SUBCASE("free-particle scan flags hard degeneracies") {
        const auto bs = band_scan({0.0, 0.0, 0.0}, 257, 5);
        CHECK(!bs.hard_degeneracies.empty());
    }
}

TEST_CASE("derivative couplings") {
    SUBCASE("anti-Hermiticity X_ab = -conj(X_ba)") {
        const LatticeParams p{2.0, 1.0, kPi / 8.0};
        for (double k : {-0.7, -0.2, 0.33, 0.9}) {
            for (int a = 1; a <= 4; ++a)
                for (int b = a + 1; b <= 5; ++b) {
                    const auto xab = derivative_coupling(p, k, a, b);
                    const auto xba = derivative_coupling(p, k, b, a);
                    CHECK(std::abs(xab + std::conj(xba)) < 1e-10);
                }
        }
    }
    SUBCASE("free bands have zero coupling") {
        CHECK(std::abs(derivative_coupling({0, 0, 0}, 0.4, 1, 2)) < 1e-12);
        CHECK(std::abs(derivative_coupling({0, 0, 0}, 0.4, 2, 3)) < 1e-12);
    }
    SUBCASE("Hellmann-Feynman matches finite-difference eigenvector derivative") {
        const LatticeParams p{2.0, 2.0, 0.0};
        const double dk = 1e-6;
        for (double k : {0.5, 0.85, 0.99}) {
            auto mid = solve_bands(p, k, 3);
            auto fwd = solve_bands(p, k + dk, 3);
            auto bwd = solve_bands(p, k - dk, 3);
            // Parallel-transport gauge relative to the midpoint vectors.
            detail::align_to_reference(mid.vectors, fwd.vectors, fwd.energies);
            detail::align_to_reference(mid.vectors, bwd.vectors, bwd.energies);
            const Eigen::MatrixXcd deriv = (fwd.vectors - bwd.vectors) / (2.0 * dk);
            for (int a = 1; a <= 2; ++a)
                for (int b = 1; b <= 2; ++b) {
                    if (a == b) continue;
                    const std::complex<double> fd =
                        mid.vectors.col(a - 1).dot(deriv.col(b - 1));
                    const std::complex<double> hf = derivative_coupling(p, k, a, b);
                    CHECK(std::abs(fd - hf) / std::abs(hf) < 1e-4);
                }
        }
    }
    SUBCASE("|X_12| peaks at the zone edge for (2,2,0)") {
        const LatticeParams p{2.0, 2.0, 0.0};
        const auto bs = band_scan(p, 512, 2);
        const auto crossing = find_crossings(bs, 1);
        double peak_k = 0.0, peak = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double k = 0.8 + 0.2 * i / 2000.0;
            const double mag = std::abs(derivative_coupling(p, k, 1, 2));
            if (mag > peak) { peak = mag; peak_k = k; }
        }
        CHECK(std::abs(peak_k - crossing.k_c) < 1e-3);
        CHECK(peak > std::abs(derivative_coupling(p, 0.5, 1, 2)));

        // Finite-difference eigenvector derivative as the oracle at the peak.
        const double dk = 1e-6;
        auto mid = solve_bands(p, peak_k - dk, 2); // one-sided: peak may sit at k = 1
        auto fwd = solve_bands(p, peak_k, 2);
        detail::align_to_reference(mid.vectors, fwd.vectors, fwd.energies);
        const std::complex<double> fd =
            mid.vectors.col(0).dot((fwd.vectors.col(1) - mid.vectors.col(1)) / dk);
        const std::complex<double> hf =
            derivative_coupling(p, peak_k - 0.5 * dk, 1, 2);
        CHECK(std::abs(fd - hf) / std::abs(hf) < 1e-4);
    }
    SUBCASE("a narrow crossing produces a sharply localized coupling") {
        // Low depths: the 1-2 gap is ~1e-2 E_R, so |X_12| concentrates in a
        // few-percent slice of the zone around the edge.
        const LatticeParams p{0.5, 0.25, kPi / 8.0};
        double peak = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double k = 0.9 + 0.1 * i / 400.0;
            peak = std::max(peak, std::abs(derivative_coupling(p, k, 1, 2)));
        }
        const double mid = std::abs(derivative_coupling(p, 0.5, 1, 2));
        CHECK(peak > 10.0 * mid);
    }
}

TEST_CASE("crossing geometry") {
    SUBCASE("pairs (1,2) and (3,4) sit at the zone edge, (2,3) at the center") {
        const auto bs = band_scan({2.0, 1.0, kPi / 8.0}, 1024, 5);
        CHECK(std::abs(find_crossings(bs, 1).k_c) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(find_crossings(bs, 2).k_c == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(std::abs(find_crossings(bs, 3).k_c) == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("A2 -> 0 closes the folded gap between bands 1 and 2") {
        double prev = 1e30;
        for (double a2 : {0.5, 0.1, 0.02}) {
            const auto bs = band_scan({2.0, a2, 0.0}, 512, 2);
            const auto info = find_crossings(bs, 1);
            CHECK(info.delta_min < prev);
            prev = info.delta_min;
        }
        CHECK(prev < 5e-3);
    }
}

TEST_CASE("gap profiles in the deep lattice") {
    SUBCASE("phi sweep shape at (8,5)") {
        const auto d23_0 = gap_profile({8, 5, 0.0}, 2, 512);
        const auto d23_mid = gap_profile({8, 5, kPi / 16.0}, 2, 512);
        const auto d23_8 = gap_profile({8, 5, kPi / 8.0}, 2, 512);
        CHECK(d23_0.mean < d23_mid.mean);
        CHECK(d23_mid.mean < d23_8.mean);

        const auto d12_0 = gap_profile({8, 5, 0.0}, 1, 512);
        const auto d12_mid = gap_profile({8, 5, kPi / 16.0}, 1, 512);
        const auto d12_8 = gap_profile({8, 5, kPi / 8.0}, 1, 512);
        CHECK(d12_8.mean < d12_mid.mean);
        CHECK(d12_mid.mean < d12_0.mean);

        const auto d34_0 = gap_profile({8, 5, 0.0}, 3, 512);
        const auto d34_8 = gap_profile({8, 5, kPi / 8.0}, 3, 512);
        CHECK(d34_8.mean < d34_0.mean);
    }
    SUBCASE("(8,5,pi/8) gaps vary by no more than 0.5%") {
        for (int pair : {1, 2, 3}) {
            const auto prof = gap_profile({8, 5, kPi / 8.0}, pair, 2048);
            CHECK(prof.relative_variation <= 0.005);
        }
    }
    SUBCASE("free bands touch") {
        const auto prof = gap_profile({0, 0, 0}, 1, 512);
        CHECK(prof.min < 1e-12);
    }
}
