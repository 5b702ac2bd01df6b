#include "superbloch/band_solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sbl {

namespace {

constexpr double kDegenerateGap = 1e-12;

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> diagonalize(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("band solver: Hermitian eigensolver failed to converge");
    return solver;
}

} // namespace

BlochMatrix bloch_hamiltonian(const LatticeParams& params, double k, int cutoff) {
    params.validate();
    if (cutoff < 10)
        throw std::invalid_argument(
            "bloch_hamiltonian: cutoff must be >= 10 (couplings reach |n-n'| = 5)");
    if (std::abs(k) > 1.0 + 1e-12)
        throw std::invalid_argument("bloch_hamiltonian: |k| must be <= 1 (k_r units)");

    const int dim = 2 * cutoff + 1;
    const PotentialFourier table = fourier_components(params);

    BlochMatrix bm;
    bm.k = k;
    bm.cutoff = cutoff;
    bm.entries = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double n = i - cutoff;
        const double q = 0.25 * k + 0.5 * n;
        bm.entries(i, i) = q * q + table.offset;
    }
    for (const auto& [n, amp] : table.components) {
        for (int i = 0; i < dim; ++i) {
            const int j = i - n; // entry (i, j) couples harmonics i-N and j-N
            if (j >= 0 && j < dim) bm.entries(i, j) += amp;
        }
    }
    return bm;
}

BandSolution solve_bands(const LatticeParams& params, double k, int n_bands, int cutoff) {
    const int dim = 2 * cutoff + 1;
    if (n_bands < 1 || n_bands > dim)
        throw std::invalid_argument("solve_bands: n_bands must be in [1, 2N+1]");
    const auto solver = diagonalize(bloch_hamiltonian(params, k, cutoff).entries);
    BandSolution sol;
    sol.energies = solver.eigenvalues().head(n_bands);
    sol.vectors = solver.eigenvectors().leftCols(n_bands);
    detail::canonicalize_phases(sol.vectors);
    return sol;
}

void BandStructure::write_csv(std::ostream& os) const {
    os << "k";
    for (int b = 1; b <= n_bands(); ++b) os << ",E_" << b;
    os << "\n";
    os.precision(17);
    for (int i = 0; i < n_points(); ++i) {
        os << k_grid(i);
        for (int b = 0; b < n_bands(); ++b) os << "," << energies(i, b);
        os << "\n";
    }
}

BandStructure band_scan(const LatticeParams& params, int n_points, int n_bands, int cutoff) {
    if (n_points < 2) throw std::invalid_argument("band_scan: need at least 2 grid points");

    BandStructure bs;
    bs.params = params;
    bs.cutoff = cutoff;
    bs.k_grid = Eigen::VectorXd::LinSpaced(n_points, -1.0, 1.0);
    bs.energies.resize(n_points, n_bands);
    bs.vectors.resize(n_points);

    for (int i = 0; i < n_points; ++i) {
        BandSolution sol = solve_bands(params, bs.k_grid(i), n_bands, cutoff);
        bs.energies.row(i) = sol.energies.transpose();
        bs.vectors[i] = std::move(sol.vectors);

        for (int b = 0; b + 1 < n_bands; ++b)
            if (bs.energies(i, b + 1) - bs.energies(i, b) < kDegenerateGap)
                bs.hard_degeneracies.push_back(bs.k_grid(i));

        if (i > 0) {
            detail::align_to_reference(bs.vectors[i - 1], bs.vectors[i],
                                       bs.energies.row(i).transpose());
            for (int b = 0; b < n_bands; ++b) {
                const double ov =
                    std::abs(bs.vectors[i - 1].col(b).dot(bs.vectors[i].col(b)));
                bs.min_successive_overlap = std::min(bs.min_successive_overlap, ov);
            }
        }
    }
    return bs;
}

std::complex<double> derivative_coupling(const LatticeParams& params, double k,
                                         int band_a, int band_b, int cutoff) {
    if (band_a == band_b) return {0.0, 0.0}; // parallel-transport gauge
    const int top = std::max(band_a, band_b);
    const BandSolution sol = solve_bands(params, k, top, cutoff);
    const double ea = sol.energies(band_a - 1);
    const double eb = sol.energies(band_b - 1);
    if (std::abs(eb - ea) < kDegenerateGap)
        throw std::runtime_error("derivative_coupling: degenerate pair (gap < 1e-12 E_R)");
    const Eigen::VectorXd dh = detail::kinetic_derivative(k, cutoff);
    const std::complex<double> num =
        sol.vectors.col(band_a - 1).dot(dh.asDiagonal() * sol.vectors.col(band_b - 1));
    return num / (eb - ea);
}

namespace {

double pair_gap(const LatticeParams& params, double k, int lower, int cutoff) {
    const BandSolution sol = solve_bands(params, k, lower + 1, cutoff);
    return sol.energies(lower) - sol.energies(lower - 1);
}

// Golden-section minimization of the gap on [lo, hi].
double refine_minimum(const LatticeParams& params, int lower, int cutoff,
                      double lo, double hi, double tol = 1e-10) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = pair_gap(params, x1, lower, cutoff);
    double f2 = pair_gap(params, x2, lower, cutoff);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = pair_gap(params, x1, lower, cutoff);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = pair_gap(params, x2, lower, cutoff);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

CrossingInfo find_crossings(const BandStructure& bs, int lower_band) {
    if (lower_band < 1 || lower_band >= bs.n_bands())
        throw std::invalid_argument("find_crossings: band pair out of range");
    const int n = bs.n_points();
    const auto gap = [&](int i) {
        return bs.energies(i, lower_band) - bs.energies(i, lower_band - 1);
    };

    // All local minima of the sampled gap, endpoints included.
    std::vector<int> minima;
    for (int i = 0; i < n; ++i) {
        const bool left_ok = (i == 0) || gap(i) <= gap(i - 1);
        const bool right_ok = (i == n - 1) || gap(i) <= gap(i + 1);
        if (left_ok && right_ok) minima.push_back(i);
    }

    std::vector<std::pair<double, double>> refined; // (k, gap)
    for (int idx : minima) {
        const double lo = bs.k_grid(std::max(0, idx - 1));
        const double hi = bs.k_grid(std::min(n - 1, idx + 1));
        const double kc = refine_minimum(bs.params, lower_band, bs.cutoff, lo, hi);
        const double g = pair_gap(bs.params, kc, lower_band, bs.cutoff);
        // Drop duplicates produced by flat plateaus of the sampled gap.
        bool dup = false;
        for (const auto& [k0, g0] : refined)
            if (std::abs(k0 - kc) < 1e-6) dup = true;
        if (!dup) refined.emplace_back(kc, g);
    }

    auto best = refined.front();
    for (const auto& cand : refined) {
        if (cand.second < best.second - 1e-15 ||
            (std::abs(cand.second - best.second) <= 1e-12 && cand.first > best.first))
            best = cand;
    }

    CrossingInfo info;
    info.lower = lower_band;
    info.upper = lower_band + 1;
    info.k_c = best.first;
    info.delta_min = best.second;
    for (const auto& [k0, g0] : refined)
        if (std::abs(k0 - best.first) > 1e-6) info.secondary_minima.push_back(k0);
    if (info.delta_min < kDegenerateGap)
        throw std::runtime_error("find_crossings: hard degeneracy at the minimum gap");
    return info;
}

GapProfile gap_profile(const LatticeParams& params, int lower_band, int n_points,
                       int cutoff) {
    GapProfile prof;
    prof.min = std::numeric_limits<double>::infinity();
    prof.max = -prof.min;
    double sum = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double k = -1.0 + 2.0 * i / (n_points - 1);
        const double g = pair_gap(params, k, lower_band, cutoff);
        prof.min = std::min(prof.min, g);
        prof.max = std::max(prof.max, g);
        sum += g;
    }
    prof.mean = sum / n_points;
    prof.relative_variation = (prof.max - prof.min) / prof.mean;
    return prof;
}

namespace detail {

void canonicalize_phases(Eigen::MatrixXcd& vectors) {
    for (int c = 0; c < vectors.cols(); ++c) {
        int imax = 0;
        vectors.col(c).cwiseAbs().maxCoeff(&imax);
        const std::complex<double> z = vectors(imax, c);
        if (std::abs(z) > 0.0) vectors.col(c) *= std::conj(z) / std::abs(z);
    }
}

void align_to_reference(const Eigen::MatrixXcd& reference, Eigen::MatrixXcd& current,
                        const Eigen::VectorXd& energies, double cluster_tol) {
    const int nb = static_cast<int>(current.cols());
    int b = 0;
    while (b < nb) {
        int e = b + 1;
        while (e < nb && energies(e) - energies(e - 1) < cluster_tol) ++e;
        if (e - b == 1) {
            const std::complex<double> ov = reference.col(b).dot(current.col(b));
            if (std::abs(ov) > 0.0) current.col(b) *= std::conj(ov) / std::abs(ov);
        } else {
            // Near-degenerate cluster: pick the basis of the current subspace
            // closest to the reference (polar factor of the overlap matrix).
            const int p = e - b;
            const Eigen::MatrixXcd m = reference.middleCols(b, p).adjoint() *
                                       current.middleCols(b, p);
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
                m, Eigen::ComputeFullU | Eigen::ComputeFullV);
            current.middleCols(b, p) =
                current.middleCols(b, p) * svd.matrixV() * svd.matrixU().adjoint();
        }
        b = e;
    }
}

Eigen::VectorXd kinetic_derivative(double k, int cutoff) {
    const int dim = 2 * cutoff + 1;
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d(i) = (k + 2.0 * (i - cutoff)) / 8.0;
    return d;
}

} // namespace detail

} // namespace sbl
