#pragma once

// Plane-wave band solver for the period-4 superlattice.
//
// The Bloch Hamiltonian at quasimomentum k (k_r units) is expanded over
// plane-wave harmonics n in [-N, N] of the reciprocal vector G = 2 k_r:
// the kinetic diagonal is ((k/4) + (n/2))^2 E_R and the potential couples
// harmonics with |n - n'| = 4 and 5 only. Bands are labelled by ascending
// energy order at each k; avoided crossings therefore appear as
// near-touching sorted bands, never as re-labelled diabatic branches.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "superbloch/units.hpp"

namespace sbl {

inline constexpr int kDefaultCutoff = 25; // 51 harmonics

struct BlochMatrix {
    double k = 0.0;
    int cutoff = kDefaultCutoff;
    Eigen::MatrixXcd entries; // (2N+1) x (2N+1), row/col i <-> harmonic i - N
};

/// Builds the Bloch Hamiltonian. Requires cutoff >= 10 (the potential
/// couples harmonics five apart, so band 5 needs headroom beyond +-5)
/// and |k| <= 1.
BlochMatrix bloch_hamiltonian(const LatticeParams& params, double k,
                              int cutoff = kDefaultCutoff);

struct BandSolution {
    Eigen::VectorXd energies;  // ascending, size n_bands
    Eigen::MatrixXcd vectors;  // (2N+1) x n_bands, unit-cell normalized columns
};

/// Lowest n_bands eigenpairs at one k. Eigenvector phases are fixed by the
/// canonical convention (largest-magnitude component real positive).
BandSolution solve_bands(const LatticeParams& params, double k, int n_bands,
                         int cutoff = kDefaultCutoff);

struct BandStructure {
    LatticeParams params;
    int cutoff = kDefaultCutoff;
    Eigen::VectorXd k_grid;                // sorted, spans [-1, 1]
    Eigen::MatrixXd energies;              // n_points x n_bands
    std::vector<Eigen::MatrixXcd> vectors; // per k point, gauge-smoothed along k
    double min_successive_overlap = 1.0;   // gauge smoothness diagnostic
    std::vector<double> hard_degeneracies; // k where a gap < 1e-12 was found

    int n_bands() const { return static_cast<int>(energies.cols()); }
    int n_points() const { return static_cast<int>(energies.rows()); }

    /// CSV export: header "k,E_1,..,E_n", one row per grid point.
    void write_csv(std::ostream& os) const;
};

/// Full-zone scan with gauge smoothing: each eigenvector's global phase is
/// chosen so its overlap with the previous k point's vector is real and
/// positive; near-degenerate clusters are aligned as a subspace.
BandStructure band_scan(const LatticeParams& params, int n_points = 1024,
                        int n_bands = 5, int cutoff = kDefaultCutoff);

/// Nonadiabatic coupling X_ab(k) = <u_a | d_k u_b> for a != b via
/// Hellmann-Feynman: <v_a| dH/dk |v_b> / (E_b - E_a), with dH/dk diagonal
/// in the plane-wave basis. The diagonal coupling is gauged to zero
/// (parallel transport). Bands are 1-based. Throws if the gap < 1e-12 E_R.
std::complex<double> derivative_coupling(const LatticeParams& params, double k,
                                         int band_a, int band_b,
                                         int cutoff = kDefaultCutoff);

struct CrossingInfo {
    int lower = 0, upper = 0;  // 1-based adjacent band pair
    double k_c = 0.0;          // quasimomentum of the minimum gap
    double delta_min = 0.0;    // E_R
    double epsilon = 0.0;      // transition half-width (k_r), filled by analysis
    std::vector<double> secondary_minima; // other local minima, if any
};

/// Locates the minimum gap between bands (lower, lower+1). The grid scan
/// is refined by golden-section search on fresh diagonalizations. All
/// local minima are recorded; k_c is the global one (ties broken toward
/// k >= 0). Throws if the pair is degenerate below 1e-12 at the minimum.
CrossingInfo find_crossings(const BandStructure& bs, int lower_band);

struct GapProfile {
    double mean = 0.0, min = 0.0, max = 0.0;
    double relative_variation = 0.0; // (max - min) / mean
};

/// Statistics of E_upper - E_lower over the full zone.
GapProfile gap_profile(const LatticeParams& params, int lower_band,
                       int n_points = 2048, int cutoff = kDefaultCutoff);

namespace detail {

/// Rotates `current` so it matches `reference` as closely as possible:
/// plain real-positive phase alignment per column, except inside clusters
/// of near-degenerate columns (gap < cluster_tol) which are aligned as a
/// subspace via the polar factor of the overlap matrix.
void align_to_reference(const Eigen::MatrixXcd& reference, Eigen::MatrixXcd& current,
                        const Eigen::VectorXd& energies, double cluster_tol = 1e-9);

/// Canonical deterministic phase: largest-|.| component real positive.
void canonicalize_phases(Eigen::MatrixXcd& vectors);

/// dH/dk diagonal in the plane-wave basis: entry(n) = (k + 2n)/8.
Eigen::VectorXd kinetic_derivative(double k, int cutoff);

} // namespace detail

} // namespace sbl
