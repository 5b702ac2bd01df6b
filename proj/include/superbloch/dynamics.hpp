#pragma once

// Band-amplitude dynamics under a constant force.
//
// The amplitudes are integrated in quasimomentum. With k in k_r units and a
// dimensionless force magnitude f, the quasimomentum advances one full zone
// per Bloch period tau_B = 2 pi / f, i.e. k(t) = k0 +- (f/pi) t, and the
// force enters the amplitude equations only through the phase accumulation
// rate: theta_ab(k) = (1/f) Int (E_a - E_b) dk'. The coupled equations are
//
//   dc_a/dk = - sum_{b != a} X_ab(k) exp(+i theta_ab(k)) c_b,
//
// with X_ab the Hellmann-Feynman derivative coupling in the parallel-
// transport gauge (the gauge is maintained by anchoring each eigensystem's
// phases to the previous accepted step). Energies and couplings come from
// on-the-fly diagonalization at the integrator's own k points; nothing is
// interpolated from a grid.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "superbloch/band_solver.hpp"
#include "superbloch/units.hpp"

namespace sbl {

class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct BandState {
    Eigen::VectorXcd c;    // band amplitudes
    double k = 0.0;        // quasimomentum, k_r units, wrapped to [-1, 1)
    Eigen::VectorXd theta; // accumulated phase integrals (1/f) Int E_a dk'
    double t = 0.0;        // elapsed time, hbar/E_R

    int n_bands() const { return static_cast<int>(c.size()); }
    Eigen::VectorXd populations() const { return c.cwiseAbs2(); }
};

struct InitialDistribution {
    enum class Kind { dirac, gaussian };
    Kind kind = Kind::dirac;
    double k0 = 0.0;
    double sigma = 0.4; // k_r, gaussian kind only
    Eigen::VectorXcd band_weights;

    static InitialDistribution dirac(int band, int n_bands = 5, double k0 = 0.0);
    static InitialDistribution dirac_weights(Eigen::VectorXcd weights, double k0 = 0.0);
    static InitialDistribution gaussian(int band, double sigma, int n_bands = 5,
                                        double k0 = 0.0);
};

/// Dirac distributions only; Gaussian kinds become quadrature ensembles.
BandState init_state(const InitialDistribution& dist);

struct Ensemble {
    std::vector<double> k0;        // quadrature nodes
    Eigen::VectorXcd amplitudes;   // node amplitudes g_j, sum |g_j|^2 = 1
    InitialDistribution dist;
};

/// Gaussian quadrature ensemble over k0 +- 4 sigma.
Ensemble make_ensemble(const InitialDistribution& dist, int n_nodes = 64);

struct PropagationOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double sample_dk = 1e-3; // observer cadence in k_r
    double max_step = 1e-2;
    int cutoff = kDefaultCutoff;
    std::uint32_t gauge_noise_seed = 0; // test hook: random phases on raw eigenvectors
};

struct TrajectorySample {
    double t = 0.0; // hbar/E_R
    double k = 0.0; // wrapped
    Eigen::VectorXd populations;
};

struct SwitchEvent {
    double t = 0.0, k = 0.0;
    LatticeParams from, to;
    Eigen::VectorXd populations_before, populations_after;
    double leakage = 0.0; // norm lost to the truncated basis, before renormalization
    std::string label;
};

struct Trajectory {
    double tau_b = 0.0;
    std::vector<TrajectorySample> samples;
    std::vector<SwitchEvent> events;

    /// CSV columns: t, t_over_tauB, k, pop_1..pop_n. stride > 1 keeps every
    /// stride-th sample (the first sample is always written).
    void write_csv(std::ostream& os, int stride = 1) const;

    /// Populations at time t from the stored samples (linear interpolation).
    Eigen::VectorXd populations_at(double t) const;
};

namespace detail {

/// Eigensystems for the dynamics: windowed plane-wave solves certified
/// against the full cutoff matrix, cached by exact k, phases canonicalized.
class EigensystemProvider {
  public:
    EigensystemProvider(const LatticeParams& params, int n_bands, int cutoff,
                        std::uint32_t noise_seed);

    struct Entry {
        double k_wrapped = 0.0;
        long shift = 0;             // extended k = k_wrapped + 2*shift
        Eigen::VectorXd energies;   // n_bands
        Eigen::MatrixXcd vectors;   // full dim x n_bands, wrapped frame
    };

    const Entry& at(double kappa_extended);

    void set_params(const LatticeParams& params); // invalidates the cache
    const LatticeParams& params() const { return params_; }
    int dim() const { return 2 * cutoff_ + 1; }
    int n_bands() const { return n_bands_; }
    int cutoff() const { return cutoff_; }

  private:
    Entry solve(double kappa) const;

    LatticeParams params_;
    int n_bands_, cutoff_;
    int window_; // current half-width of the solve window
    std::uint32_t noise_seed_;
    std::uint64_t epoch_ = 0;
    mutable std::vector<std::pair<std::uint64_t, Entry>> ring_;
    mutable std::size_t ring_next_ = 0;
};

} // namespace detail

/// One evolving band state plus its transported gauge frame. Schedules drive
/// this directly; the free propagate() wraps it for single segments.
class BandPropagator {
  public:
    BandPropagator(const BandState& initial, const LatticeParams& params,
                   const ForceSpec& force, const PropagationOptions& opts = {});

    using Sampler = std::function<void(const TrajectorySample&)>;

    /// Advances until elapsed time t_target (hbar/E_R), emitting samples at
    /// the k cadence plus the exact endpoint.
    void advance_to_time(double t_target, const Sampler& sampler = nullptr);

    /// Sudden parameter switch at the current point: the frozen state is
    /// re-expanded in the new eigenbasis, phase bookkeeping restarts.
    SwitchEvent switch_params(const LatticeParams& new_params,
                              const std::string& label = {});

    const BandState& state() const { return state_; }
    double time() const { return state_.t; }
    double tau_b() const;
    const LatticeParams& params() const { return provider_.params(); }

    /// Gauge frame at the current point: column b is the band-b eigenvector
    /// (full plane-wave dim, wrapped frame) the amplitudes refer to.
    Eigen::MatrixXcd frame_wrapped() const;

    /// Physical plane-wave coefficients sum_a c_a e^{-i theta_a} v_a.
    Eigen::VectorXcd plane_wave_state() const;

  private:
    void rhs(double u, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydx);
    Eigen::MatrixXcd aligned_vectors(double kappa) const;
    void rebase_anchor(long new_base);
    double kappa_of_u(double u) const { return dir_ > 0 ? u : -u; }

    detail::EigensystemProvider provider_;
    ForceSpec force_;
    PropagationOptions opts_;
    BandState state_;
    int dir_;
    double kappa_;          // extended (unwrapped) quasimomentum
    double kappa_origin_;   // kappa at t = 0 of this propagator's clock
    double t_origin_;
    Eigen::MatrixXcd anchor_;   // gauge reference, rebased frame
    long base_shift_ = 0;
    double next_sample_u_ = 0.0;
};

/// Evolves `initial` for `duration` (hbar/E_R) at fixed parameters.
Trajectory propagate(const BandState& initial, const LatticeParams& params,
                     const ForceSpec& force, double duration,
                     const PropagationOptions& opts = {});

/// Sudden-switch re-expansion c'_b = sum_a <v'_b|v_a> c_a e^{-i theta_a} with
/// canonical gauges on both sides; theta resets, the result is renormalized
/// and the norm lost to the truncation is reported through `leakage`.
BandState reproject(const BandState& state, const LatticeParams& old_params,
                    const LatticeParams& new_params, int cutoff = kDefaultCutoff,
                    double* leakage = nullptr);

struct DensityMap {
    Eigen::VectorXd x;       // d units
    Eigen::VectorXd t;       // hbar/E_R
    Eigen::MatrixXd density; // t rows, x cols; each row integrates to 1
    Eigen::VectorXd com;     // center of mass per sample time
    std::string warning;
};

/// |psi(x,t)|^2 for a Gaussian ensemble: coherent sum over quadrature nodes
/// of c_a e^{-i theta_a} Phi_{a,k(t)}(x). In the adiabatic regime (estimated
/// Landau-Zener transfer below `adiabatic_threshold`) the amplitudes stay
/// frozen and phases come from dense-scan quadrature; otherwise each node is
/// propagated with the full amplitude ODE.
DensityMap wavepacket_density(const InitialDistribution& dist,
                              const LatticeParams& params, const ForceSpec& force,
                              const Eigen::VectorXd& x_grid,
                              const Eigen::VectorXd& t_grid,
                              const PropagationOptions& opts = {},
                              double adiabatic_threshold = 1e-8);

} // namespace sbl
