#pragma once

// Dimensionless unit system shared by the whole library.
//
// The underlying simple lattice has period d and recoil energy
// E_R = hbar^2 pi^2 / (2 m d^2). The superlattice period is 4d, so the
// Brillouin zone half-width is k_r = pi/(4d). Conventions everywhere:
//
//   energy        : E_R
//   length        : d
//   time          : hbar/E_R       (hbar = 1)
//   force         : E_R/(4d)
//   quasimomentum : k_r = pi/(4d)  -> the zone is k in [-1, 1)
//
// The reciprocal lattice vector of the superlattice is G = 2 k_r, i.e. a
// plane-wave harmonic n corresponds to momentum n*G = (pi/2d)*n. With a
// dimensionless force magnitude f the quasimomentum advances at
// dk/dt = f/pi (k_r per time unit) and the Bloch period is tau_B = 2*pi/f.

#include <complex>
#include <map>
#include <stdexcept>

namespace sbl {

inline constexpr double kZoneHalfWidth = 1.0;   // k_r units
inline constexpr double kReciprocalVector = 2.0; // G, in k_r units
inline constexpr double kSuperlatticePeriod = 4.0; // in d units

/// Superlattice parameters: V(x) = -a1 cos^2(pi x) - a2 cos^2(5 pi x/4 + phi),
/// x in units of d, depths in E_R, phi in radians.
struct LatticeParams {
    double a1 = 0.0;
    double a2 = 0.0;
    double phi = 0.0;

    void validate() const {
        if (!(a1 >= 0.0) || !(a2 >= 0.0))
            throw std::invalid_argument("LatticeParams: potential depths must be >= 0");
        if (!std::isfinite(phi))
            throw std::invalid_argument("LatticeParams: phi must be finite");
    }

    bool operator==(const LatticeParams&) const = default;
};

/// Constant force; f is the dimensionless magnitude in E_R/(4d) units.
/// f = 0 is allowed only for static band analysis, never for dynamics.
struct ForceSpec {
    double f = 0.0;
    int direction = +1;

    void validate_for_dynamics() const {
        if (!(f > 0.0))
            throw std::invalid_argument("ForceSpec: dynamics requires f > 0");
        if (direction != 1 && direction != -1)
            throw std::invalid_argument("ForceSpec: direction must be +1 or -1");
    }

    /// Signed quasimomentum sweep rate dk/dt in k_r per time unit.
    double sweep_rate() const { return direction * f / 3.141592653589793238462643383279502884; }
};

/// Fourier table of the potential over harmonics of G. Only n = +-4
/// (first lattice) and n = +-5 (second lattice) are nonzero; the constant
/// offset -(a1+a2)/2 is kept so absolute energies match plotted bands.
struct PotentialFourier {
    double offset = 0.0;
    std::map<int, std::complex<double>> components;
};

PotentialFourier fourier_components(const LatticeParams& params);

/// V(x) in E_R with x in units of d.
double potential_value(const LatticeParams& params, double x);

/// tau_B = 2 pi / f in time units hbar/E_R. Rejects f <= 0.
double bloch_period(const ForceSpec& force);

/// Folds phi into the canonical range [0, pi/8] using the spectrum
/// symmetries phi -> phi + pi/4 (lattice translation by d) and
/// phi -> -phi (spatial reflection). Never applied implicitly.
double canonical_phi(double phi);

/// Conversion between the dimensionless system and SI for a concrete
/// experiment: lattice laser wavelength lambda (d = lambda/2) and atomic
/// mass. Reporting convenience only; the core never uses SI values.
class SiContext {
  public:
    SiContext(double wavelength_m, double mass_kg);

    double lattice_spacing_m() const { return d_; }     // d
    double recoil_energy_J() const { return recoil_J_; } // E_R

    double energy_J(double e_recoil) const { return e_recoil * recoil_J_; }
    double energy_from_J(double joules) const { return joules / recoil_J_; }
    double time_s(double t_dimensionless) const;
    double time_from_s(double seconds) const;
    double force_N(double f_dimensionless) const;
    double force_from_N(double newtons) const;
    double length_m(double x_in_d) const { return x_in_d * d_; }
    double length_from_m(double meters) const { return meters / d_; }

  private:
    double d_;
    double recoil_J_;
};

} // namespace sbl
