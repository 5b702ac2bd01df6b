#include "superbloch/units.hpp"

#include <cmath>

namespace sbl {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kHbar = 1.054571817e-34; // J s
} // namespace

PotentialFourier fourier_components(const LatticeParams& params) {
    params.validate();
    PotentialFourier table;
    table.offset = -(params.a1 + params.a2) / 2.0;
    // cos^2 t = (1 + cos 2t)/2, so each lattice contributes one harmonic pair:
    // cos(2 pi x) sits at n = +-4 of G = pi/2, cos(5 pi x/2 + 2 phi) at n = +-5.
    if (params.a1 > 0.0) {
        table.components[+4] = {-params.a1 / 4.0, 0.0};
        table.components[-4] = {-params.a1 / 4.0, 0.0};
    }
    if (params.a2 > 0.0) {
        const std::complex<double> c5 =
            -(params.a2 / 4.0) * std::exp(std::complex<double>(0.0, 2.0 * params.phi));
        table.components[+5] = c5;
        table.components[-5] = std::conj(c5);
    }
    return table;
}

double potential_value(const LatticeParams& params, double x) {
    const double c1 = std::cos(kPi * x);
    const double c2 = std::cos(1.25 * kPi * x + params.phi);
    return -params.a1 * c1 * c1 - params.a2 * c2 * c2;
}

double bloch_period(const ForceSpec& force) {
    if (!(force.f > 0.0))
        throw std::invalid_argument("bloch_period: requires f > 0");
    return 2.0 * kPi / force.f;
}

double canonical_phi(double phi) {
    const double period = kPi / 4.0;
    double p = std::fmod(phi, period);
    if (p < 0.0) p += period;
    return std::min(p, period - p);
}

SiContext::SiContext(double wavelength_m, double mass_kg) {
    if (!(wavelength_m > 0.0) || !(mass_kg > 0.0))
        throw std::invalid_argument("SiContext: wavelength and mass must be > 0");
    d_ = wavelength_m / 2.0;
    recoil_J_ = kHbar * kHbar * kPi * kPi / (2.0 * mass_kg * d_ * d_);
}

double SiContext::time_s(double t_dimensionless) const {
    return t_dimensionless * kHbar / recoil_J_;
}

double SiContext::time_from_s(double seconds) const {
    return seconds * recoil_J_ / kHbar;
}

double SiContext::force_N(double f_dimensionless) const {
    return f_dimensionless * recoil_J_ / (4.0 * d_);
}

double SiContext::force_from_N(double newtons) const {
    return newtons * 4.0 * d_ / recoil_J_;
}

} // namespace sbl
