#pragma once

// Embedded Dormand-Prince 5(4) stepper on complex state vectors with a
// caller-supplied error weighting. Written in-house rather than pulled from a
// library because the weighting mixes component classes (relative on band
// amplitudes, absolute-modulo-2pi on phase integrals) and the right-hand side
// carries gauge state that must see accepted/rejected step boundaries.

#include <complex>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace sbl {

struct OdeStep {
    double x0 = 0.0, x1 = 0.0;
    Eigen::VectorXcd y0, y1;
    Eigen::VectorXcd f0, f1; // derivatives at the ends, for dense output
};

/// Cubic Hermite evaluation inside one accepted step.
inline Eigen::VectorXcd dense_eval(const OdeStep& s, double x) {
    const double h = s.x1 - s.x0;
    const double u = (x - s.x0) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    return h00 * s.y0 + (h10 * h) * s.f0 + h01 * s.y1 + (h11 * h) * s.f1;
}

class DormandPrince54 {
  public:
    using Rhs = std::function<void(double x, const Eigen::VectorXcd& y,
                                   Eigen::VectorXcd& dydx)>;
    // Scaled error norm; returns <= 1 to accept.
    using ErrorNorm = std::function<double(const Eigen::VectorXcd& err,
                                           const Eigen::VectorXcd& y_old,
                                           const Eigen::VectorXcd& y_new)>;
    // Called after every accepted step (gauge bookkeeping, sampling).
    using StepCallback = std::function<void(const OdeStep&)>;

    DormandPrince54(Rhs rhs, ErrorNorm norm) : rhs_(std::move(rhs)), norm_(std::move(norm)) {}

    double initial_step = 1e-4;
    double max_step = 1e-2;
    double min_step = 1e-14;

    /// Integrates y from x0 to x1 (either direction). The callback sees each
    /// accepted step; samples are interpolated by the caller.
    void integrate(double x0, double x1, Eigen::VectorXcd& y, const StepCallback& cb) {
        if (x0 == x1) return;
        const double dir = (x1 > x0) ? 1.0 : -1.0;
        double x = x0;
        double h = dir * std::min(initial_step, std::abs(x1 - x0));
        const int n = static_cast<int>(y.size());
        Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
        Eigen::VectorXcd ytmp(n), y5(n), err(n);

        while (dir * (x1 - x) > 1e-15 * std::max(1.0, std::abs(x1))) {
            if (dir * (x + h - x1) > 0.0) h = x1 - x; // clamp to the endpoint
            rhs_(x, y, k1);

            ytmp = y + h * (a21 * k1);
            rhs_(x + c2 * h, ytmp, k2);
            ytmp = y + h * (a31 * k1 + a32 * k2);
            rhs_(x + c3 * h, ytmp, k3);
            ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs_(x + c4 * h, ytmp, k4);
            ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs_(x + c5 * h, ytmp, k5);
            ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs_(x + h, ytmp, k6);
            y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs_(x + h, y5, k7);

            err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double e = norm_(err, y, y5);

            if (e <= 1.0) {
                OdeStep step;
                step.x0 = x;
                step.x1 = x + h;
                step.y0.swap(y);
                step.y1 = y5;
                step.f0.swap(k1);
                step.f1.swap(k7);
                x += h;
                y = step.y1;
                cb(step);
                const double fac = std::clamp(0.9 * std::pow(std::max(e, 1e-10), -0.2),
                                              0.2, 5.0);
                h *= fac;
            } else {
                h *= std::clamp(0.9 * std::pow(e, -0.2), 0.1, 0.9);
            }
            if (std::abs(h) > max_step) h = dir * max_step;
            if (std::abs(h) < min_step)
                throw std::runtime_error("ODE step size underflow at x = " +
                                         std::to_string(x));
        }
    }

  private:
    Rhs rhs_;
    ErrorNorm norm_;

    // Dormand-Prince 5(4) tableau.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // y5 - y4 coefficients.
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600;
    static constexpr double e3 = 500.0 / 1113 - 7571.0 / 16695;
    static constexpr double e4 = 125.0 / 192 - 393.0 / 640;
    static constexpr double e5 = -2187.0 / 6784 + 92097.0 / 339200;
    static constexpr double e6 = 11.0 / 84 - 187.0 / 2100;
    static constexpr double e7 = -1.0 / 40;
};

} // namespace sbl
