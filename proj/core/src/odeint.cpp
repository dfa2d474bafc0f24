#include "planeflow/odeint.hpp"

#include <algorithm>
#include <cmath>

#include "planeflow/errors.hpp"

namespace pflow {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// embedded 4th-order weights
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

} // namespace

double RK45Stepper::step(double& t, Vec& y, double& h_suggest, double h_max) {
    constexpr double kMinStep = 1e-14;
    constexpr double kSafety = 0.9;
    constexpr double kAlpha = 0.7 / 5.0; // PI controller exponents
    constexpr double kBeta = 0.4 / 5.0;

    double h = h_suggest;
    if (h_max > 0.0) h = std::min(h, h_max);

    Vec k1 = rhs_(y);
    for (;;) {
        if (std::abs(h) < kMinStep)
            throw StepFailure("RK45 step size underflow below 1e-14");

        Vec k2 = rhs_(y + h * (a21 * k1));
        Vec k3 = rhs_(y + h * (a31 * k1 + a32 * k2));
        Vec k4 = rhs_(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        Vec k5 = rhs_(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Vec k6 = rhs_(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Vec y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vec k7 = rhs_(y5);
        Vec y4 = y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            double scale = tol_ + tol_ * std::max(std::abs(y[i]), std::abs(y5[i]));
            double e = (y5[i] - y4[i]) / scale;
            err += e * e;
        }
        err = std::sqrt(err / static_cast<double>(y.size()));

        if (err <= 1.0) {
            double grow = kSafety * std::pow(std::max(err, 1e-10), -kAlpha) *
                          std::pow(err_prev_, kBeta);
            grow = std::clamp(grow, 0.2, 5.0);
            err_prev_ = std::max(err, 1e-10);
            t += h;
            y = y5;
            double accepted = h;
            h_suggest = h * grow;
            return accepted;
        }
        double shrink = std::clamp(kSafety * std::pow(err, -kAlpha), 0.1, 0.9);
        h *= shrink;
    }
}

} // namespace pflow
