#pragma once

#include <functional>

#include "planeflow/chart.hpp"

namespace pflow {

/// One adaptive step of the Dormand-Prince RK4(5) pair with PI step
/// control. The controller state (previous error) lives in the struct so
/// a caller drives the loop and owns all termination logic.
class RK45Stepper {
public:
    using Rhs = std::function<Vec(const Vec&)>;

    RK45Stepper(Rhs rhs, double tol) : rhs_(std::move(rhs)), tol_(tol) {}

    /// Advance (t, y) by at most h_suggest (clipped to h_max when > 0).
    /// Returns the accepted step size and updates the suggestion for the
    /// next call. Throws StepFailure when h underflows 1e-14.
    double step(double& t, Vec& y, double& h_suggest, double h_max = 0.0);

private:
    Rhs rhs_;
    double tol_;
    double err_prev_ = 1.0;
};

} // namespace pflow
