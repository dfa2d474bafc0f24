#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "planeflow/chart.hpp"
#include "planeflow/expr.hpp"

namespace pflow {

class OneForm; // geometry.hpp

/// Scalar function of the chart coordinates with cached exact partials.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(Chart chart, ExprPtr expr);
    static ScalarField parse_on(const Chart& chart, const std::string& text,
                                const ParamMap& params = {});

    const Chart& chart() const { return chart_; }
    const ExprPtr& expr() const { return expr_; }

    double operator()(const Vec& p) const;
    /// Ambient coordinate gradient (not projected to the sphere).
    Vec ambient_gradient(const Vec& p) const;
    const std::vector<ExprPtr>& partials() const { return partials_; }

private:
    Chart chart_;
    ExprPtr expr_;
    std::vector<ExprPtr> partials_;
};

/// Vector field with one expression per ambient coordinate and cached
/// symbolic Jacobian entries.
class VectorField {
public:
    VectorField() = default;
    VectorField(Chart chart, std::vector<ExprPtr> components);
    static VectorField parse_on(const Chart& chart, const std::vector<std::string>& texts,
                                const ParamMap& params = {});

    const Chart& chart() const { return chart_; }
    const std::vector<ExprPtr>& components() const { return components_; }

    Vec operator()(const Vec& p) const;
    /// Exact Jacobian d(component i)/d(coordinate j).
    Mat jacobian(const Vec& p) const;
    /// Central finite-difference Jacobian, used only for cross-validation.
    Mat jacobian_fd(const Vec& p, double step = 1e-5) const;

private:
    Chart chart_;
    std::vector<ExprPtr> components_;
    std::vector<std::vector<ExprPtr>> jac_;
};

/// -grad(psi): the descent field. On the sphere this is the ambient
/// gradient with its radial component removed.
VectorField gradient(const ScalarField& psi, const Chart& chart);

enum class StopReason { TimeHorizon, DomainExit, Equilibrium };

std::string to_string(StopReason r);

struct TrajectorySample {
    double t;
    Vec p;
};

struct TrajectoryStats {
    StopReason reason = StopReason::TimeHorizon;
    double max_tangency_residual = 0.0;  //  max |alpha(xdot)| / (|alpha||xdot|)
    double max_sphere_drift = 0.0;       //  max | |p| - 1 | before renormalization
    int monotonicity_violations = 0;     //  psi increases beyond float slack
    int strict_decrease_violations = 0;  //  psi fails to drop while |X| > 1e-8
    double psi_initial = 0.0;
    double psi_final = 0.0;
    bool has_psi = false;
    bool has_alpha = false;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<double> psi_values;  // parallel to samples when monitored
    TrajectoryStats stats;

    const Vec& endpoint() const { return samples.back().p; }
};

/// Optional per-step monitors for integrate().
struct FlowMonitor {
    const OneForm* alpha = nullptr;
    const ScalarField* psi = nullptr;
};

struct IntegrateOptions {
    double tol = 1e-10;            // mixed absolute/relative local error target
    double min_speed = 1e-10;      // stop when |X| drops below this
    double initial_step = 1e-3;
    double max_step = 0.0;         // 0 = no cap
};

/// Right-hand side wrapper so perturbed (non-symbolic) fields integrate
/// through the same code path.
struct FlowField {
    Chart chart;
    std::function<Vec(const Vec&)> value;
    std::function<Mat(const Vec&)> jacobian; // may be empty

    static FlowField of(const VectorField& X);
};

/// Adaptive embedded RK4(5) trajectory of X from p0 over [0, T].
/// Sphere points are renormalized every accepted step. Stops early at
/// domain exit or at an equilibrium (|X| < min_speed); the reason is
/// recorded in stats. Throws StepFailure if the step size underflows 1e-14.
Trajectory integrate(const VectorField& X, const Vec& p0, double T,
                     const IntegrateOptions& opts = {}, FlowMonitor monitor = {});
Trajectory integrate(const FlowField& X, const Vec& p0, double T,
                     const IntegrateOptions& opts = {}, FlowMonitor monitor = {});

/// Closed (or open) polyline of chart points; shared curve geometry
/// between the link tracer and the perturbation machinery.
struct Polyline {
    std::vector<Vec> pts;
    bool closed = false;

    double length() const;
    /// Distance from q to the polyline together with the unit tangent of
    /// the nearest segment.
    void closest(const Vec& q, double& dist, Vec& tangent) const;
};

/// X + eps * f * t_hat: f a C^2 quintic bump (1 on the curves, 0 outside
/// tube radius), t_hat the interpolated unit tangent along the nearest
/// curve. The curves become invariant closed orbits of the result.
/// Throws InvalidLink unless every curve is closed.
FlowField rh_perturbation(const VectorField& X, const std::vector<Polyline>& curves,
                          double eps, double tube_radius);

/// Quintic cutoff: 1 at s=0, 0 at s>=1, C^2 at both ends.
double bump_quintic(double s);

} // namespace pflow
