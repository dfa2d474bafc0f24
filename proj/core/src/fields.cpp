#include "planeflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "planeflow/errors.hpp"
#include "planeflow/geometry.hpp"
#include "planeflow/odeint.hpp"

namespace pflow {

ScalarField::ScalarField(Chart chart, ExprPtr expr)
    : chart_(std::move(chart)), expr_(std::move(expr)) {
    partials_.reserve(static_cast<size_t>(chart_.dim()));
    for (int i = 0; i < chart_.dim(); ++i) partials_.push_back(diff(expr_, i));
}

ScalarField ScalarField::parse_on(const Chart& chart, const std::string& text,
                                  const ParamMap& params) {
    return ScalarField(chart, bind_params(parse(text, chart.coord_names()), params));
}

double ScalarField::operator()(const Vec& p) const {
    return expr_->eval(std::span<const double>(p.data(), static_cast<size_t>(p.size())));
}

Vec ScalarField::ambient_gradient(const Vec& p) const {
    Vec g(chart_.dim());
    std::span<const double> coords(p.data(), static_cast<size_t>(p.size()));
    for (int i = 0; i < chart_.dim(); ++i) g[i] = partials_[static_cast<size_t>(i)]->eval(coords);
    return g;
}

VectorField::VectorField(Chart chart, std::vector<ExprPtr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
    if (static_cast<int>(components_.size()) != chart_.dim())
        throw BadParams("vector field needs one component per ambient coordinate");
    jac_.resize(components_.size());
    for (size_t i = 0; i < components_.size(); ++i) {
        jac_[i].reserve(static_cast<size_t>(chart_.dim()));
        for (int j = 0; j < chart_.dim(); ++j) jac_[i].push_back(diff(components_[i], j));
    }
}

VectorField VectorField::parse_on(const Chart& chart, const std::vector<std::string>& texts,
                                  const ParamMap& params) {
    std::vector<ExprPtr> comps;
    comps.reserve(texts.size());
    for (const auto& t : texts) comps.push_back(bind_params(parse(t, chart.coord_names()), params));
    return VectorField(chart, std::move(comps));
}

Vec VectorField::operator()(const Vec& p) const {
    Vec v(chart_.dim());
    std::span<const double> coords(p.data(), static_cast<size_t>(p.size()));
    for (int i = 0; i < chart_.dim(); ++i) v[i] = components_[static_cast<size_t>(i)]->eval(coords);
    return v;
}

Mat VectorField::jacobian(const Vec& p) const {
    int n = chart_.dim();
    Mat J(n, n);
    std::span<const double> coords(p.data(), static_cast<size_t>(p.size()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            J(i, j) = jac_[static_cast<size_t>(i)][static_cast<size_t>(j)]->eval(coords);
    return J;
}

Mat VectorField::jacobian_fd(const Vec& p, double step) const {
    int n = chart_.dim();
    Mat J(n, n);
    for (int j = 0; j < n; ++j) {
        double h = step * std::max(1.0, std::abs(p[j]));
        Vec pp = p, pm = p;
        pp[j] += h;
        pm[j] -= h;
        J.col(j) = ((*this)(pp) - (*this)(pm)) / (2.0 * h);
    }
    return J;
}

VectorField gradient(const ScalarField& psi, const Chart& chart) {
    std::vector<ExprPtr> comps;
    int n = chart.dim();
    if (!chart.is_sphere()) {
        for (int i = 0; i < n; ++i) comps.push_back(neg(psi.partials()[static_cast<size_t>(i)]));
        return VectorField(chart, std::move(comps));
    }
    // -(grad - <grad, x> x): remove the radial component symbolically.
    ExprPtr radial = constant(0.0);
    for (int j = 0; j < n; ++j)
        radial = add(radial, mul(coord(j), psi.partials()[static_cast<size_t>(j)]));
    for (int i = 0; i < n; ++i)
        comps.push_back(neg(sub(psi.partials()[static_cast<size_t>(i)], mul(radial, coord(i)))));
    return VectorField(chart, std::move(comps));
}

std::string to_string(StopReason r) {
    switch (r) {
    case StopReason::TimeHorizon: return "time_horizon";
    case StopReason::DomainExit: return "domain_exit";
    case StopReason::Equilibrium: return "equilibrium";
    }
    return "unknown";
}

FlowField FlowField::of(const VectorField& X) {
    FlowField f;
    f.chart = X.chart();
    f.value = [&X](const Vec& p) { return X(p); };
    f.jacobian = [&X](const Vec& p) { return X.jacobian(p); };
    return f;
}

namespace {

// One monitored sample: tangency residual, sphere drift, psi bookkeeping.
void record_sample(Trajectory& traj, double t, const Vec& p, const Vec& xdot,
                   const FlowMonitor& monitor, const Chart& chart) {
    TrajectoryStats& st = traj.stats;
    if (chart.is_sphere())
        st.max_sphere_drift = std::max(st.max_sphere_drift, std::abs(p.norm() - 1.0));
    if (monitor.alpha) {
        st.has_alpha = true;
        Vec a = monitor.alpha->covector(p);
        double denom = a.norm() * xdot.norm();
        if (denom > 1e-300) {
            double res = std::abs(a.dot(xdot)) / denom;
            st.max_tangency_residual = std::max(st.max_tangency_residual, res);
        }
    }
    if (monitor.psi) {
        st.has_psi = true;
        double value = (*monitor.psi)(p);
        if (!traj.psi_values.empty()) {
            double prev = traj.psi_values.back();
            double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, std::abs(prev));
            if (value > prev + slack) st.monotonicity_violations++;
            if (xdot.norm() > 1e-8 && !(value < prev)) st.strict_decrease_violations++;
        }
        traj.psi_values.push_back(value);
    }
    traj.samples.push_back({t, p});
}

Trajectory integrate_impl(const FlowField& X, const Vec& p0, double T,
                          const IntegrateOptions& opts, FlowMonitor monitor) {
    const Chart& chart = X.chart;
    chart.validate_point(p0);

    Trajectory traj;
    RK45Stepper stepper(X.value, opts.tol);

    double t = 0.0;
    Vec p = p0;
    record_sample(traj, t, p, X.value(p), monitor, chart);

    if (X.value(p).norm() < opts.min_speed) {
        traj.stats.reason = StopReason::Equilibrium;
    } else {
        double h = opts.initial_step;
        while (t < T) {
            if (T - t < 1e-13) {
                traj.stats.reason = StopReason::TimeHorizon;
                break;
            }
            double h_cap = std::min(T - t, opts.max_step > 0 ? opts.max_step : T - t);
            Vec p_prev = p;
            double t_prev = t;
            stepper.step(t, p, h, h_cap);

            if (!chart.is_sphere() && !chart.contains(p)) {
                // bisect the exit step so the trajectory ends near the wall
                Vec lo = p_prev, hi = p;
                double tlo = t_prev, thi = t;
                for (int it = 0; it < 60 && (hi - lo).norm() > 1e-12; ++it) {
                    Vec mid = 0.5 * (lo + hi);
                    double tm = 0.5 * (tlo + thi);
                    if (chart.contains(mid)) {
                        lo = mid;
                        tlo = tm;
                    } else {
                        hi = mid;
                        thi = tm;
                    }
                }
                record_sample(traj, tlo, lo, X.value(lo), monitor, chart);
                traj.stats.reason = StopReason::DomainExit;
                break;
            }

            if (chart.is_sphere()) {
                traj.stats.max_sphere_drift =
                    std::max(traj.stats.max_sphere_drift, std::abs(p.norm() - 1.0));
                p = chart.renormalize(p);
            }

            Vec xdot = X.value(p);
            record_sample(traj, t, p, xdot, monitor, chart);

            if (xdot.norm() < opts.min_speed) {
                traj.stats.reason = StopReason::Equilibrium;
                break;
            }
            if (t >= T) {
                traj.stats.reason = StopReason::TimeHorizon;
                break;
            }
        }
    }

    if (monitor.psi && !traj.psi_values.empty()) {
        traj.stats.psi_initial = traj.psi_values.front();
        traj.stats.psi_final = traj.psi_values.back();
    }
    return traj;
}

} // namespace

Trajectory integrate(const VectorField& X, const Vec& p0, double T,
                     const IntegrateOptions& opts, FlowMonitor monitor) {
    return integrate_impl(FlowField::of(X), p0, T, opts, monitor);
}

Trajectory integrate(const FlowField& X, const Vec& p0, double T,
                     const IntegrateOptions& opts, FlowMonitor monitor) {
    return integrate_impl(X, p0, T, opts, monitor);
}

double Polyline::length() const {
    double len = 0.0;
    size_t n = pts.size();
    if (n < 2) return 0.0;
    size_t segs = closed ? n : n - 1;
    for (size_t i = 0; i < segs; ++i) len += (pts[(i + 1) % n] - pts[i]).norm();
    return len;
}

void Polyline::closest(const Vec& q, double& dist, Vec& tangent) const {
    size_t n = pts.size();
    dist = std::numeric_limits<double>::infinity();
    tangent = Vec::Zero(q.size());
    if (n == 0) return;
    if (n == 1) {
        dist = (q - pts[0]).norm();
        return;
    }
    size_t segs = closed ? n : n - 1;
    for (size_t i = 0; i < segs; ++i) {
        const Vec& a = pts[i];
        const Vec& b = pts[(i + 1) % n];
        Vec ab = b - a;
        double len2 = ab.squaredNorm();
        if (len2 < 1e-300) continue;
        double s = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
        Vec foot = a + s * ab;
        double d = (q - foot).norm();
        if (d < dist) {
            dist = d;
            tangent = ab / std::sqrt(len2);
        }
    }
}

double bump_quintic(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    // 1 - 10s^3 + 15s^4 - 6s^5: value/slope/curvature match at both ends
    double s3 = s * s * s;
    return 1.0 - 10.0 * s3 + 15.0 * s3 * s - 6.0 * s3 * s * s;
}

FlowField rh_perturbation(const VectorField& X, const std::vector<Polyline>& curves,
                          double eps, double tube_radius) {
    if (eps < 0.0 || tube_radius <= 0.0)
        throw BadParams("rh_perturbation: eps must be >= 0 and tube radius > 0");
    for (const auto& c : curves)
        if (!c.closed)
            throw InvalidLink("rh_perturbation: every curve of the link must be closed");

    // copies keep the flow field self-contained
    auto curves_copy = std::make_shared<std::vector<Polyline>>(curves);
    auto base = std::make_shared<VectorField>(X);
    const Chart chart = X.chart();

    auto tangential_term = [curves_copy, tube_radius, chart](const Vec& p) -> Vec {
        double best = std::numeric_limits<double>::infinity();
        Vec tangent = Vec::Zero(p.size());
        for (const auto& c : *curves_copy) {
            double d;
            Vec t;
            c.closest(p, d, t);
            if (d < best) {
                best = d;
                tangent = t;
            }
        }
        if (!std::isfinite(best) || best >= tube_radius) return Vec::Zero(p.size());
        Vec t_tan = chart.project_tangent(p, tangent);
        double tn = t_tan.norm();
        if (tn < 1e-12) return Vec::Zero(p.size());
        return bump_quintic(best / tube_radius) * (t_tan / tn);
    };

    FlowField f;
    f.chart = chart;
    f.value = [base, eps, tangential_term](const Vec& p) -> Vec {
        return (*base)(p) + eps * tangential_term(p);
    };
    f.jacobian = [base, eps, tangential_term](const Vec& p) -> Mat {
        // symbolic part exact; geometric bump term by central differences
        Mat J = base->jacobian(p);
        int n = static_cast<int>(p.size());
        for (int j = 0; j < n; ++j) {
            double h = 1e-6 * std::max(1.0, std::abs(p[j]));
            Vec pp = p, pm = p;
            pp[j] += h;
            pm[j] -= h;
            J.col(j) += eps * (tangential_term(pp) - tangential_term(pm)) / (2.0 * h);
        }
        return J;
    };
    return f;
}

} // namespace pflow
