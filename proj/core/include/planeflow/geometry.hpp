#pragma once

#include <utility>
#include <vector>

#include "planeflow/chart.hpp"
#include "planeflow/expr.hpp"
#include "planeflow/fields.hpp"

namespace pflow {

/// One-form alpha = sum_i coeff_i dx_i; the plane field of interest is its
/// kernel. Coefficients are expressions over the chart coordinates.
class OneForm {
public:
    OneForm() = default;
    OneForm(Chart chart, std::vector<ExprPtr> coeffs);
    static OneForm parse_on(const Chart& chart, const std::vector<std::string>& texts,
                            const ParamMap& params = {});

    const Chart& chart() const { return chart_; }
    const std::vector<ExprPtr>& coeffs() const { return coeffs_; }

    /// Coefficient covector at p (ambient components).
    Vec covector(const Vec& p) const;
    /// Covector restricted to the tangent space (projected on the sphere).
    Vec covector_tangent(const Vec& p) const;
    /// alpha(v) at p.
    double apply(const Vec& p, const Vec& v) const;

    /// Sampled nondegeneracy check: |alpha restricted to the tangent
    /// space| >= tol at every sample point. Throws DegenerateForm.
    void validate_nondegenerate(const std::vector<Vec>& samples, double tol = 1e-12) const;

private:
    Chart chart_;
    std::vector<ExprPtr> coeffs_;
};

/// Plane field = kernel of a nondegenerate one-form, with a fixed
/// orientation convention for ordered bases: (e1, e2, alpha-sharp) is
/// positively oriented on the box, (p, e1, e2, alpha-sharp) on the sphere.
struct PlaneField {
    OneForm form;

    const Chart& chart() const { return form.chart(); }
};

/// A 1-parameter family of planar vector fields F_z(x,y) = (f1, f2),
/// the planar side of the lift/reduce correspondence.
struct PlanarFamily {
    ExprPtr f1, f2;
};

/// Orthonormal basis (e1, e2) of ker(alpha(p)) inside the tangent space.
/// Deterministic axis seeding; throws DegenerateForm when the restricted
/// covector is shorter than 1e-12.
std::pair<Vec, Vec> plane_basis(const PlaneField& pf, const Vec& p);

/// Value of alpha ^ d(alpha) at p contracted against the positively
/// oriented orthonormal tangent 3-frame. Zero iff integrable at p;
/// positive everywhere for a (positively oriented) contact form.
double frobenius_density(const OneForm& alpha, const Vec& p);

/// Orthogonal projection of v onto ker(alpha(p)) within the tangent
/// space. Idempotent and self-adjoint.
Vec project_vector(const PlaneField& pf, const Vec& v, const Vec& p);

/// Lift of a planar family into ker(dz + g dy) on a box chart:
/// (xdot, ydot, zdot) = (f1, f2, -g*f2). Warns (returns via report
/// pointer) when g(0,0,0) != 0.
VectorField lift_family(const PlanarFamily& family, const ExprPtr& g, const Chart& chart,
                        std::string* warning = nullptr);

/// Inverse of lift_family. Requires alpha(X) = 0 symbolically or to
/// 1e-10 on a sample grid; throws NotTangent otherwise.
PlanarFamily reduce_to_family(const VectorField& X, const ExprPtr& g);

/// Divide a box one-form by its dz coefficient, giving dz + f dx + g dy.
/// Throws DegenerateForm if the dz coefficient vanishes somewhere on a
/// validation grid.
OneForm rescale_to_unit_dz(const OneForm& alpha);

/// alpha(X) as a symbolic expression (used by tangency checks).
ExprPtr pairing_expr(const OneForm& alpha, const VectorField& X);

} // namespace pflow
