#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

/// The two ambient charts everything lives on: an open Euclidean box with
/// coordinates (x,y,z), or the unit 3-sphere in R^4 with ambient
/// coordinates (x1..x4) and the round metric.
class Chart {
public:
    enum class Kind { EuclideanBox, UnitSphere3 };

    static Chart box(const std::array<Interval, 3>& bounds);
    static Chart sphere();

    Kind kind() const { return kind_; }
    int dim() const { return kind_ == Kind::EuclideanBox ? 3 : 4; }
    bool is_sphere() const { return kind_ == Kind::UnitSphere3; }
    const std::array<Interval, 3>& bounds() const { return bounds_; }

    const std::vector<std::string>& coord_names() const;

    /// Box: p strictly inside the (open) bounds, with `slack` grace in
    /// chart units. Sphere: | |p|^2 - 1 | <= 1e-12 unless slack overrides.
    bool contains(const Vec& p, double slack = 0.0) const;

    /// Throws DomainError when a point fails chart membership.
    void validate_point(const Vec& p) const;

    /// Tangent-space projection: identity on the box, v - <v,p>p on S^3.
    Vec project_tangent(const Vec& p, const Vec& v) const;

    /// Pull a near-sphere point back to |p| = 1; identity on the box.
    Vec renormalize(const Vec& p) const;

    /// Deterministic orthonormal basis of the tangent space at p
    /// (columns), built by Gram-Schmidt over the coordinate axes.
    Mat tangent_basis(const Vec& p) const;

private:
    Kind kind_ = Kind::EuclideanBox;
    std::array<Interval, 3> bounds_{};
};

} // namespace pflow
