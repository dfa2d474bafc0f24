#include "planeflow/chart.hpp"

#include <cmath>

#include "planeflow/errors.hpp"

namespace pflow {

Chart Chart::box(const std::array<Interval, 3>& bounds) {
    for (const auto& iv : bounds)
        if (!(iv.lo < iv.hi))
            throw BadParams("box bounds must be nonempty open intervals");
    Chart c;
    c.kind_ = Kind::EuclideanBox;
    c.bounds_ = bounds;
    return c;
}

Chart Chart::sphere() {
    Chart c;
    c.kind_ = Kind::UnitSphere3;
    return c;
}

const std::vector<std::string>& Chart::coord_names() const {
    static const std::vector<std::string> box_names = {"x", "y", "z"};
    static const std::vector<std::string> sphere_names = {"x1", "x2", "x3", "x4"};
    return kind_ == Kind::EuclideanBox ? box_names : sphere_names;
}

bool Chart::contains(const Vec& p, double slack) const {
    if (p.size() != dim()) return false;
    if (kind_ == Kind::EuclideanBox) {
        for (int i = 0; i < 3; ++i)
            if (p[i] <= bounds_[i].lo - slack || p[i] >= bounds_[i].hi + slack)
                return false;
        return true;
    }
    double tol = slack > 0.0 ? slack : 1e-12;
    return std::abs(p.squaredNorm() - 1.0) <= tol;
}

void Chart::validate_point(const Vec& p) const {
    if (p.size() != dim())
        throw DomainError("point dimension does not match chart");
    if (!contains(p))
        throw DomainError(kind_ == Kind::EuclideanBox
                              ? "point outside box chart"
                              : "point not on the unit sphere to 1e-12");
}

Vec Chart::project_tangent(const Vec& p, const Vec& v) const {
    if (kind_ == Kind::EuclideanBox) return v;
    return v - v.dot(p) * p;
}

Vec Chart::renormalize(const Vec& p) const {
    if (kind_ == Kind::EuclideanBox) return p;
    double n = p.norm();
    if (n < 1e-100) throw DomainError("cannot renormalize near-zero point to sphere");
    return p / n;
}

Mat Chart::tangent_basis(const Vec& p) const {
    int n = dim();
    if (kind_ == Kind::EuclideanBox) return Mat::Identity(n, n);

    Mat basis(n, 3);
    int col = 0;
    for (int axis = 0; axis < n && col < 3; ++axis) {
        Vec v = Vec::Zero(n);
        v[axis] = 1.0;
        v -= v.dot(p) * p;
        for (int j = 0; j < col; ++j) v -= v.dot(basis.col(j)) * basis.col(j);
        double norm = v.norm();
        if (norm < 1e-8) continue;
        basis.col(col++) = v / norm;
    }
    if (col != 3) throw DomainError("failed to build tangent basis (degenerate point)");
    return basis;
}

} // namespace pflow
