#include "planeflow/geometry.hpp"

#include <cmath>

#include "planeflow/errors.hpp"

namespace pflow {

OneForm::OneForm(Chart chart, std::vector<ExprPtr> coeffs)
    : chart_(std::move(chart)), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != chart_.dim())
        throw BadParams("one-form needs one coefficient per ambient coordinate");
}

OneForm OneForm::parse_on(const Chart& chart, const std::vector<std::string>& texts,
                          const ParamMap& params) {
    std::vector<ExprPtr> coeffs;
    coeffs.reserve(texts.size());
    for (const auto& t : texts) coeffs.push_back(bind_params(parse(t, chart.coord_names()), params));
    return OneForm(chart, std::move(coeffs));
}

Vec OneForm::covector(const Vec& p) const {
    Vec a(chart_.dim());
    std::span<const double> coords(p.data(), static_cast<size_t>(p.size()));
    for (int i = 0; i < chart_.dim(); ++i) a[i] = coeffs_[static_cast<size_t>(i)]->eval(coords);
    return a;
}

Vec OneForm::covector_tangent(const Vec& p) const {
    return chart_.project_tangent(p, covector(p));
}

double OneForm::apply(const Vec& p, const Vec& v) const { return covector(p).dot(v); }

void OneForm::validate_nondegenerate(const std::vector<Vec>& samples, double tol) const {
    for (const auto& p : samples) {
        if (covector_tangent(p).norm() < tol)
            throw DegenerateForm("one-form degenerate on tangent space at a sample point");
    }
}

std::pair<Vec, Vec> plane_basis(const PlaneField& pf, const Vec& p) {
    const Chart& chart = pf.chart();
    chart.validate_point(p);
    int n = chart.dim();
    Vec a = pf.form.covector_tangent(p);
    double an = a.norm();
    if (an < 1e-12) throw DegenerateForm("plane_basis: form degenerate at point");
    Vec ahat = a / an;

    // Gram-Schmidt the coordinate axes against {p (sphere only), ahat};
    // the first two surviving directions span the kernel.
    std::vector<Vec> held;
    if (chart.is_sphere()) held.push_back(p);
    held.push_back(ahat);

    std::vector<Vec> basis;
    for (int axis = 0; axis < n && basis.size() < 2; ++axis) {
        Vec v = Vec::Zero(n);
        v[axis] = 1.0;
        for (const auto& h : held) v -= v.dot(h) * h;
        for (const auto& e : basis) v -= v.dot(e) * e;
        double norm = v.norm();
        if (norm < 1e-8) continue;
        basis.push_back(v / norm);
    }
    if (basis.size() != 2)
        throw DegenerateForm("plane_basis: could not extract a 2-dimensional kernel");

    // Orientation convention: (e1, e2, ahat) positive on the box,
    // (p, e1, e2, ahat) positive on the sphere.
    double det;
    if (chart.is_sphere()) {
        Mat m(4, 4);
        m.col(0) = p;
        m.col(1) = basis[0];
        m.col(2) = basis[1];
        m.col(3) = ahat;
        det = m.determinant();
    } else {
        Mat m(3, 3);
        m.col(0) = basis[0];
        m.col(1) = basis[1];
        m.col(2) = ahat;
        det = m.determinant();
    }
    if (det < 0) basis[1] = -basis[1];
    return {basis[0], basis[1]};
}

double frobenius_density(const OneForm& alpha, const Vec& p) {
    const Chart& chart = alpha.chart();
    chart.validate_point(p);
    int n = chart.dim();
    std::span<const double> coords(p.data(), static_cast<size_t>(p.size()));

    // d(alpha)_ij = d(a_j)/dx_i - d(a_i)/dx_j
    Mat da(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            da(i, j) = diff(alpha.coeffs()[static_cast<size_t>(j)], i)->eval(coords);
    Mat omega = da - da.transpose();

    Vec a = alpha.covector(p);

    if (!chart.is_sphere()) {
        // coefficient of dx^dy^dz = <a, curl a>
        return a[0] * omega(1, 2) + a[1] * omega(2, 0) + a[2] * omega(0, 1);
    }

    Mat frame = chart.tangent_basis(p);
    // orientation: det [p, t1, t2, t3] = +1
    Mat m(4, 4);
    m.col(0) = p;
    for (int j = 0; j < 3; ++j) m.col(j + 1) = frame.col(j);
    if (m.determinant() < 0) frame.col(2) = -frame.col(2);

    auto two_form = [&](const Vec& u, const Vec& v) { return u.dot(omega * v); };
    Vec t1 = frame.col(0), t2 = frame.col(1), t3 = frame.col(2);
    return a.dot(t1) * two_form(t2, t3) - a.dot(t2) * two_form(t1, t3) +
           a.dot(t3) * two_form(t1, t2);
}

Vec project_vector(const PlaneField& pf, const Vec& v, const Vec& p) {
    const Chart& chart = pf.chart();
    chart.validate_point(p);
    Vec vt = chart.project_tangent(p, v);
    Vec a = pf.form.covector_tangent(p);
    double a2 = a.squaredNorm();
    if (std::sqrt(a2) < 1e-12) throw DegenerateForm("project_vector: form degenerate at point");
    return vt - (vt.dot(a) / a2) * a;
}

VectorField lift_family(const PlanarFamily& family, const ExprPtr& g, const Chart& chart,
                        std::string* warning) {
    if (chart.is_sphere())
        throw BadParams("lift_family requires a Euclidean box chart");
    double origin[3] = {0.0, 0.0, 0.0};
    double g0 = g->eval(std::span<const double>(origin, 3));
    if (std::abs(g0) > 1e-12 && warning)
        *warning = "lift_family: g(0,0,0) != 0; the normal form dz + g dy expects it to vanish";
    std::vector<ExprPtr> comps = {family.f1, family.f2, neg(mul(g, family.f2))};
    return VectorField(chart, std::move(comps));
}

PlanarFamily reduce_to_family(const VectorField& X, const ExprPtr& g) {
    const Chart& chart = X.chart();
    if (chart.is_sphere())
        throw BadParams("reduce_to_family requires a Euclidean box chart");

    // alpha(X) = X_z + g * X_y must vanish: symbolically, or to 1e-10 on a
    // 5x5x5 sample grid.
    ExprPtr residual = add(X.components()[2], mul(g, X.components()[1]));
    if (!is_zero(residual)) {
        const auto& b = chart.bounds();
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                for (int k = 0; k < 5; ++k) {
                    double c[3] = {b[0].lo + (i + 0.5) / 5.0 * b[0].length(),
                                   b[1].lo + (j + 0.5) / 5.0 * b[1].length(),
                                   b[2].lo + (k + 0.5) / 5.0 * b[2].length()};
                    if (std::abs(residual->eval(std::span<const double>(c, 3))) > 1e-10)
                        throw NotTangent(
                            "reduce_to_family: alpha(X) exceeds 1e-10 on the sample grid");
                }
    }
    return PlanarFamily{X.components()[0], X.components()[1]};
}

OneForm rescale_to_unit_dz(const OneForm& alpha) {
    const Chart& chart = alpha.chart();
    if (chart.is_sphere())
        throw BadParams("rescale_to_unit_dz requires a Euclidean box chart");
    const ExprPtr& cz = alpha.coeffs()[2];
    const auto& b = chart.bounds();
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j)
            for (int k = 0; k < 7; ++k) {
                double c[3] = {b[0].lo + (i + 0.5) / 7.0 * b[0].length(),
                               b[1].lo + (j + 0.5) / 7.0 * b[1].length(),
                               b[2].lo + (k + 0.5) / 7.0 * b[2].length()};
                if (std::abs(cz->eval(std::span<const double>(c, 3))) < 1e-12)
                    throw DegenerateForm("rescale_to_unit_dz: dz coefficient vanishes on grid");
            }
    return OneForm(chart, {div(alpha.coeffs()[0], cz), div(alpha.coeffs()[1], cz),
                           constant(1.0)});
}

ExprPtr pairing_expr(const OneForm& alpha, const VectorField& X) {
    ExprPtr sum = constant(0.0);
    for (int i = 0; i < alpha.chart().dim(); ++i)
        sum = add(sum, mul(alpha.coeffs()[static_cast<size_t>(i)],
                           X.components()[static_cast<size_t>(i)]));
    return sum;
}

} // namespace pflow
