#include "splinemom/nurbs_patch.hpp"

#include <cmath>

#include "splinemom/errors.hpp"

namespace splinemom {

ParametricMesh build_parametric_mesh(const TensorSpace& space) {
    ParametricMesh mesh;
    mesh.breaks_s = space.s.unique_knots();
    mesh.breaks_t = space.t.unique_knots();
    return mesh;
}

NurbsPatch::NurbsPatch(TensorSpace space, ControlPoints control_points)
    : space_(std::move(space)), cps_(std::move(control_points)) {
    if (cps_.rows() != space_.dim())
        throw GeometryError("nurbs patch: control point count != space dimension");
    for (Eigen::Index a = 0; a < cps_.rows(); ++a)
        if (!(cps_(a, 3) > 0.0))
            throw GeometryError("nurbs patch: non-positive weight");
    mesh_ = build_parametric_mesh(space_);
    ext_s_ = bezier_extract(space_.s);
    ext_t_ = bezier_extract(space_.t);

    Eigen::AlignedBox3d box;
    for (Eigen::Index a = 0; a < cps_.rows(); ++a) box.extend(control_position(a));
    diameter_ = box.diagonal().norm();
}

Eigen::Vector3d NurbsPatch::control_position(int a) const {
    return cps_.row(a).head<3>().transpose() / cps_(a, 3);
}

void NurbsPatch::eval_homogeneous(double s, double t, Eigen::Vector4d& h, Eigen::Vector4d& hs,
                                  Eigen::Vector4d& ht) const {
    const KnotVector& ks = space_.s;
    const KnotVector& kt = space_.t;
    const int p = ks.degree(), q = kt.degree();
    const int es = ks.element_of(s), et = kt.element_of(t);
    const auto [sa, sb] = ks.element_bounds(es);
    const auto [ta, tb] = kt.element_bounds(et);
    const double inv_hs = 1.0 / (sb - sa), inv_ht = 1.0 / (tb - ta);

    // Bezier extraction + Bernstein evaluation on the element
    Eigen::MatrixXd bs = bernstein_ders(p, (s - sa) * inv_hs, 1);
    Eigen::MatrixXd bt = bernstein_ders(q, (t - ta) * inv_ht, 1);
    Eigen::VectorXd Ns = ext_s_.operators[es] * bs.row(0).transpose();
    Eigen::VectorXd dNs = ext_s_.operators[es] * bs.row(1).transpose() * inv_hs;
    Eigen::VectorXd Nt = ext_t_.operators[et] * bt.row(0).transpose();
    Eigen::VectorXd dNt = ext_t_.operators[et] * bt.row(1).transpose() * inv_ht;

    const int i0 = ks.element_first_basis(es);
    const int j0 = kt.element_first_basis(et);
    h.setZero();
    hs.setZero();
    ht.setZero();
    for (int j = 0; j <= q; ++j) {
        for (int i = 0; i <= p; ++i) {
            const Eigen::Vector4d cp = cps_.row(space_.linear_index(i0 + i, j0 + j)).transpose();
            h += Ns(i) * Nt(j) * cp;
            hs += dNs(i) * Nt(j) * cp;
            ht += Ns(i) * dNt(j) * cp;
        }
    }
}

Eigen::Vector3d NurbsPatch::map_point(double s, double t) const {
    Eigen::Vector4d h, hs, ht;
    eval_homogeneous(s, t, h, hs, ht);
    return h.head<3>() / h(3);
}

SurfaceFrame NurbsPatch::frame(double s, double t) const {
    Eigen::Vector4d h, hs, ht;
    eval_homogeneous(s, t, h, hs, ht);

    SurfaceFrame f;
    const double w = h(3);
    f.point = h.head<3>() / w;
    // rational quotient rule
    f.jacobian.col(0) = (hs.head<3>() - hs(3) * f.point) / w;
    f.jacobian.col(1) = (ht.head<3>() - ht(3) * f.point) / w;

    const Eigen::Vector3d cross = f.jacobian.col(0).cross(f.jacobian.col(1));
    f.surface_element = cross.norm();

    const double degenerate_tol = 1e-12 * diameter_ * diameter_;
    if (f.surface_element <= degenerate_tol) {
        f.degenerate = true;
        return f;
    }
    f.unit_normal = cross / f.surface_element;
    const Eigen::Matrix2d gram = f.jacobian.transpose() * f.jacobian;
    f.pseudoinverse = gram.inverse() * f.jacobian.transpose();
    return f;
}

NurbsPatch NurbsPatch::refined_dyadic(int levels) const {
    auto [ks, Ts] = space_.s.refine_dyadic(levels);
    auto [kt, Tt] = space_.t.refine_dyadic(levels);

    const int n_old = space_.s.basis_count(), m_old = space_.t.basis_count();
    const int n_new = ks.basis_count(), m_new = kt.basis_count();

    // tensor transfer applied to homogeneous control points
    ControlPoints mid(n_new * m_old, 4);
    for (int j = 0; j < m_old; ++j)
        for (int i = 0; i < n_new; ++i) {
            Eigen::Vector4d acc = Eigen::Vector4d::Zero();
            for (int a = 0; a < n_old; ++a)
                if (Ts(i, a) != 0.0) acc += Ts(i, a) * cps_.row(j * n_old + a).transpose();
            mid.row(j * n_new + i) = acc.transpose();
        }
    ControlPoints fine(n_new * m_new, 4);
    for (int j = 0; j < m_new; ++j)
        for (int i = 0; i < n_new; ++i) {
            Eigen::Vector4d acc = Eigen::Vector4d::Zero();
            for (int b = 0; b < m_old; ++b)
                if (Tt(j, b) != 0.0) acc += Tt(j, b) * mid.row(b * n_new + i).transpose();
            fine.row(j * n_new + i) = acc.transpose();
        }
    return NurbsPatch(TensorSpace{std::move(ks), std::move(kt)}, std::move(fine));
}

Eigen::AlignedBox3d NurbsPatch::element_box(int is, int it) const {
    const int p = space_.s.degree(), q = space_.t.degree();
    const int i0 = space_.s.element_first_basis(is);
    const int j0 = space_.t.element_first_basis(it);

    // per-element Bezier net (tight hull): bezier coeffs = C^T * controls
    Eigen::Matrix<double, Eigen::Dynamic, 4> local(( p + 1) * (q + 1), 4);
    for (int j = 0; j <= q; ++j)
        for (int i = 0; i <= p; ++i)
            local.row(j * (p + 1) + i) = cps_.row(space_.linear_index(i0 + i, j0 + j));

    const Eigen::MatrixXd& Cs = ext_s_.operators[is];
    const Eigen::MatrixXd& Ct = ext_t_.operators[it];
    Eigen::Matrix<double, Eigen::Dynamic, 4> mid(local.rows(), 4);
    for (int j = 0; j <= q; ++j)
        mid.middleRows(j * (p + 1), p + 1) =
            Cs.transpose() * local.middleRows(j * (p + 1), p + 1);
    Eigen::Matrix<double, Eigen::Dynamic, 4> bez(local.rows(), 4);
    for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= q; ++j) {
            Eigen::RowVector4d acc = Eigen::RowVector4d::Zero();
            for (int l = 0; l <= q; ++l) acc += Ct(l, j) * mid.row(l * (p + 1) + i);
            bez.row(j * (p + 1) + i) = acc;
        }

    Eigen::AlignedBox3d box;
    for (int r = 0; r < bez.rows(); ++r)
        box.extend(Eigen::Vector3d(bez.row(r).head<3>().transpose() / bez(r, 3)));
    return box;
}

} // namespace splinemom
