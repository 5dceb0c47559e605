#include "splinemom/conforming_space.hpp"

#include <algorithm>
#include <cmath>

#include "splinemom/errors.hpp"

namespace splinemom {

namespace {

struct EdgeDofList {
    // locals ordered along the edge parameter; along-edge knot vector
    std::vector<int> locals;
    const KnotVector* along = nullptr;
};

// normal-trace dofs of the div structure on a patch side
EdgeDofList edge_normal_dofs(const ConformingSpace::PatchSpace& ps, PatchEdge edge) {
    EdgeDofList out;
    switch (edge) {
        case PatchEdge::SMin:
        case PatchEdge::SMax: {
            const int i = (edge == PatchEdge::SMin) ? 0 : ps.c1.count_s - 1;
            for (int j = 0; j < ps.c1.count_t; ++j) out.locals.push_back(j * ps.c1.count_s + i);
            out.along = &ps.c1.t;
            break;
        }
        case PatchEdge::TMin:
        case PatchEdge::TMax: {
            const int j = (edge == PatchEdge::TMin) ? 0 : ps.c2.count_t - 1;
            for (int i = 0; i < ps.c2.count_s; ++i)
                out.locals.push_back(ps.n1 + j * ps.c2.count_s + i);
            out.along = &ps.c2.s;
            break;
        }
    }
    return out;
}

ConformingSpace::Component make_component(int deg_s, int deg_t,
                                          const std::vector<double>& breaks_s,
                                          const std::vector<double>& breaks_t) {
    ConformingSpace::Component c{KnotVector::from_breaks(deg_s, breaks_s),
                                 KnotVector::from_breaks(deg_t, breaks_t),
                                 {},
                                 {},
                                 0,
                                 0};
    c.ext_s = bezier_extract(c.s);
    c.ext_t = bezier_extract(c.t);
    c.count_s = c.s.basis_count();
    c.count_t = c.t.basis_count();
    return c;
}

// active patch-local dofs on element (is,it)
void element_local_dofs(const ConformingSpace::PatchSpace& ps, int is, int it,
                        std::vector<int>& out) {
    out.clear();
    {
        const int i0 = ps.c1.s.element_first_basis(is);
        const int j0 = ps.c1.t.element_first_basis(it);
        for (int j = 0; j <= ps.c1.t.degree(); ++j)
            for (int i = 0; i <= ps.c1.s.degree(); ++i)
                out.push_back((j0 + j) * ps.c1.count_s + (i0 + i));
    }
    {
        const int i0 = ps.c2.s.element_first_basis(is);
        const int j0 = ps.c2.t.element_first_basis(it);
        for (int j = 0; j <= ps.c2.t.degree(); ++j)
            for (int i = 0; i <= ps.c2.s.degree(); ++i)
                out.push_back(ps.n1 + (j0 + j) * ps.c2.count_s + (i0 + i));
    }
}

// div-Piola vector of one local dof at a point (no sign applied)
Eigen::Vector3d div_vector_of_local(const ConformingSpace& space, int patch, int local, double s,
                                    double t) {
    const auto& pm = space.surface().patches[patch].mesh();
    const int is = pm.count_s() > 0 ? space.surface().patches[patch].space().s.element_of(s) : 0;
    const int it = space.surface().patches[patch].space().t.element_of(t);
    LocalBasis lb;
    space.eval_parametric(patch, is, it, s, t, lb);
    const SurfaceFrame f = space.surface().patches[patch].frame(s, t);
    for (int k = 0; k < lb.count; ++k)
        if (lb.local[k] == local) return (f.jacobian * lb.vhat[k]) / f.surface_element;
    return Eigen::Vector3d::Zero();
}

} // namespace

void ConformingSpace::eval_parametric(int patch, int is, int it, double s, double t,
                                      LocalBasis& out) const {
    const PatchSpace& ps = patch_spaces[patch];
    out.count = 0;

    auto emit = [&](int local, const Eigen::Vector2d& vhat, double divhat) {
        const int k = out.count++;
        out.local[k] = local;
        out.global[k] = ps.global[local];
        out.sign[k] = ps.sign[local];
        out.vhat[k] = vhat;
        out.divhat[k] = divhat;
    };

    auto component_values = [&](const Component& c, auto&& yield) {
        const auto [sa, sb] = c.s.element_bounds(is);
        const auto [ta, tb] = c.t.element_bounds(it);
        const double inv_hs = 1.0 / (sb - sa), inv_ht = 1.0 / (tb - ta);
        const Eigen::MatrixXd bs = bernstein_ders(c.s.degree(), (s - sa) * inv_hs, 1);
        const Eigen::MatrixXd bt = bernstein_ders(c.t.degree(), (t - ta) * inv_ht, 1);
        const Eigen::VectorXd Ns = c.ext_s.operators[is] * bs.row(0).transpose();
        const Eigen::VectorXd dNs = c.ext_s.operators[is] * bs.row(1).transpose() * inv_hs;
        const Eigen::VectorXd Nt = c.ext_t.operators[it] * bt.row(0).transpose();
        const Eigen::VectorXd dNt = c.ext_t.operators[it] * bt.row(1).transpose() * inv_ht;
        const int i0 = c.s.element_first_basis(is);
        const int j0 = c.t.element_first_basis(it);
        for (int j = 0; j <= c.t.degree(); ++j)
            for (int i = 0; i <= c.s.degree(); ++i)
                yield((j0 + j) * c.count_s + (i0 + i), Ns(i) * Nt(j), dNs(i) * Nt(j),
                      Ns(i) * dNt(j));
    };

    component_values(ps.c1, [&](int local, double v, double dv_ds, double /*dv_dt*/) {
        emit(local, {v, 0.0}, dv_ds);
    });
    component_values(ps.c2, [&](int local, double v, double /*dv_ds*/, double dv_dt) {
        emit(ps.n1 + local, {0.0, v}, dv_dt);
    });
}

VectorBasisEvaluation ConformingSpace::eval_basis(int patch, int is, int it, double s,
                                                  double t) const {
    const SurfaceFrame f = surface().patches[patch].frame(s, t);
    if (f.degenerate)
        throw DomainError("eval_basis: degenerate surface frame");

    LocalBasis lb;
    eval_parametric(patch, is, it, s, t, lb);

    VectorBasisEvaluation ev;
    ev.element = mesh.index_of(patch, is, it, surface().patches[patch].mesh().count_s());
    ev.count = lb.count;
    const double inv_j = 1.0 / f.surface_element;
    for (int k = 0; k < lb.count; ++k) {
        ev.global[k] = lb.global[k];
        ev.sign[k] = lb.sign[k];
        if (kind == SpaceKind::Div) {
            ev.value[k] = (f.jacobian * lb.vhat[k]) * inv_j;
            ev.surface_div[k] = lb.divhat[k] * inv_j;
        } else {
            const Eigen::Vector2d rot(-lb.vhat[k](1), lb.vhat[k](0));
            ev.value[k] = f.pseudoinverse.transpose() * rot;
            ev.surface_div[k] = 0.0;
        }
    }
    return ev;
}

Eigen::Vector3cd ConformingSpace::evaluate_field(const Eigen::VectorXcd& coeffs, int patch,
                                                 double s, double t) const {
    if (coeffs.size() != global_dim)
        throw ContractError("evaluate_field: coefficient length != global dimension");
    const auto& sp = surface().patches[patch].space();
    const auto ev = eval_basis(patch, sp.s.element_of(s), sp.t.element_of(t), s, t);
    Eigen::Vector3cd out = Eigen::Vector3cd::Zero();
    for (int k = 0; k < ev.count; ++k)
        if (ev.global[k] >= 0) out += ev.sign[k] * coeffs(ev.global[k]) * ev.value[k];
    return out;
}

ConformingSpace build_conforming_space(std::shared_ptr<const MultipatchSurface> surface,
                                       SpaceKind kind, int degree_a, int degree_b) {
    if (degree_a < 1 || degree_b < 0)
        throw DomainError("conforming space: degrees must satisfy a >= 1, b >= 0");

    ConformingSpace space;
    space.kind = kind;
    space.degree_a = degree_a;
    space.degree_b = degree_b;
    space.surface_ = std::move(surface);
    const MultipatchSurface& surf = *space.surface_;

    for (const auto& patch : surf.patches) {
        const auto breaks_s = patch.space().s.unique_knots();
        const auto breaks_t = patch.space().t.unique_knots();
        ConformingSpace::PatchSpace ps;
        ps.c1 = make_component(degree_a, degree_b, breaks_s, breaks_t);
        ps.c2 = make_component(degree_a - 1, degree_b + 1, breaks_s, breaks_t);
        ps.n1 = ps.c1.count();
        ps.n2 = ps.c2.count();
        ps.global.assign(ps.n1 + ps.n2, -2); // -2 unassigned, -1 removed
        ps.sign.assign(ps.n1 + ps.n2, 1.0);
        space.patch_spaces.push_back(std::move(ps));
    }

    // dofs with normal trace on a collapsed side carry an unbounded Piola
    // image there; they are dropped from the global space
    for (const auto& d : surf.degenerate_edges)
        for (int local : edge_normal_dofs(space.patch_spaces[d.patch], d.edge).locals)
            space.patch_spaces[d.patch].global[local] = -1;

    // cross-edge identification links
    struct Link {
        int patch_a, local_a;
        int patch_b, local_b;
        const EdgeRecord* edge;
        int ordinal; // along-edge index on side a
    };
    std::vector<Link> links;
    std::vector<std::vector<int>> link_of(surf.patch_count());
    for (int p = 0; p < surf.patch_count(); ++p)
        link_of[p].assign(space.patch_spaces[p].global.size(), -1);

    for (const auto& e : surf.edges) {
        const auto da = edge_normal_dofs(space.patch_spaces[e.patch_a], e.edge_a);
        const auto db = edge_normal_dofs(space.patch_spaces[e.patch_b], e.edge_b);
        if (da.locals.size() != db.locals.size())
            throw GeometryError("conforming space: incompatible edge knots between patch " +
                                std::to_string(e.patch_a) + " and " + std::to_string(e.patch_b));
        const int n = static_cast<int>(da.locals.size());
        for (int k = 0; k < n; ++k) {
            const int la = da.locals[k];
            const int lb = db.locals[e.reversed ? n - 1 - k : k];
            if (space.patch_spaces[e.patch_a].global[la] == -1 ||
                space.patch_spaces[e.patch_b].global[lb] == -1)
                continue;
            if (link_of[e.patch_a][la] >= 0 || link_of[e.patch_b][lb] >= 0)
                throw GeometryError("conforming space: dof identified across two edges");
            const int id = static_cast<int>(links.size());
            links.push_back({e.patch_a, la, e.patch_b, lb, &e, k});
            link_of[e.patch_a][la] = id;
            link_of[e.patch_b][lb] = id;
        }
    }

    // numbering: owner is the first (patch, local) in iteration order
    int next = 0;
    for (int p = 0; p < surf.patch_count(); ++p) {
        auto& ps = space.patch_spaces[p];
        for (int local = 0; local < static_cast<int>(ps.global.size()); ++local) {
            if (ps.global[local] != -2) continue;
            ps.global[local] = next;
            ps.sign[local] = 1.0;
            const int lid = link_of[p][local];
            if (lid >= 0) {
                const Link& ln = links[lid];
                const bool a_side = (ln.patch_a == p && ln.local_a == local);
                const int q = a_side ? ln.patch_b : ln.patch_a;
                const int lq = a_side ? ln.local_b : ln.local_a;
                space.patch_spaces[q].global[lq] = next;
                space.patch_spaces[q].sign[lq] = 0.0; // resolved below
            }
            ++next;
        }
    }
    space.global_dim = next;

    // flux-matching signs, evaluated at a point inside both supports:
    // outward co-normal traces of the paired functions must cancel
    for (const Link& ln : links) {
        const EdgeRecord& e = *ln.edge;
        const auto da = edge_normal_dofs(space.patch_spaces[e.patch_a], e.edge_a);
        const KnotVector& along = *da.along;
        const int deg = along.degree();
        const auto& kn = along.knots();
        const double u_a = 0.5 * (kn[ln.ordinal] + kn[ln.ordinal + deg + 1]);
        const double u_b = e.reversed ? 1.0 - u_a : u_a;

        auto side_flux = [&](int patch, PatchEdge edge, int local, double u) {
            const auto [s, t] = edge_point(edge, u);
            const SurfaceFrame f = surf.patches[patch].frame(s, t);
            const Eigen::Vector3d value = div_vector_of_local(space, patch, local, s, t);
            const bool s_edge = (edge == PatchEdge::SMin || edge == PatchEdge::SMax);
            const Eigen::Vector3d tangent = s_edge ? f.jacobian.col(1) : f.jacobian.col(0);
            Eigen::Vector3d conormal = f.unit_normal.cross(tangent.normalized());
            Eigen::Vector3d inward = s_edge ? f.jacobian.col(0) : f.jacobian.col(1);
            if (edge == PatchEdge::SMax || edge == PatchEdge::TMax) inward = -inward;
            if (conormal.dot(inward) > 0.0) conormal = -conormal;
            return value.dot(conormal);
        };

        const double flux_a = side_flux(e.patch_a, e.edge_a, ln.local_a, u_a);
        const double flux_b = side_flux(e.patch_b, e.edge_b, ln.local_b, u_b);
        if (flux_a == 0.0 || flux_b == 0.0)
            throw GeometryError("conforming space: vanishing edge trace during sign resolution");
        const double rel = (flux_a * flux_b < 0.0) ? 1.0 : -1.0;

        auto& sign_a = space.patch_spaces[ln.patch_a].sign[ln.local_a];
        auto& sign_b = space.patch_spaces[ln.patch_b].sign[ln.local_b];
        if (sign_b == 0.0)
            sign_b = rel * sign_a;
        else
            sign_a = rel * sign_b;
    }

    space.mesh = build_surface_mesh(surf);

    // support boxes and dof/element maps
    space.dof_boxes.assign(space.global_dim, Eigen::AlignedBox3d());
    space.dof_elements_.resize(space.global_dim);
    space.element_dofs_.resize(space.mesh.count());
    std::vector<int> locals;
    for (int e = 0; e < space.mesh.count(); ++e) {
        const auto& el = space.mesh.elements[e];
        element_local_dofs(space.patch_spaces[el.patch], el.is, el.it, locals);
        auto& eds = space.element_dofs_[e];
        for (int local : locals) {
            const int g = space.patch_spaces[el.patch].global[local];
            if (g < 0) continue;
            space.dof_boxes[g].extend(el.box);
            if (std::find(eds.begin(), eds.end(), g) == eds.end()) {
                eds.push_back(g);
                space.dof_elements_[g].push_back(e);
            }
        }
        std::sort(eds.begin(), eds.end());
    }
    return space;
}

} // namespace splinemom
