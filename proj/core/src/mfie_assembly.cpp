#include <cmath>
#include <limits>

#include "splinemom/assembly.hpp"
#include "splinemom/errors.hpp"
#include "splinemom/parallel.hpp"

namespace splinemom {

namespace {

// epsilon_{cde} terms of a.(g x b) = sum eps_{cde} g_c b_d a_e
struct EpsTerm {
    int c, d, e;
    double sign;
};
constexpr EpsTerm kEps[6] = {{0, 1, 2, 1.0},  {1, 2, 0, 1.0},  {2, 0, 1, 1.0},
                             {0, 2, 1, -1.0}, {1, 0, 2, -1.0}, {2, 1, 0, -1.0}};

struct MfieElementData {
    std::vector<Eigen::Vector3d> points;
    Eigen::VectorXd weights;      // parametric weights incl. element area
    Eigen::VectorXd jac;          // surface element J at the nodes
    Eigen::MatrixXcd div_value[3];  // DF*vhat, sign folded (test side)
    Eigen::MatrixXcd curl_value[3]; // (DF+)^T rot(vhat), sign folded (trial side)
    std::vector<int> globals;
    int active = 0;
};

class MfieIntegrator {
public:
    MfieIntegrator(const ConformingSpace& div_space, double k, QuadratureConfig quad)
        : space_(div_space), k_(k), quad_(quad) {
        const int max_degree = std::max(space_.degree_a, space_.degree_b + 1);
        order_ = quad_.resolve_order(max_degree);
        rule_coincident_ = sauter_schwab_rule(PairClass::Coincident, order_);
        rule_edge_ = sauter_schwab_rule(PairClass::EdgeAdjacent, order_);
        rule_vertex_ = sauter_schwab_rule(PairClass::VertexAdjacent, order_);
        elements_.resize(space_.mesh.count());
        for (int e = 0; e < space_.mesh.count(); ++e)
            elements_[e] = build_element_data(
                e, element_rule(space_.surface(), space_.mesh.elements[e], order_,
                                quad_.degenerate_upgrade));
    }

    const MfieElementData& data(int e) const { return elements_[e]; }

    // -integral N^div_A . (grad_x G x N^curl_B), regular tensor path
    void regular_block(const MfieElementData& a, const MfieElementData& b,
                       Eigen::MatrixXcd& out) const {
        const int nx = static_cast<int>(a.points.size());
        const int ny = static_cast<int>(b.points.size());
        Eigen::MatrixXcd G[3];
        for (auto& g : G) g.resize(nx, ny);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                const Eigen::Vector3cd grad = grad_greens(a.points[i], b.points[j], k_);
                const double w = a.weights(i) * b.weights(j) * b.jac(j);
                for (int c = 0; c < 3; ++c) G[c](i, j) = w * grad(c);
            }
        out.setZero(a.active, b.active);
        for (const auto& t : kEps)
            out.noalias() -=
                t.sign * (a.div_value[t.e].transpose() * G[t.c] * b.curl_value[t.d]);
    }

    void singular_block(int ex, int ey, PairClass cls, Eigen::MatrixXcd& out) const {
        const auto& ea = space_.mesh.elements[ex];
        const auto& eb = space_.mesh.elements[ey];
        const auto& pa = space_.surface().patches[ea.patch];
        const auto& pb = space_.surface().patches[eb.patch];
        const PairOrientation orient = canonical_orientation(space_.mesh, ex, ey, cls);
        const PairRule& rule = (cls == PairClass::Coincident)
                                   ? rule_coincident_
                                   : (cls == PairClass::EdgeAdjacent ? rule_edge_ : rule_vertex_);
        const double area_a = (ea.rect.s1 - ea.rect.s0) * (ea.rect.t1 - ea.rect.t0);
        const double area_b = (eb.rect.s1 - eb.rect.s0) * (eb.rect.t1 - eb.rect.t0);
        const auto& ga = space_.element_dofs(ex);
        const auto& gb = space_.element_dofs(ey);
        out.setZero(static_cast<int>(ga.size()), static_cast<int>(gb.size()));

        auto col_of = [](const std::vector<int>& v, int g) {
            for (std::size_t i = 0; i < v.size(); ++i)
                if (v[i] == g) return static_cast<int>(i);
            return -1;
        };

        LocalBasis la, lb;
        for (const auto& q : rule.points) {
            const Eigen::Vector2d rxa = apply_d4(orient.d4_a, q.x);
            const Eigen::Vector2d rxb = apply_d4(orient.d4_b, q.y);
            const double sa = ea.rect.s0 + (ea.rect.s1 - ea.rect.s0) * rxa.x();
            const double ta = ea.rect.t0 + (ea.rect.t1 - ea.rect.t0) * rxa.y();
            const double sb = eb.rect.s0 + (eb.rect.s1 - eb.rect.s0) * rxb.x();
            const double tb = eb.rect.t0 + (eb.rect.t1 - eb.rect.t0) * rxb.y();
            const SurfaceFrame fa = pa.frame(sa, ta);
            const SurfaceFrame fb = pb.frame(sb, tb);
            if (fb.degenerate) continue; // tip point itself carries zero measure
            const Eigen::Vector3cd grad = grad_greens(fa.point, fb.point, k_);
            const double w = q.w * area_a * area_b * fb.surface_element;

            space_.eval_parametric(ea.patch, ea.is, ea.it, sa, ta, la);
            space_.eval_parametric(eb.patch, eb.is, eb.it, sb, tb, lb);
            for (int j = 0; j < lb.count; ++j) {
                if (lb.global[j] < 0) continue;
                const int cj = col_of(gb, lb.global[j]);
                const Eigen::Vector2d rot(-lb.vhat[j](1), lb.vhat[j](0));
                const Eigen::Vector3d cb = fb.pseudoinverse.transpose() * rot;
                const Eigen::Vector3cd gxb = grad.cross(cb.cast<std::complex<double>>());
                for (int i = 0; i < la.count; ++i) {
                    if (la.global[i] < 0) continue;
                    const Eigen::Vector3d va = fa.jacobian * la.vhat[i];
                    out(col_of(ga, la.global[i]), cj) -=
                        (la.sign[i] * lb.sign[j] * w) * va.cast<std::complex<double>>().dot(gxb);
                }
            }
        }
    }

    void pair_block(int ex, int ey, Eigen::MatrixXcd& out) const {
        const PairClass cls = classify_pair(space_.mesh, ex, ey, quad_.near_threshold);
        switch (cls) {
            case PairClass::RegularFar:
                regular_block(elements_[ex], elements_[ey], out);
                return;
            case PairClass::RegularNear: {
                const MfieElementData fa = build_element_data(ex, tensor_rule(order_ + 2));
                const MfieElementData fb = build_element_data(ey, tensor_rule(order_ + 2));
                regular_block(fa, fb, out);
                return;
            }
            default:
                singular_block(ex, ey, cls, out);
                return;
        }
    }

    Eigen::MatrixXcd mass_block(int e) const {
        const auto& d = elements_[e];
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d.active, d.active);
        const Eigen::VectorXd wj = d.weights.cwiseProduct(d.jac);
        for (int c = 0; c < 3; ++c)
            out.noalias() += d.curl_value[c].adjoint() * wj.asDiagonal() * d.curl_value[c];
        return out;
    }

    void element_forcing(int e, const ScatteringConfig& config,
                         std::vector<std::pair<int, std::complex<double>>>& out) const {
        const auto& d = elements_[e];
        out.clear();
        Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(d.active);
        for (int q = 0; q < static_cast<int>(d.points.size()); ++q) {
            const Eigen::Vector3cd hi = incident_field_H(config, d.points[q]);
            for (int c = 0; c < 3; ++c)
                acc += (d.weights(q) * hi(c)) * d.div_value[c].row(q).transpose();
        }
        for (int i = 0; i < d.active; ++i) out.emplace_back(d.globals[i], acc(i));
    }

    int order_;

private:
    MfieElementData build_element_data(int e, const Rule2D& rule) const {
        const auto& el = space_.mesh.elements[e];
        const auto& patch = space_.surface().patches[el.patch];
        const double area = (el.rect.s1 - el.rect.s0) * (el.rect.t1 - el.rect.t0);
        MfieElementData d;
        d.globals = space_.element_dofs(e);
        d.active = static_cast<int>(d.globals.size());
        const int nn = static_cast<int>(rule.points.size());
        d.points.resize(nn);
        d.weights.resize(nn);
        d.jac.resize(nn);
        for (int c = 0; c < 3; ++c) {
            d.div_value[c].setZero(nn, d.active);
            d.curl_value[c].setZero(nn, d.active);
        }
        auto col_of = [&](int g) {
            for (int i = 0; i < d.active; ++i)
                if (d.globals[i] == g) return i;
            return -1;
        };
        LocalBasis lb;
        for (int q = 0; q < nn; ++q) {
            const double s = el.rect.s0 + (el.rect.s1 - el.rect.s0) * rule.points[q].x();
            const double t = el.rect.t0 + (el.rect.t1 - el.rect.t0) * rule.points[q].y();
            const SurfaceFrame f = patch.frame(s, t);
            d.points[q] = f.point;
            d.weights(q) = rule.weights[q] * area;
            d.jac(q) = f.surface_element;
            space_.eval_parametric(el.patch, el.is, el.it, s, t, lb);
            for (int i = 0; i < lb.count; ++i) {
                if (lb.global[i] < 0) continue;
                const int col = col_of(lb.global[i]);
                const Eigen::Vector3d dv = f.jacobian * lb.vhat[i];
                const Eigen::Vector2d rot(-lb.vhat[i](1), lb.vhat[i](0));
                const Eigen::Vector3d cv =
                    f.degenerate ? Eigen::Vector3d::Zero()
                                 : Eigen::Vector3d(f.pseudoinverse.transpose() * rot);
                for (int c = 0; c < 3; ++c) {
                    d.div_value[c](q, col) += lb.sign[i] * dv(c);
                    d.curl_value[c](q, col) += lb.sign[i] * cv(c);
                }
            }
        }
        return d;
    }

    const ConformingSpace& space_;
    double k_;
    QuadratureConfig quad_;
    PairRule rule_coincident_, rule_edge_, rule_vertex_;
    std::vector<MfieElementData> elements_;
};

} // namespace

Eigen::MatrixXcd mfie_identity_block(const ConformingSpace& curl_space,
                                     const QuadratureConfig& quad) {
    MfieIntegrator integrator(curl_space, 1.0, quad);
    const int n = curl_space.global_dim;
    Eigen::MatrixXcd mass = Eigen::MatrixXcd::Zero(n, n);
    for (int e = 0; e < curl_space.mesh.count(); ++e) {
        const Eigen::MatrixXcd block = integrator.mass_block(e);
        const auto& g = integrator.data(e).globals;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) mass(g[i], g[j]) += 0.5 * block(i, j);
    }
    return mass;
}

DenseSystem assemble_mfie(const ConformingSpace& div_space, const ConformingSpace& curl_space,
                          const ScatteringConfig& config, const QuadratureConfig& quad) {
    if (div_space.kind != SpaceKind::Div || curl_space.kind != SpaceKind::Curl)
        throw ContractError("assemble_mfie: needs div and curl spaces");
    if (div_space.global_dim != curl_space.global_dim ||
        div_space.degree_a != curl_space.degree_a || div_space.degree_b != curl_space.degree_b)
        throw ContractError("assemble_mfie: spaces must be built on identical knots");

    MfieIntegrator integrator(div_space, config.wavenumber, quad);
    const int n = div_space.global_dim;
    const int ne = div_space.mesh.count();

    DenseSystem sys;
    sys.kind = SystemKind::Mfie;
    sys.matrix = mfie_identity_block(curl_space, quad);
    sys.rhs.setZero(n);

    const int workers = std::min<std::size_t>(worker_count(), static_cast<std::size_t>(ne));
    std::vector<Eigen::MatrixXcd> partial(workers, Eigen::MatrixXcd::Zero(n, n));
    std::vector<Eigen::VectorXcd> partial_rhs(workers, Eigen::VectorXcd::Zero(n));
    parallel_chunks(ne, [&](int chunk, std::size_t begin, std::size_t end) {
        Eigen::MatrixXcd block;
        std::vector<std::pair<int, std::complex<double>>> forcing;
        for (std::size_t ex = begin; ex < end; ++ex) {
            const auto& ga = integrator.data(static_cast<int>(ex)).globals;
            for (int ey = 0; ey < ne; ++ey) {
                integrator.pair_block(static_cast<int>(ex), ey, block);
                const auto& gb = integrator.data(ey).globals;
                for (std::size_t i = 0; i < ga.size(); ++i)
                    for (std::size_t j = 0; j < gb.size(); ++j)
                        partial[chunk](ga[i], gb[j]) += block(i, j);
            }
            integrator.element_forcing(static_cast<int>(ex), config, forcing);
            for (const auto& [g, v] : forcing) partial_rhs[chunk](g) += v;
        }
    });
    for (int w = 0; w < workers; ++w) {
        sys.matrix += partial[w];
        sys.rhs += partial_rhs[w];
    }
    return sys;
}

} // namespace splinemom
