#include "splinemom/assembly.hpp"

#include <cmath>
#include <limits>

#include "splinemom/errors.hpp"
#include "splinemom/parallel.hpp"

namespace splinemom {

namespace {

// coarse physical probe grid used for near-pair closest-point searches
constexpr int kProbeGrid = 4;

std::complex<double> to_c(double re) { return {re, 0.0}; }

} // namespace

EfieIntegrator::EfieIntegrator(const ConformingSpace& space, double k, QuadratureConfig quad)
    : space_(space), k_(k), quad_(quad) {
    const int max_degree = std::max(space.degree_a, space.degree_b + 1);
    order_ = quad_.resolve_order(max_degree);
    rule_coincident_ = sauter_schwab_rule(PairClass::Coincident, order_);
    rule_edge_ = sauter_schwab_rule(PairClass::EdgeAdjacent, order_);
    rule_vertex_ = sauter_schwab_rule(PairClass::VertexAdjacent, order_);

    elements_.resize(space.mesh.count());
    for (int e = 0; e < space.mesh.count(); ++e) {
        const auto rule = element_rule(space.surface(), space.mesh.elements[e], order_,
                                       quad_.degenerate_upgrade);
        elements_[e] = build_element_data(e, rule);
    }

    // precompute every non-far pair block (corner-sharing or near); the
    // H-matrix path revisits these many times per assembly. Skipped for
    // very large meshes where the cache footprint would dominate.
    if (space.mesh.count() > 2000) return;
    std::vector<std::vector<int>> corner_elems;
    for (int e = 0; e < space.mesh.count(); ++e)
        for (int c : space.mesh.elements[e].corner) {
            if (c >= static_cast<int>(corner_elems.size())) corner_elems.resize(c + 1);
            corner_elems[c].push_back(e);
        }
    std::vector<std::pair<int, int>> pairs;
    for (int ex = 0; ex < space.mesh.count(); ++ex) {
        std::vector<int> partners;
        for (int c : space.mesh.elements[ex].corner)
            for (int ey : corner_elems[c])
                if (std::find(partners.begin(), partners.end(), ey) == partners.end())
                    partners.push_back(ey);
        // near-but-not-touching partners
        for (int ey = 0; ey < space.mesh.count(); ++ey) {
            if (classify_pair(space.mesh, ex, ey, quad_.near_threshold) ==
                PairClass::RegularNear)
                if (std::find(partners.begin(), partners.end(), ey) == partners.end())
                    partners.push_back(ey);
        }
        for (int ey : partners) pairs.emplace_back(ex, ey);
    }
    std::vector<Eigen::MatrixXcd> results(pairs.size());
    parallel_chunks(pairs.size(), [&](int, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto [ex, ey] = pairs[i];
            const PairClass cls = classify_pair(space_.mesh, ex, ey, quad_.near_threshold);
            if (cls == PairClass::RegularFar)
                regular_block(elements_[ex], elements_[ey], results[i]);
            else if (cls == PairClass::RegularNear)
                near_block(ex, ey, results[i]);
            else
                singular_block(ex, ey, cls, results[i]);
        }
    });
    cached_blocks_.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        cached_blocks_.emplace((static_cast<std::uint64_t>(pairs[i].first) << 32) |
                                   static_cast<std::uint32_t>(pairs[i].second),
                               std::move(results[i]));
}

EfieIntegrator::ElementData EfieIntegrator::build_element_data(int e, const Rule2D& rule) const {
    const auto& el = space_.mesh.elements[e];
    const auto& patch = space_.surface().patches[el.patch];
    const double area = (el.rect.s1 - el.rect.s0) * (el.rect.t1 - el.rect.t0);

    ElementData data;
    const auto& globals = space_.element_dofs(e);
    data.globals = globals;
    data.active = static_cast<int>(globals.size());
    const int nn = static_cast<int>(rule.points.size());
    data.points.resize(nn);
    data.weights.resize(nn);
    for (int c = 0; c < 3; ++c) data.value[c].setZero(nn, data.active);
    data.div.setZero(nn, data.active);

    auto slot_of = [&](int g) {
        for (int i = 0; i < data.active; ++i)
            if (data.globals[i] == g) return i;
        return -1;
    };

    LocalBasis lb;
    for (int q = 0; q < nn; ++q) {
        const double s = el.rect.s0 + (el.rect.s1 - el.rect.s0) * rule.points[q].x();
        const double t = el.rect.t0 + (el.rect.t1 - el.rect.t0) * rule.points[q].y();
        const SurfaceFrame f = patch.frame(s, t);
        data.points[q] = f.point;
        data.weights(q) = rule.weights[q] * area;
        space_.eval_parametric(el.patch, el.is, el.it, s, t, lb);
        for (int i = 0; i < lb.count; ++i) {
            if (lb.global[i] < 0) continue;
            const int col = slot_of(lb.global[i]);
            const Eigen::Vector3d v = f.jacobian * lb.vhat[i];
            for (int c = 0; c < 3; ++c) data.value[c](q, col) += to_c(lb.sign[i] * v(c));
            data.div(q, col) += to_c(lb.sign[i] * lb.divhat[i]);
        }
    }

    data.probe.reserve(kProbeGrid * kProbeGrid);
    for (int j = 0; j < kProbeGrid; ++j)
        for (int i = 0; i < kProbeGrid; ++i) {
            const double s =
                el.rect.s0 + (el.rect.s1 - el.rect.s0) * (i + 0.5) / kProbeGrid;
            const double t =
                el.rect.t0 + (el.rect.t1 - el.rect.t0) * (j + 0.5) / kProbeGrid;
            data.probe.push_back(patch.map_point(s, t));
        }
    return data;
}

void EfieIntegrator::regular_block(const ElementData& a, const ElementData& b,
                                   Eigen::MatrixXcd& out) const {
    const int nx = static_cast<int>(a.points.size());
    const int ny = static_cast<int>(b.points.size());
    Eigen::MatrixXcd K(nx, ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            K(i, j) = a.weights(i) * b.weights(j) * greens((a.points[i] - b.points[j]).norm(), k_);

    out.noalias() = a.value[0].transpose() * K * b.value[0];
    out.noalias() += a.value[1].transpose() * K * b.value[1];
    out.noalias() += a.value[2].transpose() * K * b.value[2];
    out.noalias() -= (1.0 / (k_ * k_)) * (a.div.transpose() * K * b.div);
}

void EfieIntegrator::near_block(int ex, int ey, Eigen::MatrixXcd& out) const {
    const auto& da = elements_[ex];
    const auto& db = elements_[ey];
    // per-side closest probes; each side's choice depends only on its own
    // distance profile, which keeps the (x,y) and (y,x) node sets identical
    // and the assembled matrix symmetric
    auto closest = [](const std::vector<Eigen::Vector3d>& mine,
                      const std::vector<Eigen::Vector3d>& other) {
        int best = 0;
        double best_d = std::numeric_limits<double>::max();
        for (int i = 0; i < static_cast<int>(mine.size()); ++i) {
            double di = std::numeric_limits<double>::max();
            for (const auto& q : other) di = std::min(di, (mine[i] - q).squaredNorm());
            if (di < best_d) {
                best_d = di;
                best = i;
            }
        }
        return best;
    };
    const int best_i = closest(da.probe, db.probe);
    const int best_j = closest(db.probe, da.probe);
    auto grading = [&](int probe_index, int axis) {
        const int idx = (axis == 0) ? probe_index % kProbeGrid : probe_index / kProbeGrid;
        const double u = (idx + 0.5) / kProbeGrid;
        if (u < 0.3) return -1;
        if (u > 0.7) return 1;
        return 0;
    };
    const Rule2D ra =
        graded_rule(order_, grading(best_i, 0), grading(best_i, 1), quad_.near_slices);
    const Rule2D rb =
        graded_rule(order_, grading(best_j, 0), grading(best_j, 1), quad_.near_slices);
    const ElementData fa = build_element_data(ex, ra);
    const ElementData fb = build_element_data(ey, rb);
    regular_block(fa, fb, out);
}

void EfieIntegrator::singular_block(int ex, int ey, PairClass cls, Eigen::MatrixXcd& out) const {
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
    const double inv_k2 = 1.0 / (k_ * k_);

    const auto& ga = space_.element_dofs(ex);
    const auto& gb = space_.element_dofs(ey);
    out.setZero(static_cast<int>(ga.size()), static_cast<int>(gb.size()));

    auto col_of = [](const std::vector<int>& v, int g) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == g) return static_cast<int>(i);
        return -1;
    };

    LocalBasis la, lbb;
    std::array<Eigen::Vector3d, LocalBasis::kMax> va;
    std::array<int, LocalBasis::kMax> ca_idx;
    for (const auto& q : rule.points) {
        const Eigen::Vector2d ra = apply_d4(orient.d4_a, q.x);
        const Eigen::Vector2d rb = apply_d4(orient.d4_b, q.y);
        const double sa = ea.rect.s0 + (ea.rect.s1 - ea.rect.s0) * ra.x();
        const double ta = ea.rect.t0 + (ea.rect.t1 - ea.rect.t0) * ra.y();
        const double sb = eb.rect.s0 + (eb.rect.s1 - eb.rect.s0) * rb.x();
        const double tb = eb.rect.t0 + (eb.rect.t1 - eb.rect.t0) * rb.y();

        const SurfaceFrame fa = pa.frame(sa, ta);
        const SurfaceFrame fb = pb.frame(sb, tb);
        const double r = (fa.point - fb.point).norm();
        if (r <= 0.0)
            throw AssemblyError("efie: coincident quadrature nodes in elements " +
                                std::to_string(ex) + "," + std::to_string(ey));
        const std::complex<double> kw = greens(r, k_) * (q.w * area_a * area_b);

        space_.eval_parametric(ea.patch, ea.is, ea.it, sa, ta, la);
        space_.eval_parametric(eb.patch, eb.is, eb.it, sb, tb, lbb);
        for (int i = 0; i < la.count; ++i) {
            va[i] = fa.jacobian * la.vhat[i];
            ca_idx[i] = (la.global[i] >= 0) ? col_of(ga, la.global[i]) : -1;
        }
        for (int j = 0; j < lbb.count; ++j) {
            if (lbb.global[j] < 0) continue;
            const int cj = col_of(gb, lbb.global[j]);
            const Eigen::Vector3d vb = fb.jacobian * lbb.vhat[j];
            const double sj = lbb.sign[j];
            for (int i = 0; i < la.count; ++i) {
                if (ca_idx[i] < 0) continue;
                const double dot = va[i].dot(vb);
                const double divs = la.divhat[i] * lbb.divhat[j];
                out(ca_idx[i], cj) += kw * (la.sign[i] * sj * (dot - inv_k2 * divs));
            }
        }
    }
}

void EfieIntegrator::pair_block(int ex, int ey, Eigen::MatrixXcd& out) const {
    if (!cached_blocks_.empty()) {
        const auto hit = cached_blocks_.find((static_cast<std::uint64_t>(ex) << 32) |
                                             static_cast<std::uint32_t>(ey));
        if (hit != cached_blocks_.end()) {
            out = hit->second;
            return;
        }
        // cache holds every non-far pair, so a miss is a far pair
        regular_block(elements_[ex], elements_[ey], out);
        return;
    }
    const PairClass cls = classify_pair(space_.mesh, ex, ey, quad_.near_threshold);
    switch (cls) {
        case PairClass::RegularFar:
            regular_block(elements_[ex], elements_[ey], out);
            return;
        case PairClass::RegularNear:
            near_block(ex, ey, out);
            return;
        default:
            singular_block(ex, ey, cls, out);
            return;
    }
}

std::complex<double> EfieIntegrator::single_entry(int dof_row, int dof_col) const {
    std::complex<double> acc = 0.0;
    Eigen::MatrixXcd block;
    for (int ex : space_.dof_elements(dof_row)) {
        const auto& ga = elements_[ex].globals;
        int ia = -1;
        for (std::size_t i = 0; i < ga.size(); ++i)
            if (ga[i] == dof_row) ia = static_cast<int>(i);
        for (int ey : space_.dof_elements(dof_col)) {
            const auto& gb = elements_[ey].globals;
            int jb = -1;
            for (std::size_t j = 0; j < gb.size(); ++j)
                if (gb[j] == dof_col) jb = static_cast<int>(j);
            pair_block(ex, ey, block);
            acc += block(ia, jb);
        }
    }
    return acc;
}

void EfieIntegrator::element_forcing(
    int e, const ScatteringConfig& config,
    std::vector<std::pair<int, std::complex<double>>>& out) const {
    const auto& data = elements_[e];
    const std::complex<double> scale =
        1.0 / (std::complex<double>(0.0, 1.0) * config.omega() * config.permeability);
    out.clear();
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(data.active);
    for (int q = 0; q < static_cast<int>(data.points.size()); ++q) {
        const Eigen::Vector3cd ei = incident_field_E(config, data.points[q]);
        for (int c = 0; c < 3; ++c)
            acc += (data.weights(q) * ei(c)) * data.value[c].row(q).transpose();
    }
    for (int i = 0; i < data.active; ++i) out.emplace_back(data.globals[i], scale * acc(i));
}

DenseSystem assemble_efie(const ConformingSpace& div_space, const ScatteringConfig& config,
                          const QuadratureConfig& quad) {
    if (div_space.kind != SpaceKind::Div)
        throw ContractError("assemble_efie: needs a div-conforming space");
    if (config.wavenumber <= 0.0) throw DomainError("assemble_efie: wavenumber must be positive");

    const EfieIntegrator integrator(div_space, config.wavenumber, quad);
    const int n = div_space.global_dim;
    const int ne = div_space.mesh.count();

    DenseSystem sys;
    sys.kind = SystemKind::Efie;
    sys.matrix.setZero(n, n);
    sys.rhs.setZero(n);

    const int workers = std::min<std::size_t>(worker_count(), static_cast<std::size_t>(ne));
    std::vector<Eigen::MatrixXcd> partial(workers, Eigen::MatrixXcd::Zero(n, n));
    std::vector<Eigen::VectorXcd> partial_rhs(workers, Eigen::VectorXcd::Zero(n));

    parallel_chunks(ne, [&](int chunk, std::size_t begin, std::size_t end) {
        Eigen::MatrixXcd block;
        std::vector<std::pair<int, std::complex<double>>> forcing;
        for (std::size_t ex = begin; ex < end; ++ex) {
            const auto& ga = integrator.element_data(static_cast<int>(ex)).globals;
            for (int ey = 0; ey < ne; ++ey) {
                integrator.pair_block(static_cast<int>(ex), ey, block);
                const auto& gb = integrator.element_data(ey).globals;
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
