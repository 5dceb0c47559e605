#include "splinemom/geometry_io.hpp"

#include <fstream>

#include <json.hpp>

#include "splinemom/errors.hpp"

namespace splinemom {

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "splinemom-geometry";
constexpr int kFormatVersion = 1;

json knots_to_json(const KnotVector& kv) {
    return json(kv.knots());
}

KnotVector knots_from_json(const json& j, int degree, const std::string& context) {
    if (!j.is_array() || j.size() < 2)
        throw GeometryError("geometry file: bad knot vector in " + context);
    std::vector<double> knots = j.get<std::vector<double>>();
    // affine rescale to [0,1]
    const double lo = knots.front(), hi = knots.back();
    if (!(hi > lo)) throw GeometryError("geometry file: empty knot range in " + context);
    if (lo != 0.0 || hi != 1.0)
        for (double& u : knots) u = (u - lo) / (hi - lo);
    try {
        return KnotVector(std::move(knots), degree);
    } catch (const std::exception& ex) {
        throw GeometryError("geometry file: " + context + ": " + ex.what());
    }
}

} // namespace

MultipatchSurface load_geometry(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("load_geometry: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& ex) {
        throw GeometryError("load_geometry: invalid JSON in " + path + ": " + ex.what());
    }

    if (j.value("format", "") != kFormatName)
        throw GeometryError("load_geometry: not a " + std::string(kFormatName) + " file");
    if (j.value("version", 0) != kFormatVersion)
        throw GeometryError("load_geometry: unsupported version");
    if (!j.contains("patches") || !j["patches"].is_array() || j["patches"].empty())
        throw GeometryError("load_geometry: no patches");
    if (!j.contains("edges") || !j["edges"].is_array())
        throw GeometryError("load_geometry: missing edge table (connectivity is explicit)");

    std::vector<NurbsPatch> patches;
    for (std::size_t p = 0; p < j["patches"].size(); ++p) {
        const json& jp = j["patches"][p];
        const std::string ctx = "patch " + std::to_string(p);
        const int ds = jp.value("degree_s", -1);
        const int dt = jp.value("degree_t", -1);
        if (ds < 0 || dt < 0) throw GeometryError("geometry file: missing degrees in " + ctx);
        TensorSpace space{knots_from_json(jp.at("knots_s"), ds, ctx + " knots_s"),
                          knots_from_json(jp.at("knots_t"), dt, ctx + " knots_t")};
        const json& jc = jp.at("control_points");
        if (!jc.is_array() || static_cast<int>(jc.size()) != space.dim())
            throw GeometryError("geometry file: control point count mismatch in " + ctx);
        NurbsPatch::ControlPoints cps(space.dim(), 4);
        for (int a = 0; a < space.dim(); ++a) {
            const json& row = jc[a];
            if (!row.is_array() || row.size() != 4)
                throw GeometryError("geometry file: control point " + std::to_string(a) +
                                    " in " + ctx + " must be [xw, yw, zw, w]");
            for (int c = 0; c < 4; ++c) cps(a, c) = row[c].get<double>();
        }
        try {
            patches.emplace_back(std::move(space), std::move(cps));
        } catch (const std::exception& ex) {
            throw GeometryError("geometry file: " + ctx + ": " + ex.what());
        }
    }

    std::vector<EdgeRecord> edges;
    for (const json& je : j["edges"]) {
        EdgeRecord e;
        e.patch_a = je.at("patch_a").get<int>();
        e.edge_a = patch_edge_from_string(je.at("edge_a").get<std::string>());
        e.patch_b = je.at("patch_b").get<int>();
        e.edge_b = patch_edge_from_string(je.at("edge_b").get<std::string>());
        e.reversed = je.value("reversed", false);
        edges.push_back(e);
    }

    MultipatchSurface surf = assemble_multipatch(std::move(patches), std::move(edges));

    // optional declared degenerate sides must agree with detection
    if (j.contains("degenerate_edges")) {
        for (const json& jd : j["degenerate_edges"]) {
            const int p = jd.at("patch").get<int>();
            const PatchEdge e = patch_edge_from_string(jd.at("edge").get<std::string>());
            if (!surf.is_degenerate(p, e))
                throw GeometryError("geometry file: declared degenerate edge is not collapsed");
        }
    }
    return surf;
}

void save_geometry(const MultipatchSurface& surface, const std::string& path) {
    json j;
    j["format"] = kFormatName;
    j["version"] = kFormatVersion;
    j["patches"] = json::array();
    for (const auto& patch : surface.patches) {
        json jp;
        jp["degree_s"] = patch.space().s.degree();
        jp["degree_t"] = patch.space().t.degree();
        jp["knots_s"] = knots_to_json(patch.space().s);
        jp["knots_t"] = knots_to_json(patch.space().t);
        json jc = json::array();
        for (int a = 0; a < patch.space().dim(); ++a) {
            const auto row = patch.control_points().row(a);
            jc.push_back({row(0), row(1), row(2), row(3)});
        }
        jp["control_points"] = std::move(jc);
        j["patches"].push_back(std::move(jp));
    }
    j["edges"] = json::array();
    for (const auto& e : surface.edges)
        j["edges"].push_back({{"patch_a", e.patch_a},
                              {"edge_a", to_string(e.edge_a)},
                              {"patch_b", e.patch_b},
                              {"edge_b", to_string(e.edge_b)},
                              {"reversed", e.reversed}});
    j["degenerate_edges"] = json::array();
    for (const auto& d : surface.degenerate_edges)
        j["degenerate_edges"].push_back({{"patch", d.patch}, {"edge", to_string(d.edge)}});

    std::ofstream os(path);
    if (!os) throw IoError("save_geometry: cannot open " + path);
    os << j.dump(1) << '\n';
    if (!os) throw IoError("save_geometry: short write to " + path);
}

} // namespace splinemom
