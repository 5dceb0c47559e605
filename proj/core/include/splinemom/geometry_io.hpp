#pragma once

#include <string>

#include "splinemom/multipatch.hpp"

namespace splinemom {

/// Versioned JSON multipatch geometry exchange format. The edge table is
/// explicit: files without one are rejected rather than inferred.
/// Knot vectors outside [0,1] are rescaled affinely on load.
MultipatchSurface load_geometry(const std::string& path);
void save_geometry(const MultipatchSurface& surface, const std::string& path);

} // namespace splinemom
