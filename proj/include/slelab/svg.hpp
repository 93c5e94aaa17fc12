#pragma once
#include <span>
#include <string>

#include "slelab/loewner.hpp"

namespace slelab {

// Traces as polylines, target discs as circles; viewport fit to the union
// bounding box with a 10% margin.  max_points_per_trace decimates long
// traces to bound file size.
void render_traces(std::span<const CurveTrace> traces,
                   std::span<const cplx> targets,
                   std::span<const double> radii, const std::string& path,
                   std::size_t max_points_per_trace = 4000);

}  // namespace slelab
