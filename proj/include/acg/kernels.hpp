#pragma once

#include <vector>

#include "acg/magnetostatics.hpp"

namespace acg::kernels {

// Field of a polyline current path (segments between consecutive nodes),
// evaluated at many points. The parallel version splits the evaluation
// points across OpenMP threads; per-point sums are independent, so the two
// variants are bit-identical.
void polyline_field_serial(const std::vector<Vec3>& nodes, double current,
                           const std::vector<Vec3>& points, std::vector<Vec3>& out);
void polyline_field_parallel(const std::vector<Vec3>& nodes, double current,
                             const std::vector<Vec3>& points, std::vector<Vec3>& out);

}  // namespace acg::kernels
