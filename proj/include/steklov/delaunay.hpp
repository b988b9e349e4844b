#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "steklov/mesh.hpp"

namespace steklov {

// Delaunay triangulation of a point set by incremental insertion with
// Lawson flips. Returns counterclockwise triangles indexing `points`.
// An edge is flipped when the cotangents of its two opposite angles sum
// below -1e-12, so every interior edge of the result has nonnegative
// cotangent weight up to that tolerance. Throws StructuralError on
// duplicate points.
std::vector<std::array<std::size_t, 3>> delaunay_triangulate(
    const std::vector<Point2>& points);

}  // namespace steklov
