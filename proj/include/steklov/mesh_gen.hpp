#pragma once

// Test geometries with gamma = rho = 1. `h` is the target edge length.
// Generators throw std::invalid_argument on degenerate parameters.

#include "steklov/mesh.hpp"

namespace steklov {

// Unit disk: concentric rings of 6j points at radius j/N, N = ceil(1/h).
TriangleMesh make_disk(double h);

TriangleMesh make_annulus(double r_in, double r_out, double h);

// Structured grid, each cell split along its rising diagonal.
TriangleMesh make_rectangle(double width, double height, double h);

// Flat cylinder S^1 x [0, a] with the given circumference: a structured
// grid whose first and last columns are identified, so the boundary is
// exactly the two circles y = 0 and y = a. Uses at least two layers and a
// multiple of 6 columns.
TriangleMesh make_cylinder(double circumference, double a, double h);

// Two disks of radius r joined by a straight neck of width w whose free
// length between the disks is about `neck_length`. The disks are centred
// at (+-(neck_length/2 + r), 0). Requires w < 2r. Resolving the neck
// needs h <= w / 2.
TriangleMesh make_dumbbell(double r, double w, double neck_length, double h);

}  // namespace steklov
