#pragma once

#include "shrinkflow/mesh.hpp"

namespace shrinkflow {

/// Geodesic icosphere: icosahedron subdivided `subdiv` times (subdiv in
/// [0,7]), vertices projected onto the sphere of radius `radius`.
/// Vertex count is 10*4^subdiv + 2.
TriangulatedHypersurface icosphere(int subdiv, double radius);

/// Icosphere scaled per axis; strictly convex for positive semi-axes.
TriangulatedHypersurface ellipsoid(double a, double b, double c, int subdiv);

}  // namespace shrinkflow
