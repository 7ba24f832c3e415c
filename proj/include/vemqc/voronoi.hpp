// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vemqc/domain.hpp"
#include "vemqc/poly_mesh.hpp"

namespace vemqc {

// Voronoi-style dual of a uniform right-triangle grid on (0,1)^2 with n
// subdivisions per side: one cell per grid vertex, built from the incident
// triangle barycenters, closed along the boundary by edge midpoints and
// the vertex itself. Interior cells are hexagons.
PolygonMesh gen_structured_voronoi(int n);

// Clipped Voronoi diagram of Lloyd-relaxed random seeds. Deterministic for
// fixed (domain, n_seeds, seed). Relaxation stops when the maximum seed
// movement falls below 1e-3 times the current mesh size, or after
// lloyd_iters rounds.
PolygonMesh gen_random_voronoi(const DomainSpec& domain, int n_seeds, unsigned long seed,
                               int lloyd_iters = 100);

}  // namespace vemqc
