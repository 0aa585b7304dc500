#pragma once

#include <Eigen/Dense>

#include "core/grid.hpp"

namespace g2sf {

// Symmetric tensors on grids are stored with components in lexicographic pair
// order: d=3 -> (00,01,02,11,12,22), d=2 -> (00,01,11), d=1 -> (00).
inline int sym_count(int d) { return d * (d + 1) / 2; }

inline int sym_index(int d, int i, int j) {
    if (i > j) std::swap(i, j);
    int idx = 0;
    for (int r = 0; r < i; ++r) idx += d - r;
    return idx + (j - i);
}

Eigen::MatrixXd sym_unpack(const GridField& g, std::size_t node, int d);
void sym_pack(GridField& g, std::size_t node, const Eigen::MatrixXd& m);

/// Christoffel symbols Gamma^k_ij of a symmetric metric field, by the central
/// difference stencils of `derivative` (one-sided at boundaries). Output has
/// d * sym_count(d) components, k-major then (ij) in symmetric order.
/// Throws on a singular metric node, naming the node.
GridField christoffel_field(const GridField& metric);

/// Inverse metric field, same symmetric layout. Throws on singular nodes.
GridField inverse_metric_field(const GridField& metric, double min_abs_det = 1e-12);

}  // namespace g2sf
