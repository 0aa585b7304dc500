#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "core/errors.hpp"
#include "core/multiindex.hpp"

namespace g2sf {

/// Uniformly sampled field on a 1/2/3-dimensional rectangular grid.
///
/// Storage is row-major over nodes (last axis fastest) with the component
/// index innermost: values[flat(node) * components + comp]. Complex fields
/// are stored as real pairs (2m = Re, 2m+1 = Im); there is no separate
/// complex field type.
class GridField {
public:
    GridField() = default;
    GridField(int dim, std::array<std::size_t, 3> shape, std::array<double, 3> origin,
              std::array<double, 3> spacing, int components)
        : dim_(dim), shape_(shape), origin_(origin), spacing_(spacing), components_(components) {
        require(dim >= 1 && dim <= 3, ErrorKind::invalid_argument, "GridField: dimension must be 1..3");
        require(components >= 1, ErrorKind::invalid_argument, "GridField: need at least one component");
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) {
            require(shape_[static_cast<std::size_t>(a)] >= 3, ErrorKind::invalid_argument,
                    "GridField: need at least 3 nodes per axis (stencil width)");
            require(spacing_[static_cast<std::size_t>(a)] > 0.0, ErrorKind::invalid_argument,
                    "GridField: spacing must be positive");
            n *= shape_[static_cast<std::size_t>(a)];
        }
        for (int a = dim; a < 3; ++a) {
            shape_[static_cast<std::size_t>(a)] = 1;
            spacing_[static_cast<std::size_t>(a)] = 1.0;
            origin_[static_cast<std::size_t>(a)] = 0.0;
        }
        values_.assign(n * static_cast<std::size_t>(components), 0.0);
    }

    int dim() const { return dim_; }
    int components() const { return components_; }
    const std::array<std::size_t, 3>& shape() const { return shape_; }
    const std::array<double, 3>& origin() const { return origin_; }
    const std::array<double, 3>& spacing() const { return spacing_; }
    std::size_t node_count() const {
        std::size_t n = 1;
        for (int a = 0; a < dim_; ++a) n *= shape_[static_cast<std::size_t>(a)];
        return n;
    }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    std::size_t size(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
    double step(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    double max_spacing() const {
        double h = 0.0;
        for (int a = 0; a < dim_; ++a) h = std::max(h, step(a));
        return h;
    }

    std::size_t flat(std::size_t i, std::size_t j = 0, std::size_t k = 0) const {
        return (i * shape_[1] + j) * shape_[2] + k;
    }
    std::array<std::size_t, 3> unflat(std::size_t f) const {
        std::array<std::size_t, 3> idx{};
        idx[2] = f % shape_[2];
        f /= shape_[2];
        idx[1] = f % shape_[1];
        idx[0] = f / shape_[1];
        return idx;
    }

    double& at(std::size_t node, int comp) { return values_[node * static_cast<std::size_t>(components_) + static_cast<std::size_t>(comp)]; }
    double at(std::size_t node, int comp) const { return values_[node * static_cast<std::size_t>(components_) + static_cast<std::size_t>(comp)]; }

    double coord(int axis, std::size_t index) const {
        return origin_[static_cast<std::size_t>(axis)] + spacing_[static_cast<std::size_t>(axis)] * static_cast<double>(index);
    }
    std::array<double, 3> point(std::size_t node) const {
        auto idx = unflat(node);
        return {coord(0, idx[0]), coord(1, idx[1]), coord(2, idx[2])};
    }

    // stride of one step along `axis` in node numbering
    std::size_t stride(int axis) const {
        std::size_t s = 1;
        for (int a = axis + 1; a < 3; ++a) s *= shape_[static_cast<std::size_t>(a)];
        return s;
    }

    bool same_layout(const GridField& o) const {
        return dim_ == o.dim_ && shape_ == o.shape_ && components_ == o.components_;
    }
    bool same_grid(const GridField& o) const {
        return dim_ == o.dim_ && shape_ == o.shape_ && origin_ == o.origin_ && spacing_ == o.spacing_;
    }

    GridField like(int components) const {
        return GridField(dim_, shape_, origin_, spacing_, components);
    }

    bool is_interior(std::size_t node, int margin) const {
        auto idx = unflat(node);
        for (int a = 0; a < dim_; ++a) {
            std::size_t n = shape_[static_cast<std::size_t>(a)];
            if (idx[static_cast<std::size_t>(a)] < static_cast<std::size_t>(margin)) return false;
            if (idx[static_cast<std::size_t>(a)] + static_cast<std::size_t>(margin) >= n) return false;
        }
        return true;
    }

    std::complex<double> cplx(std::size_t node, int comp) const {
        return {at(node, 2 * comp), at(node, 2 * comp + 1)};
    }
    void set_cplx(std::size_t node, int comp, std::complex<double> v) {
        at(node, 2 * comp) = v.real();
        at(node, 2 * comp + 1) = v.imag();
    }

private:
    int dim_ = 0;
    std::array<std::size_t, 3> shape_{1, 1, 1};
    std::array<double, 3> origin_{0.0, 0.0, 0.0};
    std::array<double, 3> spacing_{1.0, 1.0, 1.0};
    int components_ = 0;
    std::vector<double> values_;
};

/// First derivative along `axis`: second-order central stencil in the
/// interior, one-sided three-point second-order stencils at the two boundary
/// layers. No ghost nodes, no boundary-condition assumptions.
GridField derivative(const GridField& f, int axis);

/// Compact second derivative along one axis: (1,-2,1)/h^2 in the interior,
/// four-point one-sided stencils at the boundary. Mixed second derivatives
/// should be taken as derivative(derivative(f, a), b).
GridField second_derivative_same_axis(const GridField& f, int axis);

/// Discrete exterior derivative of a k-form field (components in
/// lexicographic multi-index order) into a (k+1)-form field.
GridField exterior_derivative_grid(const GridField& f, int degree);

/// Wirtinger derivatives of a complex field on a 2D grid (z = x + iy):
/// d/dz = (d/dx - i d/dy)/2 and d/dzbar = (d/dx + i d/dy)/2.
std::pair<GridField, GridField> wirtinger(const GridField& f);

/// Drop `layers` nodes from every face (all axes); origin shifts accordingly.
GridField trim(const GridField& f, int layers);

struct SupNorm {
    double value = 0.0;
    std::size_t node = 0;
};

/// Sup over nodes at distance >= margin from every boundary of the euclidean
/// norm across the selected component range [c0, c1).
SupNorm sup_norm(const GridField& f, int margin = 0, int c0 = 0, int c1 = -1);

std::string format_node(const GridField& f, std::size_t node);

}  // namespace g2sf
