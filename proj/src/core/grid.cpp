#include "core/grid.hpp"

#include <cmath>
#include <sstream>

#include "core/parallel.hpp"

namespace g2sf {

namespace {

// Apply a 1D stencil operator along `axis` to every component.
// weights: central (i-1, i, i+1), left edge (0,1,2), right edge (n-3,n-2,n-1).
template <typename EdgeL, typename Center, typename EdgeR>
GridField apply_axis(const GridField& f, int axis, EdgeL left, Center center, EdgeR right) {
    GridField out = f.like(f.components());
    const std::size_t n = f.size(axis);
    const std::size_t s = f.stride(axis);
    const int c = f.components();
    const std::size_t nodes = f.node_count();
    parallel_for(nodes, [&](std::size_t node) {
        auto idx = f.unflat(node);
        std::size_t i = idx[static_cast<std::size_t>(axis)];
        for (int m = 0; m < c; ++m) {
            double v;
            if (i == 0)
                v = left(f, node, m, s);
            else if (i + 1 == n)
                v = right(f, node, m, s);
            else
                v = center(f, node, m, s);
            out.at(node, m) = v;
        }
    });
    return out;
}

}  // namespace

GridField derivative(const GridField& f, int axis) {
    require(axis >= 0 && axis < f.dim(), ErrorKind::invalid_argument, "derivative: axis out of range");
    require(f.size(axis) >= 3, ErrorKind::invalid_argument,
            "derivative: fewer than 3 nodes along the differentiated axis");
    const double h = f.step(axis);
    return apply_axis(
        f, axis,
        [h](const GridField& g, std::size_t p, int m, std::size_t s) {
            return (-3.0 * g.at(p, m) + 4.0 * g.at(p + s, m) - g.at(p + 2 * s, m)) / (2.0 * h);
        },
        [h](const GridField& g, std::size_t p, int m, std::size_t s) {
            return (g.at(p + s, m) - g.at(p - s, m)) / (2.0 * h);
        },
        [h](const GridField& g, std::size_t p, int m, std::size_t s) {
            return (3.0 * g.at(p, m) - 4.0 * g.at(p - s, m) + g.at(p - 2 * s, m)) / (2.0 * h);
        });
}

GridField second_derivative_same_axis(const GridField& f, int axis) {
    require(axis >= 0 && axis < f.dim(), ErrorKind::invalid_argument,
            "second_derivative: axis out of range");
    require(f.size(axis) >= 4, ErrorKind::invalid_argument,
            "second_derivative: fewer than 4 nodes along the differentiated axis");
    const double h2 = f.step(axis) * f.step(axis);
    return apply_axis(
        f, axis,
        [h2](const GridField& g, std::size_t p, int m, std::size_t s) {
            return (2.0 * g.at(p, m) - 5.0 * g.at(p + s, m) + 4.0 * g.at(p + 2 * s, m) - g.at(p + 3 * s, m)) / h2;
        },
        [h2](const GridField& g, std::size_t p, int m, std::size_t s) {
            return (g.at(p + s, m) - 2.0 * g.at(p, m) + g.at(p - s, m)) / h2;
        },
        [h2](const GridField& g, std::size_t p, int m, std::size_t s) {
            return (2.0 * g.at(p, m) - 5.0 * g.at(p - s, m) + 4.0 * g.at(p - 2 * s, m) - g.at(p - 3 * s, m)) / h2;
        });
}

GridField exterior_derivative_grid(const GridField& f, int degree) {
    const int d = f.dim();
    require(degree >= 0 && degree < d, ErrorKind::invalid_argument,
            "exterior_derivative_grid: need grid dimension >= k+1");
    auto in_idx = increasing_subsets(d, degree);
    auto out_idx = increasing_subsets(d, degree + 1);
    require(static_cast<int>(in_idx.size()) == f.components(), ErrorKind::invalid_argument,
            "exterior_derivative_grid: component count does not match a k-form field");

    // cache the first derivative of every component along every axis
    std::vector<GridField> df;
    df.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) df.push_back(derivative(f, a));

    GridField out = f.like(static_cast<int>(out_idx.size()));
    const std::size_t nodes = f.node_count();
    parallel_for(nodes, [&](std::size_t node) {
        for (std::size_t oc = 0; oc < out_idx.size(); ++oc) {
            Mask J = out_idx[oc];
            double acc = 0.0;
            for (int axis = 0; axis < d; ++axis) {
                if (!mask_contains(J, axis)) continue;
                Mask I = J & ~(Mask(1) << axis);
                // position of `axis` inside J gives the sign
                int sgn = removal_sign(J, axis);
                // locate component index of I in lexicographic order
                std::size_t ic = 0;
                while (in_idx[ic] != I) ++ic;
                acc += sgn * df[static_cast<std::size_t>(axis)].at(node, static_cast<int>(ic));
            }
            out.at(node, static_cast<int>(oc)) = acc;
        }
    });
    return out;
}

std::pair<GridField, GridField> wirtinger(const GridField& f) {
    require(f.dim() == 2, ErrorKind::invalid_argument, "wirtinger: needs a 2D grid");
    require(f.components() % 2 == 0, ErrorKind::invalid_argument,
            "wirtinger: complex fields are stored as (re, im) pairs");
    GridField fx = derivative(f, 0);
    GridField fy = derivative(f, 1);
    GridField dz = f.like(f.components());
    GridField dzb = f.like(f.components());
    const int cc = f.components() / 2;
    parallel_for(f.node_count(), [&](std::size_t node) {
        for (int m = 0; m < cc; ++m) {
            double rx = fx.at(node, 2 * m), ix = fx.at(node, 2 * m + 1);
            double ry = fy.at(node, 2 * m), iy = fy.at(node, 2 * m + 1);
            // dz = (dx - i dy)/2, dzbar = (dx + i dy)/2
            dz.at(node, 2 * m) = 0.5 * (rx + iy);
            dz.at(node, 2 * m + 1) = 0.5 * (ix - ry);
            dzb.at(node, 2 * m) = 0.5 * (rx - iy);
            dzb.at(node, 2 * m + 1) = 0.5 * (ix + ry);
        }
    });
    return {std::move(dz), std::move(dzb)};
}

GridField trim(const GridField& f, int layers) {
    require(layers >= 0, ErrorKind::invalid_argument, "trim: negative layer count");
    if (layers == 0) return f;
    std::array<std::size_t, 3> shape = f.shape();
    std::array<double, 3> origin = f.origin();
    for (int a = 0; a < f.dim(); ++a) {
        require(shape[static_cast<std::size_t>(a)] >= static_cast<std::size_t>(2 * layers + 3),
                ErrorKind::invalid_argument, "trim: grid too small to trim");
        shape[static_cast<std::size_t>(a)] -= static_cast<std::size_t>(2 * layers);
        origin[static_cast<std::size_t>(a)] += layers * f.step(a);
    }
    GridField out(f.dim(), shape, origin, f.spacing(), f.components());
    parallel_for(out.node_count(), [&](std::size_t node) {
        auto idx = out.unflat(node);
        std::size_t src = f.flat(idx[0] + static_cast<std::size_t>(f.dim() > 0 ? layers : 0),
                                 idx[1] + static_cast<std::size_t>(f.dim() > 1 ? layers : 0),
                                 idx[2] + static_cast<std::size_t>(f.dim() > 2 ? layers : 0));
        for (int c = 0; c < f.components(); ++c) out.at(node, c) = f.at(src, c);
    });
    return out;
}

SupNorm sup_norm(const GridField& f, int margin, int c0, int c1) {
    if (c1 < 0) c1 = f.components();
    auto m = parallel_max(f.node_count(), [&](std::size_t node) -> double {
        if (margin > 0 && !f.is_interior(node, margin)) return -1.0;
        double acc = 0.0;
        for (int c = c0; c < c1; ++c) acc += f.at(node, c) * f.at(node, c);
        return std::sqrt(acc);
    });
    SupNorm out;
    out.value = m.seen ? std::max(m.value, 0.0) : 0.0;
    out.node = m.index;
    return out;
}

std::string format_node(const GridField& f, std::size_t node) {
    auto idx = f.unflat(node);
    std::ostringstream os;
    os << "(";
    for (int a = 0; a < f.dim(); ++a) {
        if (a) os << ",";
        os << idx[static_cast<std::size_t>(a)];
    }
    os << ")";
    return os.str();
}

}  // namespace g2sf
