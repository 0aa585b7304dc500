#include "core/metric_ops.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace g2sf {

Eigen::MatrixXd sym_unpack(const GridField& g, std::size_t node, int d) {
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double v = g.at(node, sym_index(d, i, j));
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

void sym_pack(GridField& g, std::size_t node, const Eigen::MatrixXd& m) {
    int d = static_cast<int>(m.rows());
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) g.at(node, sym_index(d, i, j)) = m(i, j);
}

GridField christoffel_field(const GridField& metric) {
    const int d = metric.dim();
    require(metric.components() == sym_count(d), ErrorKind::invalid_argument,
            "christoffel_field: metric must have d(d+1)/2 components");
    std::vector<GridField> dg;
    dg.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) dg.push_back(derivative(metric, a));

    GridField out = metric.like(d * sym_count(d));
    parallel_for(metric.node_count(), [&](std::size_t node) {
        Eigen::MatrixXd g = sym_unpack(metric, node, d);
        double det = g.determinant();
        if (std::abs(det) < 1e-12)
            fail_numeric("christoffel_field: singular metric at node " + format_node(metric, node) +
                         " (det = " + std::to_string(det) + ")");
        Eigen::MatrixXd ginv = g.inverse();
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    double acc = 0.0;
                    for (int s = 0; s < d; ++s) {
                        double t = dg[static_cast<std::size_t>(i)].at(node, sym_index(d, j, s)) +
                                   dg[static_cast<std::size_t>(j)].at(node, sym_index(d, i, s)) -
                                   dg[static_cast<std::size_t>(s)].at(node, sym_index(d, i, j));
                        acc += ginv(k, s) * t;
                    }
                    out.at(node, k * sym_count(d) + sym_index(d, i, j)) = 0.5 * acc;
                }
    });
    return out;
}

GridField inverse_metric_field(const GridField& metric, double min_abs_det) {
    const int d = metric.dim();
    require(metric.components() == sym_count(d), ErrorKind::invalid_argument,
            "inverse_metric_field: metric must have d(d+1)/2 components");
    GridField out = metric.like(sym_count(d));
    parallel_for(metric.node_count(), [&](std::size_t node) {
        Eigen::MatrixXd g = sym_unpack(metric, node, d);
        double det = g.determinant();
        if (std::abs(det) < min_abs_det)
            fail_numeric("inverse_metric_field: singular metric at node " + format_node(metric, node));
        Eigen::MatrixXd ginv = g.inverse();
        sym_pack(out, node, ginv);
    });
    return out;
}

}  // namespace g2sf
