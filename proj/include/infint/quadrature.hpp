#pragma once

#include <string>
#include <vector>

#include "infint/coordinate_set.hpp"

namespace infint {

// One evaluation f(t_v; c): coordinates t[k] belong to support[k], all others sit at the anchor.
struct QuadratureNode {
    CoordinateSet support;
    std::vector<double> t;
    double a = 0.0;
};

struct Quadrature {
    std::vector<QuadratureNode> nodes;

    std::size_t size() const noexcept { return nodes.size(); }
    double coefficient_sum() const;
    // Union of all node supports.
    CoordinateSet support_union() const;
    // Throws AnchorCollision if any coordinate equals c.
    void check_admissible(double c) const;

    // "v: j1 ... jk | t1 ... tk | a" per line
    std::string serialize() const;
    static Quadrature parse(const std::string& text);
};

}  // namespace infint
