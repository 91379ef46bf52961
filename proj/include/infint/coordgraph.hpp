#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infint/coordinate_set.hpp"
#include "infint/weights.hpp"

namespace infint {

struct SetSystem {
    std::vector<CoordinateSet> sets;

    // Nonempty sets with positive weight of an explicit family.
    static SetSystem from_weights(const WeightFamily& family);
    // Weights file format; the weight column is ignored.
    static SetSystem parse(const std::string& text);
};

class CoordGraph {
public:
    const std::vector<std::uint32_t>& vertices() const noexcept { return vertices_; }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    std::size_t edge_count() const;
    std::size_t degree(std::size_t index) const { return adj_[index].size(); }
    std::size_t max_degree() const;
    // Neighbour indices, ascending.
    const std::vector<std::size_t>& neighbours(std::size_t index) const { return adj_[index]; }
    bool has_edge(std::uint32_t i, std::uint32_t j) const;
    std::ptrdiff_t index_of(std::uint32_t coordinate) const;

    friend CoordGraph build_graph(const SetSystem& system);

private:
    std::vector<std::uint32_t> vertices_;
    std::vector<std::vector<std::size_t>> adj_;
};

CoordGraph build_graph(const SetSystem& system);

struct Coloring {
    std::map<std::uint32_t, unsigned> color;  // coordinate -> colour in [0, num_colors)
    unsigned num_colors = 0;

    bool proper_for(const SetSystem& system) const;
};

enum class VertexOrder { Ascending, SmallestLast };

Coloring greedy_coloring(const CoordGraph& graph, VertexOrder order = VertexOrder::Ascending);
// Order given as coordinates; must list every vertex once.
Coloring greedy_coloring(const CoordGraph& graph, const std::vector<std::uint32_t>& order);

// Exact chromatic number; throws TooLarge above `limit` vertices.
unsigned chromatic_exact(const CoordGraph& graph, std::size_t limit = 24);

// max_i |union of sets containing i|
std::size_t degree_bound(const SetSystem& system);
// degree_bound - 1 when no maximal closed neighbourhood is complete; requires some |u| >= 3.
std::optional<std::size_t> brooks_bound(const SetSystem& system);
// max |u|
std::size_t clique_lower_bound(const SetSystem& system);

}  // namespace infint
