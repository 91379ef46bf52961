#include "infint/coordgraph.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "infint/error.hpp"

namespace infint {

SetSystem SetSystem::from_weights(const WeightFamily& family) {
    if (family.kind() != WeightKind::Explicit)
        throw Error(ErrorKind::InvalidParameters, "set systems come from explicit families");
    SetSystem s;
    for (const auto& [u, g] : family.entries())
        if (!u.empty() && g > 0.0) s.sets.push_back(u);
    return s;
}

SetSystem SetSystem::parse(const std::string& text) {
    SetSystem s;
    const WeightFamily family = parse_explicit_weights(text);
    for (const auto& [u, g] : family.entries())
        if (!u.empty()) s.sets.push_back(u);
    return s;
}

CoordGraph build_graph(const SetSystem& system) {
    CoordGraph g;
    std::set<CoordinateSet> unique(system.sets.begin(), system.sets.end());
    std::set<std::uint32_t> verts;
    for (const auto& u : unique) verts.insert(u.begin(), u.end());
    g.vertices_.assign(verts.begin(), verts.end());
    std::vector<std::set<std::size_t>> adj(g.vertices_.size());
    for (const auto& u : unique)
        for (std::size_t a = 0; a < u.size(); ++a)
            for (std::size_t b = a + 1; b < u.size(); ++b) {
                const auto ia = static_cast<std::size_t>(g.index_of(u[a]));
                const auto ib = static_cast<std::size_t>(g.index_of(u[b]));
                adj[ia].insert(ib);
                adj[ib].insert(ia);
            }
    for (auto& a : adj) g.adj_.emplace_back(a.begin(), a.end());
    return g;
}

std::ptrdiff_t CoordGraph::index_of(std::uint32_t coordinate) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), coordinate);
    return (it != vertices_.end() && *it == coordinate) ? it - vertices_.begin() : -1;
}

std::size_t CoordGraph::edge_count() const {
    std::size_t s = 0;
    for (const auto& a : adj_) s += a.size();
    return s / 2;
}

std::size_t CoordGraph::max_degree() const {
    std::size_t d = 0;
    for (const auto& a : adj_) d = std::max(d, a.size());
    return d;
}

bool CoordGraph::has_edge(std::uint32_t i, std::uint32_t j) const {
    const auto a = index_of(i), b = index_of(j);
    if (a < 0 || b < 0) return false;
    const auto& n = adj_[static_cast<std::size_t>(a)];
    return std::binary_search(n.begin(), n.end(), static_cast<std::size_t>(b));
}

bool Coloring::proper_for(const SetSystem& system) const {
    for (const auto& u : system.sets) {
        std::set<unsigned> seen;
        for (auto j : u) {
            auto it = color.find(j);
            if (it == color.end() || !seen.insert(it->second).second) return false;
        }
    }
    return true;
}

Coloring greedy_coloring(const CoordGraph& graph, const std::vector<std::uint32_t>& order) {
    const std::size_t n = graph.vertex_count();
    if (order.size() != n) throw Error(ErrorKind::InvalidParameters, "order must list every vertex");
    std::vector<int> col(n, -1);
    Coloring out;
    std::vector<char> used;
    for (auto v : order) {
        const auto i = graph.index_of(v);
        if (i < 0 || col[i] >= 0) throw Error(ErrorKind::InvalidParameters, "order must list every vertex once");
        used.assign(graph.degree(i) + 1, 0);
        for (auto nb : graph.neighbours(i))
            if (col[nb] >= 0 && static_cast<std::size_t>(col[nb]) < used.size()) used[col[nb]] = 1;
        unsigned c = 0;
        while (used[c]) ++c;
        col[i] = static_cast<int>(c);
        out.color[v] = c;
        out.num_colors = std::max(out.num_colors, c + 1);
    }
    return out;
}

Coloring greedy_coloring(const CoordGraph& graph, VertexOrder order) {
    std::vector<std::uint32_t> seq = graph.vertices();
    if (order == VertexOrder::SmallestLast) {
        // repeatedly remove a minimum-degree vertex, colour in reverse removal order
        const std::size_t n = graph.vertex_count();
        std::vector<std::size_t> deg(n);
        std::vector<char> gone(n, 0);
        for (std::size_t i = 0; i < n; ++i) deg[i] = graph.degree(i);
        std::vector<std::uint32_t> removed;
        for (std::size_t step = 0; step < n; ++step) {
            std::size_t best = n;
            for (std::size_t i = 0; i < n; ++i)
                if (!gone[i] && (best == n || deg[i] < deg[best])) best = i;
            gone[best] = 1;
            removed.push_back(graph.vertices()[best]);
            for (auto nb : graph.neighbours(best))
                if (!gone[nb]) --deg[nb];
        }
        seq.assign(removed.rbegin(), removed.rend());
    }
    return greedy_coloring(graph, seq);
}

namespace {

// Greedy clique in degree order, used as the starting lower bound.
std::size_t greedy_clique(const CoordGraph& g) {
    std::size_t best = g.vertex_count() ? 1 : 0;
    for (std::size_t start = 0; start < g.vertex_count(); ++start) {
        std::vector<std::size_t> clique{start};
        std::vector<std::size_t> cand = g.neighbours(start);
        std::sort(cand.begin(), cand.end(), [&](auto a, auto b) { return g.degree(a) > g.degree(b); });
        for (auto v : cand) {
            bool ok = true;
            for (auto w : clique) {
                const auto& n = g.neighbours(w);
                ok = ok && std::binary_search(n.begin(), n.end(), v);
            }
            if (ok) clique.push_back(v);
        }
        best = std::max(best, clique.size());
    }
    return best;
}

bool colorable(const CoordGraph& g, unsigned k) {
    const std::size_t n = g.vertex_count();
    std::vector<int> col(n, -1);
    // DSATUR-style choice: most constrained uncoloured vertex next
    std::function<bool(std::size_t)> rec = [&](std::size_t done) -> bool {
        if (done == n) return true;
        std::size_t pick = n;
        int best_sat = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (col[i] >= 0) continue;
            unsigned mask = 0;
            for (auto nb : g.neighbours(i))
                if (col[nb] >= 0) mask |= 1u << col[nb];
            const int sat = __builtin_popcount(mask);
            if (sat > best_sat || (sat == best_sat && g.degree(i) > g.degree(pick))) {
                best_sat = sat;
                pick = i;
            }
        }
        unsigned mask = 0;
        for (auto nb : g.neighbours(pick))
            if (col[nb] >= 0) mask |= 1u << col[nb];
        int max_used = -1;
        for (std::size_t i = 0; i < n; ++i) max_used = std::max(max_used, col[i]);
        // colours beyond the first unused one are symmetric
        const unsigned limit = std::min<unsigned>(k, static_cast<unsigned>(max_used + 2));
        for (unsigned c = 0; c < limit; ++c) {
            if (mask >> c & 1) continue;
            col[pick] = static_cast<int>(c);
            if (rec(done + 1)) return true;
        }
        col[pick] = -1;
        return false;
    };
    return rec(0);
}

}  // namespace

unsigned chromatic_exact(const CoordGraph& graph, std::size_t limit) {
    if (graph.vertex_count() > limit)
        throw Error(ErrorKind::TooLarge, "graph has more vertices than the exact colouring budget");
    if (graph.vertex_count() == 0) return 0;
    const unsigned upper = std::min(greedy_coloring(graph).num_colors,
                                    greedy_coloring(graph, VertexOrder::SmallestLast).num_colors);
    for (unsigned k = static_cast<unsigned>(greedy_clique(graph)); k < upper; ++k)
        if (colorable(graph, k)) return k;
    return upper;
}

std::size_t degree_bound(const SetSystem& system) {
    std::map<std::uint32_t, std::set<std::uint32_t>> nbhd;
    for (const auto& u : system.sets)
        for (auto j : u) nbhd[j].insert(u.begin(), u.end());
    std::size_t best = 0;
    for (const auto& [j, s] : nbhd) best = std::max(best, s.size());
    return best;
}

std::optional<std::size_t> brooks_bound(const SetSystem& system) {
    if (clique_lower_bound(system) < 3) return std::nullopt;
    const CoordGraph g = build_graph(system);
    const std::size_t delta = g.max_degree();
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
        if (g.degree(i) != delta) continue;
        std::vector<std::size_t> closed = g.neighbours(i);
        closed.push_back(i);
        bool complete = true;
        for (std::size_t a = 0; a < closed.size() && complete; ++a)
            for (std::size_t b = a + 1; b < closed.size() && complete; ++b)
                complete = g.has_edge(g.vertices()[closed[a]], g.vertices()[closed[b]]);
        if (complete) return std::nullopt;
    }
    return delta;
}

std::size_t clique_lower_bound(const SetSystem& system) {
    std::size_t best = 0;
    for (const auto& u : system.sets) best = std::max(best, u.size());
    return best;
}

}  // namespace infint
