#include "openbook/discretization.hpp"

#include "openbook/error.hpp"
#include "openbook/format.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace openbook {

namespace {

using Triplet = Eigen::Triplet<double>;
using Local2 = std::array<std::array<double, 2>, 2>;

Local2 stiffness_1d(double h) { return {{{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}}}; }
Local2 mass_1d(double h) { return {{{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}}}; }

SparseMatrix from_triplets(int n, const std::vector<Triplet>& triplets)
{
    SparseMatrix m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t i)
    {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

int side_node_count(const PageGrid& grid, Side side) { return side_axis(side) == Axis::X ? grid.nx : grid.ny; }

} // namespace

int node_count(double length, double h)
{
    const double cells = length / h;
    const double snapped = std::ceil(cells - 1e-9 * std::max(1.0, cells));
    return std::max(2, static_cast<int>(snapped) + 1);
}

MeshPlan plan_mesh(const Book& book, double h, const std::map<std::string, int>& overrides)
{
    if (!(h > 0.0) || is_infinite(h)) throw ValidationError("plan_mesh: h must be positive and finite");
    if (!book.is_compact()) throw ValidationError("plan_mesh: book is not compact; truncate it first");
    require_valid(book);

    MeshPlan plan;
    plan.h = h;
    for (const auto& b : book.bindings) {
        auto it = overrides.find(b.id);
        if (it != overrides.end() && it->second < 2) {
            throw ValidationError("plan_mesh: binding '" + b.id + "' needs at least 2 nodes");
        }
        plan.binding_nodes[b.id] = it != overrides.end() ? it->second : node_count(b.length, h);
    }
    // A page glued to itself across opposite sides needs an interior node
    // line, otherwise the identification collapses its cells.
    for (const auto& page : book.pages) {
        for (auto [a, b, across] : {std::tuple{Side::West, Side::East, Side::South},
                                    std::tuple{Side::South, Side::North, Side::West}}) {
            const Attachment* first = book.attachment_at(page.id, a);
            const Attachment* second = book.attachment_at(page.id, b);
            if (first == nullptr || second == nullptr || first->binding != second->binding) continue;
            for (Side s : {across, across == Side::South ? Side::North : Side::East}) {
                const Attachment* lateral = book.attachment_at(page.id, s);
                if (lateral != nullptr && !overrides.contains(lateral->binding)) {
                    auto& count = plan.binding_nodes[lateral->binding];
                    count = std::max(count, 3);
                }
            }
        }
    }

    for (const auto& page : book.pages) {
        auto count_for = [&](Side s) {
            const Attachment* a = book.attachment_at(page.id, s);
            return plan.binding_nodes.at(a->binding);
        };
        PageGrid grid;
        grid.nx = count_for(Side::South);
        grid.ny = count_for(Side::West);
        if (count_for(Side::North) != grid.nx || count_for(Side::East) != grid.ny) {
            throw ValidationError("plan_mesh: opposite sides of page '" + page.id + "' have different node counts");
        }
        grid.hx = page.lx / (grid.nx - 1);
        grid.hy = page.ly / (grid.ny - 1);
        plan.pages.push_back(grid);
    }
    return plan;
}

std::pair<int, int> side_node(const PageGrid& grid, Side side, int k) noexcept
{
    switch (side) {
    case Side::South: return {k, 0};
    case Side::North: return {k, grid.ny - 1};
    case Side::West: return {0, k};
    case Side::East: return {grid.nx - 1, k};
    }
    return {0, 0};
}

DofMap build_dofs(const Book& book, const MeshPlan& plan)
{
    if (plan.pages.size() != book.pages.size()) throw ValidationError("build_dofs: plan does not match book");

    std::vector<std::size_t> offset(book.pages.size() + 1, 0);
    for (std::size_t p = 0; p < book.pages.size(); ++p) {
        offset[p + 1] = offset[p] + static_cast<std::size_t>(plan.pages[p].nx) * plan.pages[p].ny;
    }
    UnionFind nodes(offset.back());

    std::map<std::string, std::vector<std::size_t>> binding_nodes;
    for (const auto& a : book.attachments) {
        const auto p = *book.page_index(a.page);
        const auto& grid = plan.pages[p];
        const int n = side_node_count(grid, a.side);
        if (plan.binding_nodes.at(a.binding) != n) {
            throw ValidationError("build_dofs: binding '" + a.binding + "' node count does not match page '" + a.page
                                  + "'");
        }
        auto [it, fresh] = binding_nodes.try_emplace(a.binding, static_cast<std::size_t>(n), SIZE_MAX);
        auto& along = it->second;
        for (int k = 0; k < n; ++k) {
            const auto [i, j] = side_node(grid, a.side, k);
            const std::size_t node = offset[p] + static_cast<std::size_t>(j * grid.nx + i);
            const auto position = static_cast<std::size_t>(a.orientation == Orientation::Forward ? k : n - 1 - k);
            if (along[position] == SIZE_MAX) {
                along[position] = node;
            } else {
                nodes.unite(along[position], node);
            }
        }
    }

    DofMap map;
    std::vector<int> id_of_root(offset.back(), -1);
    map.page_dofs.resize(book.pages.size());
    for (std::size_t p = 0; p < book.pages.size(); ++p) {
        auto& ids = map.page_dofs[p];
        ids.resize(offset[p + 1] - offset[p]);
        for (std::size_t local = 0; local < ids.size(); ++local) {
            const auto root = nodes.find(offset[p] + local);
            if (id_of_root[root] < 0) id_of_root[root] = map.dof_count++;
            ids[local] = id_of_root[root];
        }
    }

    for (std::size_t p = 0; p < book.pages.size(); ++p) {
        const auto& grid = plan.pages[p];
        for (int j = 0; j + 1 < grid.ny; ++j) {
            for (int i = 0; i + 1 < grid.nx; ++i) {
                const std::array<int, 4> corners{map.at(p, grid, i, j), map.at(p, grid, i + 1, j),
                                                 map.at(p, grid, i, j + 1), map.at(p, grid, i + 1, j + 1)};
                std::set<int> distinct(corners.begin(), corners.end());
                if (distinct.size() == 4) continue;
                std::string culprit;
                for (const auto& a : book.attachments) {
                    if (a.page == book.pages[p].id) {
                        culprit = a.binding;
                        if (a.orientation == Orientation::Reversed) break;
                    }
                }
                throw ValidationError("build_dofs: contradictory identification collapses a cell of page '"
                                      + book.pages[p].id + "' (binding '" + culprit + "')");
            }
        }
    }
    return map;
}

DiscreteOperators assemble_operators(const Book& book, const MeshPlan& plan, const DofMap& dofs, StiffnessSplit split)
{
    if (plan.pages.size() != book.pages.size() || dofs.page_dofs.size() != book.pages.size()) {
        throw ValidationError("assemble_operators: inputs do not match");
    }
    std::vector<Triplet> kx_t;
    std::vector<Triplet> ky_t;
    std::vector<Triplet> m_t;
    for (std::size_t p = 0; p < book.pages.size(); ++p) {
        const auto& grid = plan.pages[p];
        const Local2 kx = stiffness_1d(grid.hx);
        const Local2 mx = mass_1d(grid.hx);
        const Local2 ky = stiffness_1d(grid.hy);
        const Local2 my = mass_1d(grid.hy);
        for (int j = 0; j + 1 < grid.ny; ++j) {
            for (int i = 0; i + 1 < grid.nx; ++i) {
                std::array<int, 4> g{};
                for (int l = 0; l < 4; ++l) g[l] = dofs.at(p, grid, i + (l & 1), j + (l >> 1));
                for (int a = 0; a < 4; ++a) {
                    const int ax = a & 1;
                    const int ay = a >> 1;
                    for (int b = 0; b < 4; ++b) {
                        const int bx = b & 1;
                        const int by = b >> 1;
                        kx_t.emplace_back(g[a], g[b], kx[ax][bx] * my[ay][by]);
                        ky_t.emplace_back(g[a], g[b], mx[ax][bx] * ky[ay][by]);
                        m_t.emplace_back(g[a], g[b], mx[ax][bx] * my[ay][by]);
                    }
                }
            }
        }
    }
    DiscreteOperators ops;
    const int n = dofs.dof_count;
    SparseMatrix kxm = from_triplets(n, kx_t);
    SparseMatrix kym = from_triplets(n, ky_t);
    ops.stiffness = kxm + kym;
    ops.stiffness.makeCompressed();
    ops.mass = from_triplets(n, m_t);
    ops.lumped_mass = ops.mass * Vector::Ones(n);
    if (split == StiffnessSplit::Keep) {
        ops.stiffness_x = std::move(kxm);
        ops.stiffness_y = std::move(kym);
    }
    return ops;
}

BookMesh mesh_book(const Book& book, double h, const std::map<std::string, int>& overrides, StiffnessSplit split)
{
    BookMesh mesh;
    mesh.book = book;
    mesh.plan = plan_mesh(book, h, overrides);
    mesh.dofs = build_dofs(book, mesh.plan);
    mesh.ops = assemble_operators(book, mesh.plan, mesh.dofs, split);
    return mesh;
}

GraphDiscretization assemble_graph_operators(const GraphSpec& graph, double h)
{
    if (!(h > 0.0) || is_infinite(h)) throw ValidationError("assemble_graph_operators: h must be positive and finite");
    const auto report = validate_graph(graph);
    if (!report.ok()) throw ValidationError("invalid graph: " + report.summary());
    if (!graph.is_finite_length()) throw ValidationError("assemble_graph_operators: truncate infinite edges first");

    GraphDiscretization out;
    out.graph = graph;
    auto& mesh = out.mesh;
    std::set<std::string> used;
    for (const auto& e : graph.edges) {
        used.insert(e.from);
        used.insert(e.to);
    }
    mesh.vertex_dofs.assign(graph.vertices.size(), -1);
    for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
        if (used.contains(graph.vertices[v])) mesh.vertex_dofs[v] = mesh.dof_count++;
    }

    std::vector<Triplet> k_t;
    std::vector<Triplet> m_t;
    for (const auto& e : graph.edges) {
        int n = node_count(e.length, h);
        if (e.is_loop()) n = std::max(n, 3);
        const double he = e.length / (n - 1);
        std::vector<int> ids(static_cast<std::size_t>(n));
        ids.front() = mesh.vertex_dofs[*graph.vertex_index(e.from)];
        ids.back() = mesh.vertex_dofs[*graph.vertex_index(e.to)];
        for (int k = 1; k + 1 < n; ++k) ids[static_cast<std::size_t>(k)] = mesh.dof_count++;
        const Local2 ke = stiffness_1d(he);
        const Local2 me = mass_1d(he);
        for (int c = 0; c + 1 < n; ++c) {
            const std::array<int, 2> g{ids[static_cast<std::size_t>(c)], ids[static_cast<std::size_t>(c + 1)]};
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    k_t.emplace_back(g[a], g[b], ke[a][b]);
                    m_t.emplace_back(g[a], g[b], me[a][b]);
                }
            }
        }
        mesh.edge_nodes.push_back(n);
        mesh.edge_h.push_back(he);
        mesh.edge_dofs.push_back(std::move(ids));
    }
    out.ops.stiffness = from_triplets(mesh.dof_count, k_t);
    out.ops.mass = from_triplets(mesh.dof_count, m_t);
    out.ops.lumped_mass = out.ops.mass * Vector::Ones(mesh.dof_count);
    return out;
}

ProductMesh mesh_product(const GraphSpec& graph, double width, double h, int transverse_nodes)
{
    if (!graph.is_finite_length()) throw ValidationError("mesh_product: truncate infinite edges first");
    ProductMesh pm;
    pm.graph = assemble_graph_operators(graph, h);
    pm.transverse_width = width;
    const Book book = graph_based_book(graph, width);
    std::map<std::string, int> overrides;
    pm.transverse_nodes = transverse_nodes > 0 ? transverse_nodes : node_count(width, h);
    for (const auto& b : book.bindings) {
        if (b.id.starts_with("v:")) overrides[b.id] = pm.transverse_nodes;
    }
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const int n = pm.graph.mesh.edge_nodes[e];
        overrides[lateral_binding_id(graph.edges[e].id, Side::South)] = n;
        overrides[lateral_binding_id(graph.edges[e].id, Side::North)] = n;
    }
    pm.book = mesh_book(book, h, overrides, StiffnessSplit::Keep);

    const int ny = pm.transverse_nodes;
    const int n2 = pm.book.dofs.dof_count;
    if (n2 != pm.graph.mesh.dof_count * ny) throw ValidationError("mesh_product: mesh is not a product");
    pm.graph_dof.assign(static_cast<std::size_t>(n2), -1);
    pm.transverse_index.assign(static_cast<std::size_t>(n2), -1);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& grid = pm.book.plan.pages[e];
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                const auto d = static_cast<std::size_t>(pm.book.dofs.at(e, grid, i, j));
                const int x = pm.graph.mesh.edge_dofs[e][static_cast<std::size_t>(i)];
                if (pm.graph_dof[d] >= 0 && (pm.graph_dof[d] != x || pm.transverse_index[d] != j)) {
                    throw ValidationError("mesh_product: inconsistent product structure");
                }
                pm.graph_dof[d] = x;
                pm.transverse_index[d] = j;
            }
        }
    }
    const double hy = width / (ny - 1);
    pm.transverse_weights = Vector::Constant(ny, hy);
    pm.transverse_weights[0] = pm.transverse_weights[ny - 1] = 0.5 * hy;
    return pm;
}

Field lift_graph_field(const Field& graph_field, const ProductMesh& mesh)
{
    if (graph_field.size() != mesh.graph.mesh.dof_count) throw ValidationError("lift_graph_field: mesh mismatch");
    Field out{Vector(mesh.book.dofs.dof_count)};
    for (std::size_t d = 0; d < mesh.graph_dof.size(); ++d) {
        out.values[static_cast<Eigen::Index>(d)] = graph_field.values[mesh.graph_dof[d]];
    }
    return out;
}

Field average_transverse(const Field& field, const ProductMesh& mesh)
{
    if (field.size() != mesh.book.dofs.dof_count) throw ValidationError("average_transverse: field is not on this mesh");
    Vector avg = Vector::Zero(mesh.graph.mesh.dof_count);
    for (std::size_t d = 0; d < mesh.graph_dof.size(); ++d) {
        avg[mesh.graph_dof[d]] += mesh.transverse_weights[mesh.transverse_index[d]] * field.values[static_cast<Eigen::Index>(d)];
    }
    avg /= mesh.transverse_width;
    return lift_graph_field(Field{avg}, mesh);
}

Field resample_transverse(const Field& field, const ProductMesh& from, const ProductMesh& to)
{
    if (from.graph.mesh.dof_count != to.graph.mesh.dof_count || field.size() != from.book.dofs.dof_count) {
        throw ValidationError("resample_transverse: meshes do not share a graph discretization");
    }
    const int nx = from.graph.mesh.dof_count;
    const int ny_from = from.transverse_nodes;
    Eigen::MatrixXd profile(nx, ny_from);
    for (std::size_t d = 0; d < from.graph_dof.size(); ++d) {
        profile(from.graph_dof[d], from.transverse_index[d]) = field.values[static_cast<Eigen::Index>(d)];
    }
    Field out{Vector(to.book.dofs.dof_count)};
    const int ny_to = to.transverse_nodes;
    for (std::size_t d = 0; d < to.graph_dof.size(); ++d) {
        const double t = static_cast<double>(to.transverse_index[d]) / (ny_to - 1) * (ny_from - 1);
        const int j0 = std::min(static_cast<int>(std::floor(t)), ny_from - 2);
        const double w = t - j0;
        const int x = to.graph_dof[d];
        out.values[static_cast<Eigen::Index>(d)] = (1.0 - w) * profile(x, j0) + w * profile(x, j0 + 1);
    }
    return out;
}

double mass_norm_squared(const DiscreteOperators& ops, const Vector& u) { return u.dot(ops.mass * u); }

double lumped_power_sum(const DiscreteOperators& ops, const Vector& u, double q)
{
    double sum = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) sum += ops.lumped_mass[i] * std::pow(std::abs(u[i]), q);
    return sum;
}

std::string page_field_csv(const BookMesh& mesh, std::size_t page, const Vector& u)
{
    const auto& grid = mesh.plan.pages.at(page);
    std::ostringstream out;
    out << "page_id,nx,ny,hx,hy\n";
    out << mesh.book.pages[page].id << ',' << grid.nx << ',' << grid.ny << ',' << format_double(grid.hx) << ','
        << format_double(grid.hy) << '\n';
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            if (i > 0) out << ',';
            out << format_double(u[mesh.dofs.at(page, grid, i, j)]);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace openbook
