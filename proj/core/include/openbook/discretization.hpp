#pragma once

// Conforming bilinear finite elements on books and piecewise-linear elements
// on metric graphs. Degrees of freedom on a binding are shared by all incident
// pages, so the assembled quadratic form acts on functions whose traces agree
// and the Kirchhoff flux balance holds weakly without being imposed.

#include "openbook/topology.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace openbook {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

struct PageGrid {
    int nx = 0;
    int ny = 0;
    double hx = 0.0;
    double hy = 0.0;
};

struct MeshPlan {
    double h = 0.0;
    std::map<std::string, int> binding_nodes;
    /// Same order as Book::pages.
    std::vector<PageGrid> pages;
};

/// Nodes needed to cover `length` with spacing at most h (never fewer than 2).
[[nodiscard]] int node_count(double length, double h);

/// Node counts follow node_count() per binding unless overridden by id.
[[nodiscard]] MeshPlan plan_mesh(const Book& book, double h, const std::map<std::string, int>& overrides = {});

struct DofMap {
    int dof_count = 0;
    /// Per page, nx*ny global ids in row-major order: index j*nx + i for node (i, j).
    std::vector<std::vector<int>> page_dofs;

    [[nodiscard]] int at(std::size_t page, const PageGrid& grid, int i, int j) const
    {
        return page_dofs[page][static_cast<std::size_t>(j * grid.nx + i)];
    }
};

/// Node k (0-based, along the side's own parametrization) of a page side.
[[nodiscard]] std::pair<int, int> side_node(const PageGrid& grid, Side side, int k) noexcept;

[[nodiscard]] DofMap build_dofs(const Book& book, const MeshPlan& plan);

struct DiscreteOperators {
    SparseMatrix stiffness;
    SparseMatrix mass;
    Vector lumped_mass;
    /// Page-local x/y split of the stiffness, present for product meshes.
    std::optional<SparseMatrix> stiffness_x;
    std::optional<SparseMatrix> stiffness_y;

    [[nodiscard]] int dof_count() const noexcept { return static_cast<int>(lumped_mass.size()); }
    [[nodiscard]] bool has_split() const noexcept { return stiffness_x.has_value() && stiffness_y.has_value(); }
};

enum class StiffnessSplit { Drop, Keep };

[[nodiscard]] DiscreteOperators assemble_operators(const Book& book, const MeshPlan& plan, const DofMap& dofs,
                                                   StiffnessSplit split = StiffnessSplit::Drop);

/// A compact book together with its mesh and operators.
struct BookMesh {
    Book book;
    MeshPlan plan;
    DofMap dofs;
    DiscreteOperators ops;
};

[[nodiscard]] BookMesh mesh_book(const Book& book, double h, const std::map<std::string, int>& overrides = {},
                                 StiffnessSplit split = StiffnessSplit::Drop);

// ---------------------------------------------------------------------------
// Metric graphs

struct GraphMesh {
    /// Per edge, node count and spacing; node 0 sits at `from`.
    std::vector<int> edge_nodes;
    std::vector<double> edge_h;
    /// Per edge, global ids of its nodes.
    std::vector<std::vector<int>> edge_dofs;
    /// Global id of each vertex (same order as GraphSpec::vertices), -1 if isolated.
    std::vector<int> vertex_dofs;
    int dof_count = 0;
};

struct GraphDiscretization {
    GraphSpec graph;
    GraphMesh mesh;
    DiscreteOperators ops;
};

/// Piecewise-linear elements; vertex values shared across incident edges.
/// Loops get at least three nodes so that the loop is not collapsed.
[[nodiscard]] GraphDiscretization assemble_graph_operators(const GraphSpec& graph, double h);

// ---------------------------------------------------------------------------
// Product meshes graph x [0, 1]

struct ProductMesh {
    GraphDiscretization graph;
    BookMesh book;
    int transverse_nodes = 0;
    /// Per 2D dof, its graph dof and transverse node index.
    std::vector<int> graph_dof;
    std::vector<int> transverse_index;
    /// Transverse lumped weights (sum to the transverse width).
    Vector transverse_weights;
    double transverse_width = 1.0;
};

/// Meshes graph x [0, width]; the transverse direction gets `transverse_nodes`
/// nodes (0 means node_count(width, h)). The graph must have finite edges.
[[nodiscard]] ProductMesh mesh_product(const GraphSpec& graph, double width, double h, int transverse_nodes = 0);

struct Field {
    Vector values;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(values.size()); }
};

[[nodiscard]] Field lift_graph_field(const Field& graph_field, const ProductMesh& mesh);

/// Transverse average with the transverse lumped weights; y-constant output.
[[nodiscard]] Field average_transverse(const Field& field, const ProductMesh& mesh);

/// Transverse profile of a product field evaluated on another transverse grid
/// (linear interpolation); used to warm-start across meshes.
[[nodiscard]] Field resample_transverse(const Field& field, const ProductMesh& from, const ProductMesh& to);

// Norms used throughout: ||u||_2^2 = u^T M u (consistent mass), ||u||_q^q =
// sum_i m_i |u_i|^q (lumped).
[[nodiscard]] double mass_norm_squared(const DiscreteOperators& ops, const Vector& u);
[[nodiscard]] double lumped_power_sum(const DiscreteOperators& ops, const Vector& u, double q);

/// Field dump: one CSV per page, header "page_id,nx,ny,hx,hy", then the header
/// values, then ny rows of nx values.
[[nodiscard]] std::string page_field_csv(const BookMesh& mesh, std::size_t page, const Vector& u);

} // namespace openbook
