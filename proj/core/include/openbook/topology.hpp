#pragma once

// Open books: rectangular pages glued along one-dimensional bindings.
//
// Page coordinates are (x, y) in [0, lx] x [0, ly]. The four sides are
//   South  y = 0,  length lx, parametrized by x
//   North  y = ly, length lx, parametrized by x   (exists iff ly is finite)
//   West   x = 0,  length ly, parametrized by y
//   East   x = lx, length ly, parametrized by y   (exists iff lx is finite)
// A side of infinite length is glued to a binding of infinite length; a side
// "at infinity" does not exist and carries no binding.

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace openbook {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

[[nodiscard]] inline bool is_infinite(double length) noexcept { return length == kInfinity; }

enum class Side { South, North, West, East };
enum class Orientation { Forward, Reversed };
enum class Axis { X, Y };

[[nodiscard]] std::string_view to_string(Side side) noexcept;
[[nodiscard]] std::string_view to_string(Orientation orientation) noexcept;
[[nodiscard]] std::string_view to_string(Axis axis) noexcept;
[[nodiscard]] std::optional<Side> parse_side(std::string_view text) noexcept;
[[nodiscard]] std::optional<Orientation> parse_orientation(std::string_view text) noexcept;

/// Axis along which a side runs (South/North run along x).
[[nodiscard]] Axis side_axis(Side side) noexcept;
[[nodiscard]] bool are_consecutive(Side a, Side b) noexcept;

struct Binding {
    std::string id;
    double length = 1.0;

    friend bool operator==(const Binding&, const Binding&) = default;
};

struct Page {
    std::string id;
    double lx = 1.0;
    double ly = 1.0;

    [[nodiscard]] double side_length(Side side) const noexcept;
    [[nodiscard]] bool has_side(Side side) const noexcept;
    [[nodiscard]] bool is_compact() const noexcept { return !is_infinite(lx) && !is_infinite(ly); }

    friend bool operator==(const Page&, const Page&) = default;
};

struct Attachment {
    std::string page;
    Side side = Side::South;
    std::string binding;
    Orientation orientation = Orientation::Forward;

    friend bool operator==(const Attachment&, const Attachment&) = default;
};

/// Record left by truncate_book on a page whose `axis` used to be infinite.
/// The finite end of that axis sits at coordinate 0.
struct Truncation {
    std::string page;
    Axis axis = Axis::X;
    double length = 0.0;

    friend bool operator==(const Truncation&, const Truncation&) = default;
};

struct Book {
    std::vector<Page> pages;
    std::vector<Binding> bindings;
    std::vector<Attachment> attachments;
    std::vector<Truncation> truncations;

    [[nodiscard]] const Page* find_page(std::string_view id) const noexcept;
    [[nodiscard]] const Binding* find_binding(std::string_view id) const noexcept;
    [[nodiscard]] std::optional<std::size_t> page_index(std::string_view id) const noexcept;
    [[nodiscard]] std::optional<std::size_t> binding_index(std::string_view id) const noexcept;
    [[nodiscard]] const Attachment* attachment_at(std::string_view page, Side side) const noexcept;
    [[nodiscard]] bool empty() const noexcept { return pages.empty(); }
    /// Finite and every binding of finite length.
    [[nodiscard]] bool is_compact() const noexcept;

    friend bool operator==(const Book&, const Book&) = default;
};

struct GraphEdge {
    std::string id;
    std::string from;
    /// Empty for a half-line edge (length must then be infinite).
    std::string to;
    double length = 1.0;

    [[nodiscard]] bool is_loop() const noexcept { return !to.empty() && from == to; }
    [[nodiscard]] bool is_half_line() const noexcept { return to.empty(); }

    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

struct GraphSpec {
    std::vector<std::string> vertices;
    std::vector<GraphEdge> edges;
    /// Vertices created by truncate_graph at the far end of half-lines.
    std::vector<std::string> truncated_ends;

    [[nodiscard]] std::optional<std::size_t> vertex_index(std::string_view id) const noexcept;
    [[nodiscard]] bool is_finite_length() const noexcept;

    friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

struct Violation {
    std::string kind;    // short category, e.g. "conical page"
    std::string message; // names the offending page/binding/attachment
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] bool has(std::string_view kind) const noexcept;
    [[nodiscard]] std::string summary() const;
};

[[nodiscard]] ValidationReport validate_book(const Book& book);
[[nodiscard]] ValidationReport validate_graph(const GraphSpec& graph);

/// Throws ValidationError carrying the report summary when the book is invalid.
void require_valid(const Book& book);

[[nodiscard]] std::vector<Book> connected_components(const Book& book);
[[nodiscard]] bool is_connected(const Book& book);
[[nodiscard]] bool is_connected(const GraphSpec& graph);

/// Half the smallest binding length, capped at 1/2.
[[nodiscard]] double min_binding_length(const Book& book);

[[nodiscard]] Book compact_core(const Book& book);

/// Product book graph x [0, width]. Page per edge (id = edge id) with x along
/// the edge; vertex v becomes the transverse binding "v:<v>"; edge e gets the
/// private lateral bindings "e:<e>:S" and "e:<e>:N".
[[nodiscard]] Book graph_based_book(const GraphSpec& graph, double width);

[[nodiscard]] std::string vertex_binding_id(std::string_view vertex);
[[nodiscard]] std::string lateral_binding_id(std::string_view edge, Side side);

/// Replace every infinite length by `length`; each newly created far side gets
/// a fresh private binding "<page>:far:<Side>".
[[nodiscard]] Book truncate_book(const Book& book, double length);

/// Replace every half-line by an edge of length `length` ending at a fresh
/// vertex "<edge>:end".
[[nodiscard]] GraphSpec truncate_graph(const GraphSpec& graph, double length);

// Reference constructions used by experiments, tests and the CLI.
namespace books {

/// Single page [0,a]x[0,b] with four private bindings.
[[nodiscard]] Book rectangle(double lx, double ly);
/// Single page with North=South and West=East identified.
[[nodiscard]] Book torus(double lx, double ly);
/// `pages` half-strips [0,inf)x[0,width] glued along their West side.
[[nodiscard]] Book star(std::size_t pages, double width);
/// Two half-strips glued along one transverse binding: an infinite strip.
[[nodiscard]] Book straight_strip(double width);
/// Two quarter-plane pages sharing one infinite binding.
[[nodiscard]] Book half_plane();

} // namespace books

namespace graphs {

/// Periodic truncation of the real line: one loop edge of the given length.
[[nodiscard]] GraphSpec truncated_line(double length);
[[nodiscard]] GraphSpec segment(double length);
/// Star with `edges` edges of the given length (infinite for half-lines).
[[nodiscard]] GraphSpec star(std::size_t edges, double length);
[[nodiscard]] GraphSpec triangle(double length);
/// Loop of the given circumference with one half-line attached.
[[nodiscard]] GraphSpec tadpole(double loop_length);

} // namespace graphs

} // namespace openbook
