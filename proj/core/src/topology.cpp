#include "openbook/topology.hpp"

#include "openbook/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace openbook {

namespace {

constexpr std::array<Side, 4> kSides{Side::South, Side::North, Side::West, Side::East};

bool valid_length(double length) { return length > 0.0 && !std::isnan(length); }

std::string fmt_length(double length)
{
    if (is_infinite(length)) return "inf";
    std::ostringstream out;
    out << length;
    return out.str();
}

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t i)
    {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

    std::vector<std::size_t> parent;
};

} // namespace

std::string_view to_string(Side side) noexcept
{
    switch (side) {
    case Side::South: return "South";
    case Side::North: return "North";
    case Side::West: return "West";
    case Side::East: return "East";
    }
    return "?";
}

std::string_view to_string(Orientation orientation) noexcept
{
    return orientation == Orientation::Forward ? "forward" : "reversed";
}

std::string_view to_string(Axis axis) noexcept { return axis == Axis::X ? "x" : "y"; }

std::optional<Side> parse_side(std::string_view text) noexcept
{
    for (Side side : kSides) {
        if (text == to_string(side)) return side;
    }
    return std::nullopt;
}

std::optional<Orientation> parse_orientation(std::string_view text) noexcept
{
    if (text == "forward") return Orientation::Forward;
    if (text == "reversed") return Orientation::Reversed;
    return std::nullopt;
}

Axis side_axis(Side side) noexcept
{
    return (side == Side::South || side == Side::North) ? Axis::X : Axis::Y;
}

bool are_consecutive(Side a, Side b) noexcept { return side_axis(a) != side_axis(b); }

double Page::side_length(Side side) const noexcept
{
    return side_axis(side) == Axis::X ? lx : ly;
}

bool Page::has_side(Side side) const noexcept
{
    switch (side) {
    case Side::North: return !is_infinite(ly);
    case Side::East: return !is_infinite(lx);
    default: return true;
    }
}

const Page* Book::find_page(std::string_view id) const noexcept
{
    auto it = std::find_if(pages.begin(), pages.end(), [&](const Page& p) { return p.id == id; });
    return it == pages.end() ? nullptr : &*it;
}

const Binding* Book::find_binding(std::string_view id) const noexcept
{
    auto it = std::find_if(bindings.begin(), bindings.end(), [&](const Binding& b) { return b.id == id; });
    return it == bindings.end() ? nullptr : &*it;
}

std::optional<std::size_t> Book::page_index(std::string_view id) const noexcept
{
    for (std::size_t i = 0; i < pages.size(); ++i) {
        if (pages[i].id == id) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> Book::binding_index(std::string_view id) const noexcept
{
    for (std::size_t i = 0; i < bindings.size(); ++i) {
        if (bindings[i].id == id) return i;
    }
    return std::nullopt;
}

const Attachment* Book::attachment_at(std::string_view page, Side side) const noexcept
{
    for (const auto& a : attachments) {
        if (a.page == page && a.side == side) return &a;
    }
    return nullptr;
}

bool Book::is_compact() const noexcept
{
    return std::all_of(bindings.begin(), bindings.end(), [](const Binding& b) { return !is_infinite(b.length); })
        && std::all_of(pages.begin(), pages.end(), [](const Page& p) { return p.is_compact(); });
}

std::optional<std::size_t> GraphSpec::vertex_index(std::string_view id) const noexcept
{
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i] == id) return i;
    }
    return std::nullopt;
}

bool GraphSpec::is_finite_length() const noexcept
{
    return std::none_of(edges.begin(), edges.end(), [](const GraphEdge& e) { return is_infinite(e.length); });
}

bool ValidationReport::has(std::string_view kind) const noexcept
{
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const
{
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.kind + ": " + v.message;
    }
    return out;
}

ValidationReport validate_book(const Book& book)
{
    ValidationReport report;
    auto add = [&](std::string kind, std::string message) {
        report.violations.push_back({std::move(kind), std::move(message)});
    };

    std::set<std::string> page_ids;
    for (const auto& page : book.pages) {
        if (!page_ids.insert(page.id).second) add("duplicate id", "page '" + page.id + "' declared twice");
        if (!valid_length(page.lx) || !valid_length(page.ly)) {
            add("invalid length", "page '" + page.id + "' has non-positive dimension");
        }
    }
    std::set<std::string> binding_ids;
    for (const auto& binding : book.bindings) {
        if (!binding_ids.insert(binding.id).second) {
            add("duplicate id", "binding '" + binding.id + "' declared twice");
        }
        if (!valid_length(binding.length)) {
            add("invalid length", "binding '" + binding.id + "' has non-positive length");
        }
    }

    std::map<std::pair<std::string, Side>, int> side_count;
    std::map<std::string, std::vector<Side>> sides_by_page_binding; // key: page + '\0' + binding
    std::set<std::string> incident;

    for (std::size_t i = 0; i < book.attachments.size(); ++i) {
        const auto& a = book.attachments[i];
        const std::string where = "attachment #" + std::to_string(i) + " (page '" + a.page + "', "
            + std::string(to_string(a.side)) + ", binding '" + a.binding + "')";
        const Page* page = book.find_page(a.page);
        const Binding* binding = book.find_binding(a.binding);
        if (page == nullptr) {
            add("unknown page", where);
            continue;
        }
        if (binding == nullptr) {
            add("unknown binding", where);
            continue;
        }
        incident.insert(a.binding);
        if (!page->has_side(a.side)) {
            add("nonexistent side", where + ": side lies at infinity");
            continue;
        }
        ++side_count[{a.page, a.side}];
        const double side_len = page->side_length(a.side);
        if (side_len != binding->length) {
            add("length mismatch", where + ": side length " + fmt_length(side_len) + " vs binding length "
                    + fmt_length(binding->length));
        }
        if (is_infinite(side_len) && a.orientation == Orientation::Reversed) {
            add("reversed infinite side", where);
        }
        sides_by_page_binding[a.page + '\0' + a.binding].push_back(a.side);
    }

    for (const auto& page : book.pages) {
        for (Side side : kSides) {
            if (!page.has_side(side)) continue;
            auto it = side_count.find({page.id, side});
            const int count = it == side_count.end() ? 0 : it->second;
            if (count == 0) {
                add("missing attachment", "page '" + page.id + "' side " + std::string(to_string(side)));
            } else if (count > 1) {
                add("duplicate attachment", "page '" + page.id + "' side " + std::string(to_string(side)));
            }
        }
    }

    for (const auto& [key, sides] : sides_by_page_binding) {
        const auto sep = key.find('\0');
        for (std::size_t i = 0; i < sides.size(); ++i) {
            for (std::size_t j = i + 1; j < sides.size(); ++j) {
                if (are_consecutive(sides[i], sides[j])) {
                    add("conical page", "page '" + key.substr(0, sep) + "' has binding '" + key.substr(sep + 1)
                            + "' on consecutive sides " + std::string(to_string(sides[i])) + " and "
                            + std::string(to_string(sides[j])));
                }
            }
        }
    }

    for (const auto& binding : book.bindings) {
        if (!incident.contains(binding.id)) add("orphan binding", "binding '" + binding.id + "' has no page");
    }
    return report;
}

ValidationReport validate_graph(const GraphSpec& graph)
{
    ValidationReport report;
    auto add = [&](std::string kind, std::string message) {
        report.violations.push_back({std::move(kind), std::move(message)});
    };
    std::set<std::string> ids;
    for (const auto& v : graph.vertices) {
        if (!ids.insert(v).second) add("duplicate id", "vertex '" + v + "' declared twice");
    }
    std::set<std::string> edge_ids;
    for (const auto& e : graph.edges) {
        if (!edge_ids.insert(e.id).second) add("duplicate id", "edge '" + e.id + "' declared twice");
        if (!valid_length(e.length)) add("invalid length", "edge '" + e.id + "' has non-positive length");
        if (!ids.contains(e.from)) add("unknown vertex", "edge '" + e.id + "' starts at '" + e.from + "'");
        if (e.is_half_line()) {
            if (!is_infinite(e.length)) add("invalid length", "half-line edge '" + e.id + "' must be infinite");
        } else {
            if (!ids.contains(e.to)) add("unknown vertex", "edge '" + e.id + "' ends at '" + e.to + "'");
            if (is_infinite(e.length)) {
                add("invalid length", "edge '" + e.id + "' joins two vertices but has infinite length");
            }
        }
    }
    return report;
}

void require_valid(const Book& book)
{
    const auto report = validate_book(book);
    if (!report.ok()) throw ValidationError("invalid book: " + report.summary());
}

std::vector<Book> connected_components(const Book& book)
{
    DisjointSets sets(book.pages.size());
    std::map<std::string, std::size_t> first_page_of_binding;
    for (const auto& a : book.attachments) {
        const auto pi = book.page_index(a.page);
        if (!pi) continue;
        auto [it, inserted] = first_page_of_binding.emplace(a.binding, *pi);
        if (!inserted) sets.unite(it->second, *pi);
    }

    std::map<std::size_t, std::size_t> component_of_root;
    std::vector<Book> components;
    std::vector<std::size_t> component_of_page(book.pages.size());
    for (std::size_t i = 0; i < book.pages.size(); ++i) {
        const auto root = sets.find(i);
        auto [it, inserted] = component_of_root.emplace(root, components.size());
        if (inserted) components.emplace_back();
        component_of_page[i] = it->second;
        components[it->second].pages.push_back(book.pages[i]);
    }
    for (const auto& a : book.attachments) {
        const auto pi = book.page_index(a.page);
        if (!pi) continue;
        components[component_of_page[*pi]].attachments.push_back(a);
    }
    for (auto& component : components) {
        for (const auto& binding : book.bindings) {
            const bool used = std::any_of(component.attachments.begin(), component.attachments.end(),
                                          [&](const Attachment& a) { return a.binding == binding.id; });
            if (used) component.bindings.push_back(binding);
        }
        for (const auto& t : book.truncations) {
            if (component.find_page(t.page) != nullptr) component.truncations.push_back(t);
        }
    }
    return components;
}

bool is_connected(const Book& book) { return connected_components(book).size() == 1; }

bool is_connected(const GraphSpec& graph)
{
    if (graph.vertices.empty()) return false;
    DisjointSets sets(graph.vertices.size());
    for (const auto& e : graph.edges) {
        const auto a = graph.vertex_index(e.from);
        const auto b = e.is_half_line() ? a : graph.vertex_index(e.to);
        if (a && b) sets.unite(*a, *b);
    }
    for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
        if (sets.find(i) != 0) return false;
    }
    return true;
}

double min_binding_length(const Book& book)
{
    double shortest = 1.0;
    for (const auto& b : book.bindings) shortest = std::min(shortest, b.length);
    return 0.5 * shortest;
}

Book compact_core(const Book& book)
{
    Book core;
    std::set<std::string> kept;
    for (const auto& page : book.pages) {
        if (!page.is_compact()) continue;
        bool finite = true;
        for (const auto& a : book.attachments) {
            if (a.page != page.id) continue;
            const Binding* b = book.find_binding(a.binding);
            if (b == nullptr || is_infinite(b->length)) finite = false;
        }
        if (finite) {
            core.pages.push_back(page);
            kept.insert(page.id);
        }
    }
    std::set<std::string> used;
    for (const auto& a : book.attachments) {
        if (kept.contains(a.page)) {
            core.attachments.push_back(a);
            used.insert(a.binding);
        }
    }
    for (const auto& b : book.bindings) {
        if (used.contains(b.id)) core.bindings.push_back(b);
    }
    return core;
}

std::string vertex_binding_id(std::string_view vertex) { return "v:" + std::string(vertex); }

std::string lateral_binding_id(std::string_view edge, Side side)
{
    return "e:" + std::string(edge) + ":" + (side == Side::South ? "S" : "N");
}

Book graph_based_book(const GraphSpec& graph, double width)
{
    if (!(width > 0.0) || is_infinite(width)) throw ValidationError("graph_based_book: width must be positive and finite");
    const auto graph_report = validate_graph(graph);
    if (!graph_report.ok()) throw ValidationError("invalid graph: " + graph_report.summary());
    if (!is_connected(graph)) throw ValidationError("graph_based_book: graph is disconnected");

    Book book;
    std::set<std::string> used_vertices;
    for (const auto& e : graph.edges) {
        used_vertices.insert(e.from);
        if (!e.is_half_line()) used_vertices.insert(e.to);
    }
    for (const auto& v : graph.vertices) {
        if (used_vertices.contains(v)) book.bindings.push_back({vertex_binding_id(v), width});
    }
    for (const auto& e : graph.edges) {
        book.pages.push_back({e.id, e.length, width});
        book.bindings.push_back({lateral_binding_id(e.id, Side::South), e.length});
        book.bindings.push_back({lateral_binding_id(e.id, Side::North), e.length});
        book.attachments.push_back({e.id, Side::South, lateral_binding_id(e.id, Side::South), Orientation::Forward});
        book.attachments.push_back({e.id, Side::North, lateral_binding_id(e.id, Side::North), Orientation::Forward});
        book.attachments.push_back({e.id, Side::West, vertex_binding_id(e.from), Orientation::Forward});
        if (!e.is_half_line()) {
            book.attachments.push_back({e.id, Side::East, vertex_binding_id(e.to), Orientation::Forward});
        }
    }
    return book;
}

Book truncate_book(const Book& book, double length)
{
    if (!(length > 0.0) || is_infinite(length)) throw ValidationError("truncate_book: length must be positive and finite");
    Book out = book;
    for (auto& b : out.bindings) {
        if (is_infinite(b.length)) b.length = length;
    }
    for (auto& page : out.pages) {
        const bool open_x = is_infinite(page.lx);
        const bool open_y = is_infinite(page.ly);
        if (open_x) {
            page.lx = length;
            const std::string id = page.id + ":far:East";
            out.bindings.push_back({id, page.ly == kInfinity ? length : page.ly});
            out.attachments.push_back({page.id, Side::East, id, Orientation::Forward});
            out.truncations.push_back({page.id, Axis::X, length});
        }
        if (open_y) {
            page.ly = length;
            const std::string id = page.id + ":far:North";
            out.bindings.push_back({id, page.lx});
            out.attachments.push_back({page.id, Side::North, id, Orientation::Forward});
            out.truncations.push_back({page.id, Axis::Y, length});
        }
    }
    return out;
}

GraphSpec truncate_graph(const GraphSpec& graph, double length)
{
    if (!(length > 0.0) || is_infinite(length)) throw ValidationError("truncate_graph: length must be positive and finite");
    GraphSpec out = graph;
    for (auto& e : out.edges) {
        if (!e.is_half_line()) continue;
        e.to = e.id + ":end";
        e.length = length;
        out.vertices.push_back(e.to);
        out.truncated_ends.push_back(e.to);
    }
    return out;
}

namespace books {

Book rectangle(double lx, double ly)
{
    Book book;
    book.pages.push_back({"P0", lx, ly});
    for (Side side : kSides) {
        const std::string id = "P0:" + std::string(to_string(side));
        book.bindings.push_back({id, side_axis(side) == Axis::X ? lx : ly});
        book.attachments.push_back({"P0", side, id, Orientation::Forward});
    }
    return book;
}

Book torus(double lx, double ly)
{
    Book book;
    book.pages.push_back({"P0", lx, ly});
    book.bindings.push_back({"B0", lx});
    book.bindings.push_back({"B1", ly});
    book.attachments.push_back({"P0", Side::South, "B0", Orientation::Forward});
    book.attachments.push_back({"P0", Side::North, "B0", Orientation::Forward});
    book.attachments.push_back({"P0", Side::West, "B1", Orientation::Forward});
    book.attachments.push_back({"P0", Side::East, "B1", Orientation::Forward});
    return book;
}

Book star(std::size_t pages, double width)
{
    return graph_based_book(graphs::star(pages, kInfinity), width);
}

Book straight_strip(double width) { return star(2, width); }

Book half_plane()
{
    Book book;
    book.pages.push_back({"Q0", kInfinity, kInfinity});
    book.pages.push_back({"Q1", kInfinity, kInfinity});
    book.bindings.push_back({"B0", kInfinity});
    book.bindings.push_back({"B1", kInfinity});
    book.bindings.push_back({"B2", kInfinity});
    book.attachments.push_back({"Q0", Side::West, "B0", Orientation::Forward});
    book.attachments.push_back({"Q1", Side::West, "B0", Orientation::Forward});
    book.attachments.push_back({"Q0", Side::South, "B1", Orientation::Forward});
    book.attachments.push_back({"Q1", Side::South, "B2", Orientation::Forward});
    return book;
}

} // namespace books

namespace graphs {

GraphSpec truncated_line(double length)
{
    GraphSpec g;
    g.vertices = {"o"};
    g.edges.push_back({"line", "o", "o", length});
    return g;
}

GraphSpec segment(double length)
{
    GraphSpec g;
    g.vertices = {"a", "b"};
    g.edges.push_back({"e0", "a", "b", length});
    return g;
}

GraphSpec star(std::size_t edges, double length)
{
    GraphSpec g;
    g.vertices = {"c"};
    for (std::size_t k = 0; k < edges; ++k) {
        GraphEdge e{"e" + std::to_string(k), "c", "", length};
        if (!is_infinite(length)) {
            e.to = "t" + std::to_string(k);
            g.vertices.push_back(e.to);
        }
        g.edges.push_back(e);
    }
    return g;
}

GraphSpec triangle(double length)
{
    GraphSpec g;
    g.vertices = {"a", "b", "c"};
    g.edges.push_back({"ab", "a", "b", length});
    g.edges.push_back({"bc", "b", "c", length});
    g.edges.push_back({"ca", "c", "a", length});
    return g;
}

GraphSpec tadpole(double loop_length)
{
    GraphSpec g;
    g.vertices = {"c"};
    g.edges.push_back({"head", "c", "c", loop_length});
    g.edges.push_back({"tail", "c", "", kInfinity});
    return g;
}

} // namespace graphs

} // namespace openbook
