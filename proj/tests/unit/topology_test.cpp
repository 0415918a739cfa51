#include "openbook/topology.hpp"

#include "openbook/error.hpp"

#include <doctest.h>

using namespace openbook;

namespace {

Book two_squares(bool shared)
{
    Book book;
    for (const std::string id : {"A", "B"}) {
        book.pages.push_back({id, 1.0, 1.0});
        for (const std::string side : {"S", "N", "W", "E"}) {
            if (shared && id == "B" && side == "W") continue;
            book.bindings.push_back({id + side, 1.0});
        }
        book.attachments.push_back({id, Side::South, id + "S", Orientation::Forward});
        book.attachments.push_back({id, Side::North, id + "N", Orientation::Forward});
        book.attachments.push_back({id, Side::East, id + "E", Orientation::Forward});
    }
    book.attachments.push_back({"A", Side::West, "AW", Orientation::Forward});
    book.attachments.push_back({"B", Side::West, shared ? "AE" : "BW", Orientation::Forward});
    return book;
}

} // namespace

TEST_SUITE("topology")
{
    TEST_CASE("torus from a single page is valid")
    {
        const auto book = books::torus(1.0, 1.0);
        CHECK(book.pages.size() == 1);
        CHECK(book.bindings.size() == 2);
        CHECK(book.attachments.size() == 4);
        CHECK(validate_book(book).ok());
        CHECK(book.is_compact());
    }

    TEST_CASE("one binding on consecutive sides is a conical page")
    {
        Book book = books::rectangle(1.0, 1.0);
        for (auto& a : book.attachments) {
            if (a.side == Side::West) a.binding = "P0:South";
        }
        const auto report = validate_book(book);
        CHECK(report.has("conical page"));
    }

    TEST_CASE("side and binding lengths must agree")
    {
        Book book = books::rectangle(2.0, 1.0);
        for (auto& b : book.bindings) {
            if (b.id == "P0:South") b.length = 1.0;
        }
        CHECK(validate_book(book).has("length mismatch"));
        CHECK_THROWS_AS(require_valid(book), ValidationError);
    }

    TEST_CASE("structural violations are named")
    {
        Book book = books::rectangle(1.0, 1.0);
        book.attachments.push_back({"P0", Side::South, "nowhere", Orientation::Forward});
        book.attachments.push_back({"ghost", Side::South, "P0:South", Orientation::Forward});
        book.bindings.push_back({"lonely", 1.0});
        const auto report = validate_book(book);
        CHECK(report.has("unknown binding"));
        CHECK(report.has("unknown page"));
        CHECK(report.has("orphan binding"));

        Book missing = books::rectangle(1.0, 1.0);
        missing.attachments.pop_back();
        CHECK(validate_book(missing).has("missing attachment"));

        Book doubled = books::rectangle(1.0, 1.0);
        doubled.bindings.push_back({"extra", 1.0});
        doubled.attachments.push_back({"P0", Side::South, "extra", Orientation::Forward});
        CHECK(validate_book(doubled).has("duplicate attachment"));

        Book dup = books::rectangle(1.0, 1.0);
        dup.pages.push_back(dup.pages.front());
        CHECK(validate_book(dup).has("duplicate id"));
    }

    TEST_CASE("infinite sides: no side at infinity, no reversal")
    {
        Book book = books::star(3, 1.0);
        CHECK(validate_book(book).ok());
        CHECK_FALSE(book.is_compact());
        book.bindings.push_back({"far", 1.0});
        book.attachments.push_back({"e0", Side::East, "far", Orientation::Forward});
        CHECK(validate_book(book).has("nonexistent side"));

        Book half = books::half_plane();
        CHECK(validate_book(half).ok());
        half.attachments[0].orientation = Orientation::Reversed;
        CHECK(validate_book(half).has("reversed infinite side"));
    }

    TEST_CASE("connected components")
    {
        CHECK(connected_components(books::star(3, 1.0)).size() == 1);
        const auto parts = connected_components(two_squares(false));
        REQUIRE(parts.size() == 2);
        CHECK(parts[0].pages.size() == 1);
        CHECK(validate_book(parts[1]).ok());
        CHECK(is_connected(two_squares(true)));

        GraphSpec dumbbell;
        dumbbell.vertices = {"a", "b"};
        dumbbell.edges = {{"la", "a", "a", 1.0}, {"bar", "a", "b", 1.0}, {"lb", "b", "b", 1.0}};
        CHECK(connected_components(graph_based_book(dumbbell, 1.0)).size() == 1);
        CHECK(is_connected(dumbbell));
    }

    TEST_CASE("min binding length")
    {
        Book book;
        book.bindings = {{"a", 3.0}, {"b", 0.4}};
        CHECK(min_binding_length(book) == doctest::Approx(0.2));
        book.bindings = {{"a", 5.0}, {"b", 7.0}};
        CHECK(min_binding_length(book) == doctest::Approx(0.5));
        book.bindings = {{"a", 1.0}};
        CHECK(min_binding_length(book) == doctest::Approx(0.5));
    }

    TEST_CASE("compact core")
    {
        const auto torus = books::torus(1.0, 2.0);
        CHECK(compact_core(torus) == torus);
        CHECK(compact_core(books::star(3, 1.0)).empty());
        const auto tadpole = graph_based_book(graphs::tadpole(6.0), 1.0);
        const auto core = compact_core(tadpole);
        REQUIRE(core.pages.size() == 1);
        CHECK(core.pages[0].id == "head");
        CHECK(core.attachments.size() == 4);
        CHECK(core.is_compact());
    }

    TEST_CASE("graph-based books")
    {
        const auto tri = graph_based_book(graphs::triangle(1.0), 2.0);
        CHECK(tri.pages.size() == 3);
        CHECK(tri.bindings.size() == 9);
        CHECK(validate_book(tri).ok());

        const auto single = graph_based_book(graphs::segment(3.0), 0.5);
        CHECK(single.pages.size() == 1);
        CHECK(single.bindings.size() == 4);

        const auto cylinder = graph_based_book(graphs::truncated_line(5.0), 1.0);
        REQUIRE(cylinder.pages.size() == 1);
        CHECK(cylinder.attachment_at("line", Side::West)->binding == cylinder.attachment_at("line", Side::East)->binding);
        CHECK(validate_book(cylinder).ok());
    }

    TEST_CASE("truncation")
    {
        const auto star = truncate_book(books::star(3, 1.5), 20.0);
        CHECK(star.pages.size() == 3);
        for (const auto& p : star.pages) {
            CHECK(p.lx == 20.0);
            CHECK(p.ly == 1.5);
            const auto* far = star.attachment_at(p.id, Side::East);
            REQUIRE(far != nullptr);
            int uses = 0;
            for (const auto& a : star.attachments) uses += a.binding == far->binding;
            CHECK(uses == 1);
        }
        CHECK(star.truncations.size() == 3);
        CHECK(validate_book(star).ok());
        CHECK(star.is_compact());

        const auto torus = books::torus(1.0, 1.0);
        CHECK(truncate_book(torus, 5.0) == torus);

        const auto half = truncate_book(books::half_plane(), 10.0);
        CHECK(half.pages.size() == 2);
        for (const auto& p : half.pages) {
            CHECK(p.lx == 10.0);
            CHECK(p.ly == 10.0);
        }
        CHECK(half.find_binding("B0")->length == 10.0);
        CHECK(half.attachment_at("Q0", Side::West)->binding == half.attachment_at("Q1", Side::West)->binding);
        CHECK(validate_book(half).ok());

        const auto line = truncate_graph(graphs::star(2, kInfinity), 7.0);
        CHECK(line.is_finite_length());
        CHECK(line.truncated_ends.size() == 2);
        CHECK(validate_graph(line).ok());
        CHECK_THROWS_AS((void)truncate_book(torus, -1.0), ValidationError);
    }

    TEST_CASE("graph validation")
    {
        GraphSpec g = graphs::segment(1.0);
        g.edges.push_back({"e1", "a", "zz", 1.0});
        CHECK(validate_graph(g).has("unknown vertex"));
        GraphSpec h = graphs::segment(1.0);
        h.edges[0].length = kInfinity;
        CHECK(validate_graph(h).has("invalid length"));
        CHECK(validate_graph(graphs::tadpole(3.0)).ok());
    }
}
