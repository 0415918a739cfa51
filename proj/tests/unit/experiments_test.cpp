#include "openbook/experiments.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace openbook;

namespace {

ExperimentOptions coarse(double h)
{
    ExperimentOptions o;
    o.h = h;
    return o;
}

} // namespace

TEST_SUITE("experiments")
{
    TEST_CASE("default truncation")
    {
        CHECK(default_truncation(1.0) == doctest::Approx(4.0 * std::log(1e8)));
        CHECK(default_truncation(4.0) == doctest::Approx(2.0 * std::log(1e8)));
    }

    TEST_CASE("line level")
    {
        const double l1 = reference_line_level(1.0, 3.0, 80.0, coarse(0.05));
        CHECK(l1 == doctest::Approx(oracle::soliton_level(1.0, 3.0)).epsilon(1e-3));
        const double l4 = reference_line_level(4.0, 3.0, 80.0, coarse(0.05));
        CHECK(l4 == doctest::Approx(oracle::soliton_level(4.0, 3.0)).epsilon(1e-2));
        CHECK(l4 / l1 == doctest::Approx(8.0).epsilon(1e-2));
        CHECK_THROWS_AS((void)reference_line_level(1.0, 3.0, 40.0, coarse(0.05)), ValidationError);
    }

    TEST_CASE("line level converges at second order")
    {
        const double exact = oracle::soliton_level(1.0, 3.0);
        const double e1 = std::abs(reference_line_level(1.0, 3.0, 80.0, coarse(0.2)) - exact);
        const double e2 = std::abs(reference_line_level(1.0, 3.0, 80.0, coarse(0.1)) - exact);
        CHECK(e1 / e2 > 3.0);
        CHECK(e1 / e2 < 5.0);
    }

    TEST_CASE("graph guesses avoid truncated ends")
    {
        const auto disc = assemble_graph_operators(truncate_graph(graphs::star(3, kInfinity), 10.0), 0.5);
        const auto inits = graph_initial_guesses(disc, 1.0, coarse(0.5));
        CHECK(inits.size() == 1);
        for (const auto& g : inits) CHECK(g.label.find(":end") == std::string::npos);
        const auto loop = assemble_graph_operators(graphs::truncated_line(10.0), 0.5);
        const auto with_random = graph_initial_guesses(loop, 1.0, coarse(0.5));
        CHECK(with_random.size() == 3);
    }

    TEST_CASE("sweep csv")
    {
        SweepRecord r;
        r.width = 1.5;
        r.level = 2.0;
        r.converged = true;
        const auto csv = sweep_csv({r});
        CHECK(csv.rfind("L,level,transverse_fraction,iterations,residual,converged\n", 0) == 0);
        CHECK(csv.find("1.5,2,0,0,0,true") != std::string::npos);
    }

    TEST_CASE("below the threshold the sweep reproduces the line")
    {
        const auto result = sweep_widths(graphs::truncated_line(20.0), {1.0, 3.0, std::nullopt}, {0.5, 1.2},
                                         coarse(0.2));
        REQUIRE(result.records.size() == 2);
        for (const auto& r : result.records) {
            CHECK(r.converged);
            CHECK(r.transverse_fraction < 1e-6);
            CHECK(r.level == doctest::Approx(result.reference.level).epsilon(1e-7));
            CHECK(r.branches.size() >= 4);
        }
        CHECK(transverse_nodes_for(0.5, 0.2) == node_count(1.0, 0.2));
        CHECK(transverse_nodes_for(3.0, 0.2) == node_count(3.0, 0.2));
        CHECK_THROWS_AS((void)sweep_widths(graphs::truncated_line(20.0), {1.0, 3.0, std::nullopt}, {-1.0}, coarse(0.2)),
                        ValidationError);
    }

    TEST_CASE("threshold bracket must straddle")
    {
        CHECK_THROWS_AS((void)detect_lmin(graphs::truncated_line(20.0), {1.0, 3.0, std::nullopt}, 0.5, 1.0, coarse(0.2)),
                        ValidationError);
        CHECK_THROWS_AS((void)detect_lmin(graphs::truncated_line(20.0), {1.0, 3.0, std::nullopt}, 2.0, 1.0, coarse(0.2)),
                        ValidationError);
    }

    TEST_CASE("omega scan")
    {
        const auto scan = omega_monotonicity_scan(graphs::truncated_line(30.0), 3.0, {0.5, 1.0, 2.0}, coarse(0.1));
        REQUIRE(scan.rows.size() == 3);
        CHECK(scan.strictly_increasing());
        CHECK(scan.rows[0].level < scan.rows[2].level);
        CHECK_THROWS_AS((void)omega_monotonicity_scan(graphs::truncated_line(30.0), 3.0, {1.0, 0.5}, coarse(0.1)),
                        ValidationError);
        const auto book = omega_monotonicity_scan(books::rectangle(1.0, 1.0), 3.0, {1.0, 2.0}, coarse(0.25));
        CHECK(book.strictly_increasing());
        CHECK(book.rows[1].level == doctest::Approx(1.0));
    }

    TEST_CASE("page symmetry projection")
    {
        const auto mesh = mesh_book(truncate_book(books::star(3, 1.0), 4.0), 0.5);
        const auto project = page_symmetry_projection(mesh);
        Vector u = seeded_noise(mesh.dofs.dof_count, 11);
        project(u);
        Vector again = u;
        project(again);
        CHECK((again - u).norm() < 1e-14);
        const auto& g = mesh.plan.pages[0];
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                CHECK(u[mesh.dofs.at(0, g, i, j)] == doctest::Approx(u[mesh.dofs.at(1, g, i, j)]));
                CHECK(u[mesh.dofs.at(0, g, i, j)] == doctest::Approx(u[mesh.dofs.at(2, g, i, j)]));
            }
        }
    }

    TEST_CASE("book guesses stay near the core")
    {
        const auto mesh = mesh_book(truncate_book(books::star(3, 1.0), 10.0), 0.5);
        const Vector env = core_envelope(mesh, 1.0);
        const auto& g = mesh.plan.pages[0];
        CHECK(env[mesh.dofs.at(0, g, 0, 0)] == doctest::Approx(1.0));
        CHECK(env[mesh.dofs.at(0, g, g.nx - 1, 0)] < 1e-3);
        const auto inits = book_initial_guesses(mesh, 1.0, coarse(0.5));
        REQUIRE(inits.size() == 2);
        CHECK(inits[0].label == "core");
    }

    TEST_CASE("decay fit")
    {
        const double T = 10.0;
        const auto mesh = mesh_book(truncate_book(books::star(3, 1.0), T), 0.25);
        CHECK_THROWS_WITH_AS((void)decay_fit(mesh, Vector::Zero(mesh.dofs.dof_count), "e0", 1.0,
                                             std::make_pair(2.0, 7.0)),
                             doctest::Contains("numerical floor"), ValidationError);

        Vector u(mesh.dofs.dof_count);
        for (std::size_t p = 0; p < 3; ++p) {
            const auto& g = mesh.plan.pages[p];
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) u[mesh.dofs.at(p, g, i, j)] = 3.0 * std::exp(-1.3 * i * g.hx);
            }
        }
        const auto fit = decay_fit(mesh, u, "e1", 1.0);
        CHECK(fit.rate == doctest::Approx(1.3));
        CHECK(fit.x0 == doctest::Approx(0.2 * T));
        CHECK(fit.x1 == doctest::Approx(0.7 * T));
        CHECK(decay_fits(mesh, u, 1.0).size() == 3);
        CHECK_THROWS_AS((void)decay_fit(mesh, u, "e1", 1.0, std::make_pair(0.5, 7.0)), ValidationError);
        CHECK_THROWS_AS((void)decay_fit(mesh, u, "nope", 1.0), ValidationError);
    }

    TEST_CASE("test profile")
    {
        CHECK(test_profile_power(4.0) == doctest::Approx(35.0 / 128.0));
        CHECK(test_profile_power(2.0) == doctest::Approx(3.0 / 8.0));
    }

    TEST_CASE("existence reports")
    {
        const Params params{1.0, 3.0, std::nullopt};
        const auto options = coarse(0.2);
        const double line = reference_line_level(1.0, 3.0, 80.0, options);

        const auto strip = existence_report(books::straight_strip(1.0), params, 12.0, options);
        CHECK(strip.verdict == "inconclusive");
        CHECK(strip.strip_width == 1.0);
        CHECK(strip.strip_level == doctest::Approx(line).epsilon(1e-4));

        const auto star = existence_report(books::star(3, 1.0), params, 12.0, options);
        CHECK(star.verdict == "not satisfied");
        CHECK(star.level > star.strip_level);

        const auto tadpole = existence_report(graph_based_book(graphs::tadpole(2.0), 1.0), params, 12.0, options);
        CHECK(tadpole.converged);
        CHECK(tadpole.verdict == "satisfied");
        CHECK(tadpole.level < tadpole.strip_level);

        CHECK_THROWS_AS((void)existence_report(books::torus(1.0, 1.0), params, 12.0, options), ValidationError);
    }
}
