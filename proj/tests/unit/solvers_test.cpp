#include "openbook/experiments.hpp"
#include "openbook/solvers.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace openbook;

TEST_SUITE("solvers")
{
    TEST_CASE("diagonal eigenproblem")
    {
        const int n = 30;
        SparseMatrix a(n, n), b(n, n);
        for (int i = 0; i < n; ++i) {
            a.insert(i, i) = n - i;
            b.insert(i, i) = 2.0;
        }
        const auto pairs = smallest_eigenpairs(a, b, 3);
        REQUIRE(pairs.size() == 3);
        CHECK(pairs[0].value == doctest::Approx(0.5));
        CHECK(pairs[1].value == doctest::Approx(1.0));
        CHECK(pairs[2].value == doctest::Approx(1.5));
        CHECK(pairs[0].vector.dot(b * pairs[0].vector) == doctest::Approx(1.0));
        CHECK(pairs[0].vector[n - 1] > 0.0);
        CHECK_THROWS_AS((void)smallest_eigenpairs(a, b, n), ValidationError);
    }

    TEST_CASE("unit square Neumann spectrum")
    {
        const auto mesh = mesh_book(books::rectangle(1.0, 1.0), 0.05);
        const auto pairs = spectral_bottom(mesh.ops, 4);
        const double pi2 = oracle::kPi * oracle::kPi;
        CHECK(std::abs(pairs[0].value) < 1e-8);
        CHECK(pairs[1].value == doctest::Approx(pi2).epsilon(0.01));
        CHECK(pairs[2].value == doctest::Approx(pi2).epsilon(0.01));
        CHECK(pairs[3].value == doctest::Approx(2 * pi2).epsilon(0.01));
        CHECK(std::abs(pairs[1].vector.dot(mesh.ops.mass * pairs[2].vector)) < 1e-8);
    }

    TEST_CASE("torus spectrum")
    {
        const auto mesh = mesh_book(books::torus(2.0, 1.0), 0.05);
        const auto pairs = spectral_bottom(mesh.ops, 3);
        const double first = std::pow(2 * oracle::kPi / 2.0, 2);
        CHECK(pairs[1].value == doctest::Approx(first).epsilon(0.01));
        CHECK(pairs[2].value == doctest::Approx(first).epsilon(0.01));
    }

    TEST_CASE("omega <= 0 is refused")
    {
        const auto mesh = mesh_book(books::rectangle(1.0, 1.0), 0.5);
        CHECK_THROWS_AS(GroundStateSolver(mesh.ops, {0.0, 3.0, std::nullopt}), ValidationError);
        CHECK_THROWS_AS(GroundStateSolver(mesh.ops, {-1.0, 3.0, std::nullopt}), ValidationError);
        const Vector u = Vector::Ones(mesh.dofs.dof_count);
        CHECK_THROWS_AS((void)ground_state(mesh.ops, {1.0, 3.0, std::nullopt}, {"x", Field{Vector::Ones(2)}}),
                        ValidationError);
        CHECK_NOTHROW((void)ground_state(mesh.ops, {1.0, 3.0, std::nullopt}, {"x", Field{u}}));
    }

    TEST_CASE("constant state on a compact book")
    {
        // The constant sqrt(omega) solves -Δu + ωu = u^3 on any compact book.
        const auto mesh = mesh_book(books::torus(1.0, 1.0), 0.25);
        const Params params{2.0, 3.0, std::nullopt};
        Vector u = Vector::Ones(mesh.dofs.dof_count);
        const auto gs = ground_state(mesh.ops, params, {"flat", Field{u}});
        CHECK(gs.report.converged);
        CHECK(gs.field.values.minCoeff() == doctest::Approx(std::sqrt(2.0)));
        CHECK(gs.report.level == doctest::Approx(0.25 * 4.0 * 1.0));
    }

    TEST_CASE("descent is deterministic and monotone")
    {
        const auto disc = assemble_graph_operators(graphs::truncated_line(20.0), 0.1);
        const Params params{1.0, 3.0, std::nullopt};
        Vector u = 0.5 * Vector::Ones(disc.mesh.dof_count) + 0.4 * seeded_noise(disc.mesh.dof_count, 5);
        SolveOptions options;
        options.record_history = true;
        const auto a = ground_state(disc.ops, params, {"noise", Field{u}}, options);
        const auto b = ground_state(disc.ops, params, {"noise", Field{u}}, options);
        CHECK(a.report.level == b.report.level);
        CHECK(a.report.iterations == b.report.iterations);
        CHECK((a.field.values - b.field.values).norm() == 0.0);
        for (std::size_t i = 1; i < a.report.level_history.size(); ++i) {
            CHECK(a.report.level_history[i] <= a.report.level_history[i - 1] * (1 + 1e-12));
        }
        CHECK(a.report.converged);
        CHECK(a.report.init_label == "noise");
    }

    TEST_CASE("seeded noise")
    {
        const Vector a = seeded_noise(100, 7);
        CHECK((a - seeded_noise(100, 7)).norm() == 0.0);
        CHECK((a - seeded_noise(100, 8)).norm() > 0.0);
        CHECK(a.cwiseAbs().maxCoeff() <= 1.0);
    }

    TEST_CASE("no convergence is reported")
    {
        const auto disc = assemble_graph_operators(graphs::truncated_line(20.0), 0.1);
        SolveOptions options;
        options.max_iter = 1;
        const Vector u = Vector::Ones(disc.mesh.dof_count) + 0.5 * seeded_noise(disc.mesh.dof_count, 3);
        CHECK_THROWS_AS((void)multi_start_ground_state(disc.ops, {1.0, 3.0, std::nullopt}, {{"a", Field{u}}}, options),
                        NoConvergenceError);
        try {
            (void)multi_start_ground_state(disc.ops, {1.0, 3.0, std::nullopt}, {{"a", Field{u}}}, options);
        } catch (const NoConvergenceError& e) {
            CHECK(e.result().runs.size() == 1);
            CHECK_FALSE(e.result().best.report.converged);
        }
        GroundStateSolver solver(disc.ops, {1.0, 3.0, std::nullopt});
        const auto flagged = run_multi_start(solver, {{"a", Field{u}}}, options);
        CHECK_FALSE(flagged.best.report.converged);
    }

    TEST_CASE("best run selection")
    {
        auto run = [](double level, bool converged, double fraction) {
            GroundState g;
            g.report.level = level;
            g.report.converged = converged;
            g.report.transverse_fraction = fraction;
            return g;
        };
        CHECK(select_best({run(2.0, true, 0), run(1.0, true, 0)}, 1e-8) == 1);
        CHECK(select_best({run(2.0, true, 0), run(1.0, false, 0)}, 1e-8) == 0);
        CHECK(select_best({run(2.0, true, 0), run(1.0, false, 0)}, 1e-8, false) == 1);
        CHECK(select_best({run(1.0, true, 0.2), run(1.0 + 1e-10, true, 0.0)}, 1e-8) == 1);
        CHECK(select_best({run(1.0, true, 0.0), run(1.0, true, 0.0)}, 1e-8) == 0);
    }

    TEST_CASE("linearization about the soliton")
    {
        ExperimentOptions options;
        options.h = 0.01;
        const Params params{1.0, 3.0, std::nullopt};
        const auto gs = graph_ground_state(graphs::truncated_line(40.0), params, options);
        const auto lin = linearized_smallest_eig(gs.field(), gs.discretization.ops, params);
        CHECK(lin.lowest_eigenvalue == doctest::Approx(oracle::linearized_soliton_eigenvalue()).epsilon(1e-3));
        REQUIRE(lin.predicted_width.has_value());
        CHECK(*lin.predicted_width == doctest::Approx(oracle::kPi / std::sqrt(3.0)).epsilon(1e-3));
    }

    TEST_CASE("report json")
    {
        SolveReport r;
        r.init_label = "lift";
        r.converged = true;
        const auto json = to_json(r);
        CHECK(json.find("\"lift\"") != std::string::npos);
        CHECK(json.find("true") != std::string::npos);
    }
}
