#include "openbook/functionals.hpp"

#include "openbook/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace openbook;

namespace {

Vector bump(const ProductMesh& pm, double ky)
{
    Vector u(pm.book.dofs.dof_count);
    const int ny = pm.transverse_nodes;
    for (int d = 0; d < u.size(); ++d) {
        const double x = 0.1 * pm.graph_dof[static_cast<std::size_t>(d)];
        const double y = static_cast<double>(pm.transverse_index[static_cast<std::size_t>(d)]) / (ny - 1);
        u[d] = std::exp(-x * x) + ky * std::cos(M_PI * y);
    }
    return u;
}

} // namespace

TEST_SUITE("functionals")
{
    TEST_CASE("parameter checks")
    {
        CHECK_NOTHROW(check_params({1.0, 3.0, std::nullopt}));
        CHECK_THROWS_AS(check_params({1.0, 1.0, std::nullopt}), ValidationError);
        CHECK_THROWS_AS(check_params({1.0, 3.0, 0.0}), ValidationError);
        CHECK_THROWS_AS(check_params({std::nan(""), 3.0, std::nullopt}), ValidationError);
        CHECK(nonlinearity_constant(3.0) == doctest::Approx(0.25));
        CHECK(nonlinearity_constant(5.0) == doctest::Approx(1.0 / 3.0));
    }

    TEST_CASE("evaluate identities")
    {
        const auto pm = mesh_product(graphs::segment(3.0), 1.0, 0.25);
        const Vector u = bump(pm, 0.3);
        for (const double L : {0.5, 2.0}) {
            const Params params{1.5, 3.0, L};
            const auto r = evaluate(u, pm.book.ops, params);
            CHECK(r.quadratic == doctest::Approx(r.qx + r.qy / (L * L) + 1.5 * r.mass2));
            CHECK(r.action == doctest::Approx(r.quadratic / 2 - r.np1 / 4));
            CHECK(r.nehari == doctest::Approx(r.quadratic - r.np1));
            CHECK(r.level == doctest::Approx(0.25 * r.np1));
            CHECK(r.quadratic == doctest::Approx(u.dot(quadratic_operator(pm.book.ops, params) * u)));
            CHECK(r.np1 == doctest::Approx(lumped_power_sum(pm.book.ops, u, 4.0)));
        }
        const auto physical = evaluate(u, pm.book.ops, {1.0, 3.0, std::nullopt});
        CHECK(physical.quadratic == doctest::Approx(u.dot(pm.book.ops.stiffness * u) + physical.mass2));
    }

    TEST_CASE("action gradient matches finite differences")
    {
        const auto pm = mesh_product(graphs::segment(2.0), 1.0, 0.5);
        const Params params{1.0, 3.0, 1.7};
        const Vector u = bump(pm, 0.2);
        const auto q = quadratic_operator(pm.book.ops, params);
        const Vector g = action_gradient(u, q, pm.book.ops, 3.0);
        const double eps = 1e-6;
        for (int i = 0; i < u.size(); i += 3) {
            Vector up = u, dn = u;
            up[i] += eps;
            dn[i] -= eps;
            const double fd = (evaluate(up, pm.book.ops, params).action - evaluate(dn, pm.book.ops, params).action) / (2 * eps);
            CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6));
        }
    }

    TEST_CASE("Nehari projection")
    {
        const auto pm = mesh_product(graphs::segment(3.0), 1.0, 0.25);
        const Params params{1.0, 3.0, 1.0};
        const Vector u = bump(pm, 0.1);
        const auto r1 = evaluate(u, pm.book.ops, params);
        const auto r2 = evaluate(2.0 * u, pm.book.ops, params);
        CHECK(nehari_factor(r2, 3.0) == doctest::Approx(0.5 * nehari_factor(r1, 3.0)));

        const auto v = nehari_project(Field{u}, pm.book.ops, params);
        const auto w = nehari_project(Field{2.0 * u}, pm.book.ops, params);
        CHECK((v.values - w.values).norm() < 1e-12 * v.values.norm());
        const auto rv = evaluate(v.values, pm.book.ops, params);
        CHECK(std::abs(rv.nehari) < 1e-12 * rv.quadratic);
        CHECK(rv.action == doctest::Approx(rv.level));

        CHECK_THROWS_AS((void)nehari_project(Field{Vector::Zero(u.size())}, pm.book.ops, params), ValidationError);
        CHECK_THROWS_AS((void)nehari_project(Field{u}, pm.book.ops, {-5.0, 3.0, 1.0}), ValidationError);
    }

    TEST_CASE("transverse fraction")
    {
        const auto pm = mesh_product(graphs::segment(3.0), 1.0, 0.25);
        const auto& ops = pm.book.ops;
        REQUIRE(ops.has_split());
        Vector flat(pm.graph.mesh.dof_count);
        for (int i = 0; i < flat.size(); ++i) flat[i] = std::sin(0.3 * i);
        CHECK(transverse_fraction(lift_graph_field(Field{flat}, pm).values, ops) == doctest::Approx(0.0));

        Vector across(ops.dof_count());
        for (int d = 0; d < across.size(); ++d) across[d] = pm.transverse_index[static_cast<std::size_t>(d)];
        CHECK(transverse_fraction(across, ops) == doctest::Approx(1.0));

        const double mixed = transverse_fraction(bump(pm, 0.5), ops);
        CHECK(mixed > 0.0);
        CHECK(mixed < 1.0);
        CHECK(transverse_fraction(Vector::Ones(ops.dof_count()), ops) == 0.0);
    }

    TEST_CASE("report json")
    {
        FunctionalReport r;
        r.level = 1.5;
        const auto json = to_json(r);
        CHECK(json.find("\"level\"") != std::string::npos);
        CHECK(json.find("1.5") != std::string::npos);
    }
}
