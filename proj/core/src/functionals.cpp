#include "openbook/functionals.hpp"

#include "openbook/error.hpp"
#include "openbook/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace openbook {

void check_params(const Params& params)
{
    if (!(params.p > 1.0) || !std::isfinite(params.p)) throw ValidationError("p must be finite and > 1");
    if (!std::isfinite(params.omega)) throw ValidationError("omega must be finite");
    if (params.width && (!(*params.width > 0.0) || !std::isfinite(*params.width))) {
        throw ValidationError("width L must be positive and finite");
    }
}

double nonlinearity_constant(double p) noexcept { return (p - 1.0) / (2.0 * (p + 1.0)); }

FunctionalReport evaluate(const Vector& u, const DiscreteOperators& ops, const Params& params)
{
    if (u.size() != ops.dof_count()) throw ValidationError("evaluate: field length does not match the operators");
    check_params(params);
    FunctionalReport r;
    double transverse_weight = 1.0;
    if (params.width) {
        if (!ops.has_split()) throw ValidationError("evaluate: rescaled problem needs the x/y stiffness split");
        transverse_weight = 1.0 / (*params.width * *params.width);
    }
    if (ops.has_split()) {
        r.qx = u.dot(*ops.stiffness_x * u);
        r.qy = u.dot(*ops.stiffness_y * u);
    } else {
        r.qx = u.dot(ops.stiffness * u);
    }
    r.mass2 = mass_norm_squared(ops, u);
    r.np1 = lumped_power_sum(ops, u, params.p + 1.0);
    r.quadratic = r.qx + transverse_weight * r.qy + params.omega * r.mass2;
    r.action = 0.5 * r.quadratic - r.np1 / (params.p + 1.0);
    r.nehari = r.quadratic - r.np1;
    r.level = nonlinearity_constant(params.p) * r.np1;
    return r;
}

SparseMatrix quadratic_operator(const DiscreteOperators& ops, const Params& params)
{
    check_params(params);
    SparseMatrix a;
    if (params.width) {
        if (!ops.has_split()) throw ValidationError("rescaled problem needs the x/y stiffness split");
        a = *ops.stiffness_x + (1.0 / (*params.width * *params.width)) * *ops.stiffness_y;
    } else {
        a = ops.stiffness;
    }
    a += params.omega * ops.mass;
    a.makeCompressed();
    return a;
}

Vector action_gradient(const Vector& u, const SparseMatrix& quadratic, const DiscreteOperators& ops, double p)
{
    Vector g = quadratic * u;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        g[i] -= ops.lumped_mass[i] * std::pow(std::abs(u[i]), p - 1.0) * u[i];
    }
    return g;
}

double nehari_factor(const FunctionalReport& report, double p)
{
    if (!(report.np1 > 0.0)) throw ValidationError("nehari_project: field is zero");
    if (!(report.quadratic > 0.0)) {
        throw ValidationError("nehari_project: quadratic part is not positive (omega at or below the spectral bottom)");
    }
    return std::pow(report.quadratic / report.np1, 1.0 / (p - 1.0));
}

Field nehari_project(const Field& u, const DiscreteOperators& ops, const Params& params)
{
    const auto report = evaluate(u.values, ops, params);
    return Field{nehari_factor(report, params.p) * u.values};
}

double transverse_fraction(const Vector& u, const DiscreteOperators& ops)
{
    if (!ops.has_split()) throw ValidationError("transverse_fraction: x/y stiffness split unavailable");
    const double qx = u.dot(*ops.stiffness_x * u);
    const double qy = u.dot(*ops.stiffness_y * u);
    const double total = qx + qy;
    const double scale = u.dot(ops.stiffness.diagonal().cwiseProduct(u));
    if (!(total > 64.0 * std::numeric_limits<double>::epsilon() * scale)) return 0.0;
    return std::clamp(qy / total, 0.0, 1.0);
}

std::string to_json(const FunctionalReport& r)
{
    std::ostringstream out;
    out << "{\"qx\":" << format_double(r.qx) << ",\"qy\":" << format_double(r.qy)
        << ",\"mass2\":" << format_double(r.mass2) << ",\"np1\":" << format_double(r.np1)
        << ",\"action\":" << format_double(r.action) << ",\"nehari\":" << format_double(r.nehari)
        << ",\"level\":" << format_double(r.level) << "}";
    return out.str();
}

} // namespace openbook
