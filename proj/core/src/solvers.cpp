#include "openbook/solvers.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace openbook {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double abs_pow(double x, double q)
{
    const double a = std::abs(x);
    if (q == 2.0) return a * a;
    if (q == 4.0) return (a * a) * (a * a);
    return std::pow(a, q);
}

void fix_sign(Vector& v)
{
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
}

double infinity_norm(const SparseMatrix& m)
{
    Vector row_sums = Vector::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
    }
    return row_sums.size() == 0 ? 0.0 : row_sums.maxCoeff();
}

} // namespace

Vector seeded_noise(int n, std::uint64_t seed)
{
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(engine);
    return v;
}

std::vector<EigenPair> smallest_eigenpairs(const SparseMatrix& a, const SparseMatrix& b, int k,
                                           const EigenOptions& options)
{
    const int n = static_cast<int>(a.rows());
    if (k < 1 || k >= n) throw ValidationError("smallest_eigenpairs: need 1 <= k < dof count");
    const int block = std::min(n, k + std::max(options.guard_vectors, 1));

    SparseMatrix shifted = a - options.shift * b;
    Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
    if (factor.info() != Eigen::Success) {
        throw ConvergenceError("smallest_eigenpairs: factorization of A - shift*B failed");
    }

    Eigen::MatrixXd x(n, block);
    for (int c = 0; c < block; ++c) x.col(c) = seeded_noise(n, options.seed + static_cast<std::uint64_t>(c));

    const double scale_a = infinity_norm(a);
    const double scale_b = infinity_norm(b);
    Vector previous = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());
    Eigen::VectorXd ritz;
    Eigen::MatrixXd vectors;
    for (int iter = 0; iter < options.max_iter; ++iter) {
        Eigen::MatrixXd y(n, block);
        const Eigen::MatrixXd bx = b * x;
        for (int c = 0; c < block; ++c) y.col(c) = factor.solve(bx.col(c));
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
        const Eigen::MatrixXd aq = a * q;
        const Eigen::MatrixXd bq = b * q;
        Eigen::MatrixXd ar = q.transpose() * aq;
        Eigen::MatrixXd br = q.transpose() * bq;
        ar = 0.5 * (ar + ar.transpose()).eval();
        br = 0.5 * (br + br.transpose()).eval();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(ar, br);
        if (small.info() != Eigen::Success) throw ConvergenceError("smallest_eigenpairs: Rayleigh-Ritz step failed");
        ritz = small.eigenvalues();
        vectors = small.eigenvectors();
        x = q * vectors;

        bool done = iter > 0;
        for (int i = 0; i < k && done; ++i) {
            const double change = std::abs(ritz[i] - previous[i]);
            const Vector r = a * x.col(i) - ritz[i] * (b * x.col(i));
            const double backward = r.norm() / ((scale_a + std::abs(ritz[i]) * scale_b) * x.col(i).norm());
            done = change <= 1e-2 * options.tol * std::max(1.0, std::abs(ritz[i])) && backward <= std::sqrt(options.tol);
        }
        if (done) {
            std::vector<EigenPair> out;
            for (int i = 0; i < k; ++i) {
                Vector v = x.col(i);
                v /= std::sqrt(v.dot(b * v));
                fix_sign(v);
                out.push_back({ritz[i], std::move(v)});
            }
            return out;
        }
        previous = ritz.head(k);
    }
    throw ConvergenceError("smallest_eigenpairs: no convergence within " + std::to_string(options.max_iter)
                           + " iterations");
}

std::vector<EigenPair> spectral_bottom(const DiscreteOperators& ops, int k, const EigenOptions& options)
{
    return smallest_eigenpairs(ops.stiffness, ops.mass, k, options);
}

GroundStateSolver::GroundStateSolver(const DiscreteOperators& ops, Params params)
    : ops_(&ops), params_(std::move(params))
{
    check_params(params_);
    if (!(params_.omega > 0.0)) {
        throw ValidationError("ground_state: omega must exceed the spectral bottom, which is 0 under Kirchhoff "
                              "conditions; no nontrivial ground state for omega <= 0");
    }
    quadratic_ = quadratic_operator(ops, params_);
    factor_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(quadratic_);
    if (factor_->info() != Eigen::Success || factor_->vectorD().minCoeff() <= 0.0) {
        throw ValidationError("ground_state: quadratic operator is not positive definite");
    }
}

GroundState GroundStateSolver::solve(const InitialGuess& init, const SolveOptions& options) const
{
    const auto& ops = *ops_;
    if (init.field.size() != ops.dof_count()) throw ValidationError("ground_state: initial guess has wrong length");
    const double p = params_.p;

    Vector u = init.field.values;
    if (options.constraint) options.constraint(u);
    auto report = evaluate(u, ops, params_);
    u *= nehari_factor(report, p);
    report = evaluate(u, ops, params_);

    SolveReport out;
    out.init_label = init.label;
    if (options.record_history) out.level_history.push_back(report.level);

    double relative_change = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    for (;;) {
        const Vector gradient = action_gradient(u, quadratic_, ops, p);
        const Vector direction = factor_->solve(gradient);
        residual = std::sqrt(std::abs(direction.dot(gradient)) / report.quadratic);
        if (residual <= options.tol && relative_change <= options.tol) {
            out.converged = true;
            break;
        }
        if (iterations >= options.max_iter) break;

        double alpha = 1.0;
        bool accepted = false;
        Vector trial;
        FunctionalReport trial_report;
        while (alpha > 1e-10) {
            trial = u - alpha * direction;
            if (options.constraint) options.constraint(trial);
            trial_report = evaluate(trial, ops, params_);
            if (trial_report.np1 > 0.0 && trial_report.quadratic > 0.0) {
                trial *= nehari_factor(trial_report, p);
                trial_report = evaluate(trial, ops, params_);
                if (trial_report.level <= report.level * (1.0 + 64.0 * kEps)) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        relative_change = std::abs(trial_report.action - report.action) / std::abs(report.action);
        u = std::move(trial);
        report = trial_report;
        ++iterations;
        if (options.record_history) out.level_history.push_back(report.level);
    }

    if (u.dot(ops.lumped_mass) < 0.0) u = -u;
    out.level = report.level;
    out.action = report.action;
    out.nehari_residual = std::abs(report.nehari) / report.quadratic;
    out.equation_residual = residual;
    out.iterations = iterations;
    if (ops.has_split()) out.transverse_fraction = transverse_fraction(u, ops);
    return {Field{std::move(u)}, std::move(out)};
}

GroundState ground_state(const DiscreteOperators& ops, const Params& params, const InitialGuess& init,
                         const SolveOptions& options)
{
    return GroundStateSolver(ops, params).solve(init, options);
}

std::vector<SolveReport> MultiStartResult::reports() const
{
    std::vector<SolveReport> out;
    out.reserve(runs.size());
    for (const auto& run : runs) out.push_back(run.report);
    return out;
}

std::size_t select_best(const std::vector<GroundState>& runs, double tol, bool converged_only)
{
    if (runs.empty()) throw ValidationError("select_best: no runs");
    const bool any_converged =
        std::any_of(runs.begin(), runs.end(), [](const GroundState& g) { return g.report.converged; });
    const bool filter = converged_only && any_converged;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i].report;
        if (filter && !r.converged) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& b = runs[*best].report;
        const double slack = 2.0 * tol * std::abs(b.level);
        if (r.level < b.level - slack) {
            best = i;
        } else if (std::abs(r.level - b.level) <= slack
                   && r.transverse_fraction.value_or(0.0) < b.transverse_fraction.value_or(0.0)) {
            best = i;
        }
    }
    return *best;
}

MultiStartResult run_multi_start(const GroundStateSolver& solver, const std::vector<InitialGuess>& inits,
                                 const SolveOptions& options)
{
    if (inits.empty()) throw ValidationError("multi_start_ground_state: no initial guesses");
    MultiStartResult result;
    for (const auto& init : inits) result.runs.push_back(solver.solve(init, options));
    result.best_index = select_best(result.runs, options.tol);
    result.best = result.runs[result.best_index];
    return result;
}

MultiStartResult multi_start_ground_state(const DiscreteOperators& ops, const Params& params,
                                          const std::vector<InitialGuess>& inits, const SolveOptions& options)
{
    GroundStateSolver solver(ops, params);
    auto result = run_multi_start(solver, inits, options);
    if (!result.best.report.converged) {
        throw NoConvergenceError("multi_start_ground_state: no start converged", std::move(result));
    }
    return result;
}

LinearizedResult linearized_smallest_eig(const Field& u, const DiscreteOperators& graph_ops, const Params& params,
                                         const EigenOptions& options)
{
    check_params(params);
    if (u.size() != graph_ops.dof_count()) throw ValidationError("linearized_smallest_eig: field length mismatch");
    SparseMatrix op = graph_ops.stiffness + params.omega * graph_ops.mass;
    double peak = 0.0;
    for (Eigen::Index i = 0; i < u.values.size(); ++i) {
        const double potential = params.p * abs_pow(u.values[i], params.p - 1.0);
        peak = std::max(peak, potential);
        op.coeffRef(i, i) -= graph_ops.lumped_mass[i] * potential;
    }
    op.makeCompressed();
    EigenOptions eig = options;
    // Lumped and consistent masses differ by at most a factor 9 (bilinear),
    // so this shift lies strictly below the spectrum.
    eig.shift = params.omega - 9.0 * peak - 1.0;
    const auto pairs = smallest_eigenpairs(op, graph_ops.mass, 1, eig);
    LinearizedResult result;
    result.lowest_eigenvalue = pairs.front().value;
    if (result.lowest_eigenvalue < 0.0) {
        result.predicted_width = std::acos(-1.0) / std::sqrt(-result.lowest_eigenvalue);
    }
    return result;
}

std::string to_json(const SolveReport& report)
{
    nlohmann::ordered_json j;
    j["level"] = report.level;
    j["action"] = report.action;
    j["nehari_residual"] = report.nehari_residual;
    j["equation_residual"] = report.equation_residual;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    if (report.transverse_fraction) {
        j["transverse_fraction"] = *report.transverse_fraction;
    } else {
        j["transverse_fraction"] = nullptr;
    }
    j["init"] = report.init_label;
    return j.dump();
}

} // namespace openbook
