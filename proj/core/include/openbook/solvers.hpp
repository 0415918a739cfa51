#pragma once

#include "openbook/error.hpp"
#include "openbook/functionals.hpp"

#include <Eigen/SparseCholesky>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace openbook {

// ---------------------------------------------------------------------------
// Generalized symmetric eigenproblems A v = lambda B v

struct EigenOptions {
    double tol = 1e-8;
    int max_iter = 3000;
    std::uint64_t seed = 20240611;
    /// Shift below the wanted eigenvalues; the factorization of A - shift*B
    /// must be nonsingular.
    double shift = -1e-3;
    /// Extra subspace vectors beyond the requested count.
    int guard_vectors = 8;
};

struct EigenPair {
    double value = 0.0;
    /// B-orthonormal, sign fixed so the largest-magnitude entry is positive.
    Vector vector;
};

/// k smallest eigenpairs by shift-inverted subspace iteration with
/// Rayleigh-Ritz; throws ConvergenceError when the Ritz values stall.
[[nodiscard]] std::vector<EigenPair> smallest_eigenpairs(const SparseMatrix& a, const SparseMatrix& b, int k,
                                                         const EigenOptions& options = {});

/// Smallest eigenpairs of K v = lambda M v.
[[nodiscard]] std::vector<EigenPair> spectral_bottom(const DiscreteOperators& ops, int k,
                                                     const EigenOptions& options = {});

// ---------------------------------------------------------------------------
// Ground states

struct SolveOptions {
    /// Relative action change and preconditioned residual threshold.
    double tol = 1e-8;
    int max_iter = 4000;
    /// Optional projection applied after each step (e.g. a symmetry average).
    std::function<void(Vector&)> constraint;
    bool record_history = false;
};

struct InitialGuess {
    std::string label;
    Field field;
};

struct SolveReport {
    double level = 0.0;
    double action = 0.0;
    double nehari_residual = 0.0;
    double equation_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::optional<double> transverse_fraction;
    std::string init_label;
    /// Level after every accepted step (when requested).
    std::vector<double> level_history;
};

struct GroundState {
    Field field;
    SolveReport report;
};

/// Nehari-projected descent preconditioned by the quadratic operator:
///   g = (K_L + omega M)^{-1} grad S(u),  u <- pi(u - alpha g),
/// alpha halved until the level does not increase.
class GroundStateSolver {
public:
    GroundStateSolver(const DiscreteOperators& ops, Params params);

    [[nodiscard]] GroundState solve(const InitialGuess& init, const SolveOptions& options = {}) const;

    [[nodiscard]] const Params& params() const noexcept { return params_; }
    [[nodiscard]] const DiscreteOperators& operators() const noexcept { return *ops_; }

private:
    const DiscreteOperators* ops_;
    Params params_;
    SparseMatrix quadratic_;
    std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> factor_;
};

[[nodiscard]] GroundState ground_state(const DiscreteOperators& ops, const Params& params, const InitialGuess& init,
                                       const SolveOptions& options = {});

struct MultiStartResult {
    GroundState best;
    std::size_t best_index = 0;
    std::vector<GroundState> runs;

    [[nodiscard]] std::vector<SolveReport> reports() const;
};

/// Index of the preferred run: smallest level, levels within 2 tol (relative)
/// tie and the smaller transverse fraction wins, then input order. Only
/// converged runs compete unless none converged or `converged_only` is false.
[[nodiscard]] std::size_t select_best(const std::vector<GroundState>& runs, double tol, bool converged_only = true);

/// Runs every initial guess (input order) and keeps the best converged one.
/// Throws NoConvergenceError when none converges.
[[nodiscard]] MultiStartResult multi_start_ground_state(const DiscreteOperators& ops, const Params& params,
                                                        const std::vector<InitialGuess>& inits,
                                                        const SolveOptions& options = {});

/// Same, but never throws on non-convergence; the flagged best run is the
/// lowest level overall.
[[nodiscard]] MultiStartResult run_multi_start(const GroundStateSolver& solver, const std::vector<InitialGuess>& inits,
                                               const SolveOptions& options = {});

class NoConvergenceError : public ConvergenceError {
public:
    NoConvergenceError(const std::string& what, MultiStartResult result)
        : ConvergenceError(what), result_(std::move(result))
    {
    }

    [[nodiscard]] const MultiStartResult& result() const noexcept { return result_; }

private:
    MultiStartResult result_;
};

// ---------------------------------------------------------------------------
// Linearization about a one-dimensional ground state

struct LinearizedResult {
    double lowest_eigenvalue = 0.0;
    /// pi / sqrt(-lambda_1) when lambda_1 < 0: the width at which the first
    /// transverse Neumann mode cos(pi y / L) destabilizes the lifted state.
    std::optional<double> predicted_width;
};

/// Smallest eigenvalue of K + omega M - p diag(m |u|^{p-1}) relative to M.
[[nodiscard]] LinearizedResult linearized_smallest_eig(const Field& u, const DiscreteOperators& graph_ops,
                                                       const Params& params, const EigenOptions& options = {});

// ---------------------------------------------------------------------------
// Initial guesses

/// Seeded pseudo-random vector with entries uniform in [-1, 1].
[[nodiscard]] Vector seeded_noise(int n, std::uint64_t seed);

[[nodiscard]] std::string to_json(const SolveReport& report);

} // namespace openbook
