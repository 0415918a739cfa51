#pragma once

// Desk-scale reproductions of the dimensional-reduction phenomenology:
// level curves L -> s_{omega,L}, threshold detection, omega-monotonicity,
// decay on truncated half-strips, the existence comparison against the
// strip level and the large-width bound.

#include "openbook/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace openbook {

struct ExperimentOptions {
    double h = 0.1;
    double tol = 1e-8;
    int max_iter = 4000;
    std::uint64_t seed = 1;
    /// Random restarts added to every multi-start (0 disables them).
    int random_starts = 1;

    [[nodiscard]] SolveOptions solve_options() const;
};

/// (4 / sqrt(omega)) ln(1e8): the tail bound exp(-sqrt(omega) x / 2) is then
/// below 1e-8 at half the truncation length.
[[nodiscard]] double default_truncation(double omega);

// ---------------------------------------------------------------------------
// One-dimensional (graph) problems

struct GraphGroundState {
    GraphDiscretization discretization;
    MultiStartResult result;

    [[nodiscard]] const Field& field() const noexcept { return result.best.field; }
    [[nodiscard]] double level() const noexcept { return result.best.report.level; }
};

/// Bumps sech(sqrt(omega) d) centred at every vertex and every edge midpoint
/// (d = mesh distance), skipping the far ends of truncated half-lines.
[[nodiscard]] std::vector<InitialGuess> graph_initial_guesses(const GraphDiscretization& disc, double omega,
                                                              const ExperimentOptions& options);

/// Ground state on a finite graph (Params::width must be empty).
[[nodiscard]] GraphGroundState graph_ground_state(const GraphSpec& graph, const Params& params,
                                                  const ExperimentOptions& options);

/// Ground-state level on graphs::truncated_line(length). Throws ValidationError
/// when exp(-sqrt(omega) length / 4) >= 1e-8.
[[nodiscard]] double reference_line_level(double omega, double p, double length, const ExperimentOptions& options);

// ---------------------------------------------------------------------------
// Width sweeps on graph x [0, 1] with transverse weight L^{-2}

struct SweepRecord {
    double width = 0.0;
    double level = 0.0;
    double transverse_fraction = 0.0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::string best_label;
    /// "<init label>=<level>" for every start, input order.
    std::vector<std::string> branches;
};

struct SweepResult {
    /// The L = 0 reference, solved with the graph operators.
    SweepRecord reference;
    std::vector<SweepRecord> records;
};

/// Transverse node count used at width L: physical spacing at most h.
[[nodiscard]] int transverse_nodes_for(double width, double h);

/// Initial guesses on a product mesh at width L built from the graph state v:
/// lift, ridge (lift with a 10% cos(pi y) modulation), edge (v(x) w(L y),
/// w(t) = cos^2(pi t / 2) on [0, 1]) and seeded random modulations.
[[nodiscard]] std::vector<InitialGuess> product_initial_guesses(const ProductMesh& mesh, const Field& graph_state,
                                                                double width, const ExperimentOptions& options);

[[nodiscard]] SweepResult sweep_widths(const GraphSpec& graph, const Params& params, const std::vector<double>& widths,
                                       const ExperimentOptions& options);

/// CSV with columns exactly L,level,transverse_fraction,iterations,residual,converged.
[[nodiscard]] std::string sweep_csv(const std::vector<SweepRecord>& records);

struct LminResult {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double plateau_level = 0.0;
    /// level(upper) < plateau - 2 tol: the threshold is sharp.
    bool sharpness_confirmed = false;
    std::optional<double> predicted_width;
    std::vector<SweepRecord> evidence;
};

/// Bisection on "the best start has transverse fraction > threshold".
/// Throws ValidationError when the bracket does not straddle the transition.
[[nodiscard]] LminResult detect_lmin(const GraphSpec& graph, const Params& params, double lower, double upper,
                                     const ExperimentOptions& options, double threshold = 1e-6,
                                     double width_tol = 1e-2);

// ---------------------------------------------------------------------------
// omega monotonicity

struct OmegaScanRow {
    double omega = 0.0;
    double level = 0.0;
    bool converged = false;
};

struct OmegaScan {
    std::vector<OmegaScanRow> rows;
    std::vector<std::string> violations;

    [[nodiscard]] bool strictly_increasing() const noexcept { return violations.empty(); }
};

[[nodiscard]] OmegaScan omega_monotonicity_scan(const GraphSpec& graph, double p, const std::vector<double>& omegas,
                                                const ExperimentOptions& options);
[[nodiscard]] OmegaScan omega_monotonicity_scan(const Book& book, double p, const std::vector<double>& omegas,
                                                const ExperimentOptions& options,
                                                std::optional<double> truncation = std::nullopt);

// ---------------------------------------------------------------------------
// Books

struct BookGroundState {
    BookMesh mesh;
    MultiStartResult result;

    [[nodiscard]] const Field& field() const noexcept { return result.best.field; }
    [[nodiscard]] double level() const noexcept { return result.best.report.level; }
};

/// Envelope sech(sqrt(omega) d), d the distance to the finite end along each
/// truncated axis (0 on untruncated pages): keeps guesses away from the
/// artificial far sides.
[[nodiscard]] Vector core_envelope(const BookMesh& mesh, double omega);

/// "core" (the envelope) plus seeded random modulations of it.
[[nodiscard]] std::vector<InitialGuess> book_initial_guesses(const BookMesh& mesh, double omega,
                                                             const ExperimentOptions& options);

/// Averages the values of interchangeable pages (same size, same shared
/// bindings on the same sides, otherwise private bindings). The result stays a
/// critical point of the action (symmetric criticality), so symmetric
/// critical points such as the star's centred state can be computed.
[[nodiscard]] std::function<void(Vector&)> page_symmetry_projection(const BookMesh& mesh);

/// Truncates (when needed) at `truncation`, meshes and solves a physical
/// ground state (Params::width must be empty).
[[nodiscard]] BookGroundState book_ground_state(const Book& book, const Params& params,
                                                const ExperimentOptions& options,
                                                std::optional<double> truncation = std::nullopt,
                                                bool page_symmetric = false);

struct DecayFit {
    std::string page;
    Axis axis = Axis::X;
    double x0 = 0.0;
    double x1 = 0.0;
    double rate = 0.0;
    double bound = 0.0;
    double margin = 0.0;
};

/// Least-squares slope of log max|u| along the truncated axis over [x0, x1].
/// Default window [0.2 T, 0.7 T], cut back to the last node above 1e-14 when
/// the tail reaches round-off; windows closer than 0.1 T to either end are
/// rejected. Throws ValidationError("numerical floor") if the profile drops
/// below 1e-14 inside an explicit window (or too early for the default one).
[[nodiscard]] DecayFit decay_fit(const BookMesh& mesh, const Vector& u, const std::string& page, double omega,
                                 std::optional<std::pair<double, double>> window = std::nullopt);

/// One fit per truncated page.
[[nodiscard]] std::vector<DecayFit> decay_fits(const BookMesh& mesh, const Vector& u, double omega,
                                               std::optional<std::pair<double, double>> window = std::nullopt);

struct ExistenceReport {
    double level = 0.0;
    double strip_width = 0.0;
    double strip_level = 0.0;
    bool converged = false;
    /// "satisfied" (level < strip level), "not satisfied" or "inconclusive"
    /// (|level - strip level| <= 4 tol * strip level).
    std::string verdict;
};

/// Compares the ground-state level of a finite non-compact book (truncated at
/// `truncation`) with the level of the widest half-strip's full strip,
/// computed on truncated_line(2 * truncation) x [0, 1] at that width.
[[nodiscard]] ExistenceReport existence_report(const Book& book, const Params& params, double truncation,
                                               const ExperimentOptions& options);

struct WidthBoundRow {
    double width = 0.0;
    double level = 0.0;
    double scaled_level = 0.0; // level * sqrt(L)
    double test_function_level = 0.0;
    bool converged = false;
};

struct WidthBoundCheck {
    std::vector<WidthBoundRow> rows;
    double plateau_level = 0.0;
    /// c_p ||v||_{p+1}^{p+1} ||w||_{p+1}^{p+1}, v the graph ground state.
    double test_function_constant = 0.0;
    bool decreasing = false;
    bool within_factor = false;
    bool below_plateau = false;
    bool below_test_function = false;
    std::vector<std::string> violations;
};

/// ||w||_{q}^{q} for w(t) = cos^2(pi t / 2) on [0, 1].
[[nodiscard]] double test_profile_power(double q);

[[nodiscard]] WidthBoundCheck large_width_bound_check(const GraphSpec& graph, const Params& params,
                                                      const std::vector<double>& widths,
                                                      const ExperimentOptions& options, double factor = 3.0);

} // namespace openbook
