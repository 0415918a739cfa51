#include "openbook/experiments.hpp"

#include "openbook/error.hpp"
#include "openbook/format.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace openbook {

namespace {

const double kPi = std::acos(-1.0);

void require_positive_omega(double omega)
{
    if (!(omega > 0.0)) {
        throw ValidationError("omega must exceed the spectral bottom (0): no ground state for omega <= 0");
    }
}

// Shortest mesh distance from `source` to every graph dof.
std::vector<double> mesh_distances(const GraphMesh& mesh, int source)
{
    std::vector<std::vector<std::pair<int, double>>> adjacency(static_cast<std::size_t>(mesh.dof_count));
    for (std::size_t e = 0; e < mesh.edge_dofs.size(); ++e) {
        const auto& ids = mesh.edge_dofs[e];
        for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
            adjacency[static_cast<std::size_t>(ids[k])].emplace_back(ids[k + 1], mesh.edge_h[e]);
            adjacency[static_cast<std::size_t>(ids[k + 1])].emplace_back(ids[k], mesh.edge_h[e]);
        }
    }
    std::vector<double> dist(static_cast<std::size_t>(mesh.dof_count), kInfinity);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[static_cast<std::size_t>(source)] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        const auto [d, v] = queue.top();
        queue.pop();
        if (d > dist[static_cast<std::size_t>(v)]) continue;
        for (const auto& [w, len] : adjacency[static_cast<std::size_t>(v)]) {
            if (d + len < dist[static_cast<std::size_t>(w)]) {
                dist[static_cast<std::size_t>(w)] = d + len;
                queue.emplace(d + len, w);
            }
        }
    }
    return dist;
}

Vector bump(const GraphMesh& mesh, int centre, double omega)
{
    const auto dist = mesh_distances(mesh, centre);
    Vector v(mesh.dof_count);
    for (int i = 0; i < mesh.dof_count; ++i) {
        const double d = dist[static_cast<std::size_t>(i)];
        v[i] = std::isfinite(d) ? 1.0 / std::cosh(std::sqrt(omega) * d) : 0.0;
    }
    return v;
}

SweepRecord record_from(const MultiStartResult& result, double width)
{
    SweepRecord rec;
    rec.width = width;
    const auto& r = result.best.report;
    rec.level = r.level;
    rec.transverse_fraction = r.transverse_fraction.value_or(0.0);
    rec.iterations = r.iterations;
    rec.residual = r.equation_residual;
    rec.converged = r.converged;
    rec.best_label = r.init_label;
    for (const auto& run : result.runs) {
        rec.branches.push_back(run.report.init_label + "=" + format_double(run.report.level));
    }
    return rec;
}

struct WidthSolve {
    ProductMesh mesh;
    MultiStartResult result;
};

WidthSolve solve_width(const GraphSpec& graph, const Params& params, double width, int ny, const Field& graph_state,
                       const ExperimentOptions& options, const WidthSolve* warm = nullptr)
{
    WidthSolve out;
    out.mesh = mesh_product(graph, 1.0, options.h, ny);
    Params rescaled = params;
    rescaled.width = width;
    auto inits = product_initial_guesses(out.mesh, graph_state, width, options);
    if (warm != nullptr) {
        const auto& prev = warm->mesh;
        if (prev.graph.mesh.dof_count == out.mesh.graph.mesh.dof_count) {
            inits.push_back({"warm", resample_transverse(warm->result.best.field, prev, out.mesh)});
        }
    }
    GroundStateSolver solver(out.mesh.book.ops, rescaled);
    out.result = run_multi_start(solver, inits, options.solve_options());
    return out;
}

GraphSpec finite_graph(const GraphSpec& graph, double omega)
{
    return graph.is_finite_length() ? graph : truncate_graph(graph, default_truncation(omega));
}

void check_graph_params(const Params& params)
{
    check_params(params);
    if (params.width) throw ValidationError("graph problems take no width");
    require_positive_omega(params.omega);
}

} // namespace

SolveOptions ExperimentOptions::solve_options() const
{
    if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("mesh size h must be positive and finite");
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    if (max_iter < 1) throw ValidationError("max_iter must be positive");
    SolveOptions s;
    s.tol = tol;
    s.max_iter = max_iter;
    return s;
}

double default_truncation(double omega)
{
    require_positive_omega(omega);
    return 4.0 / std::sqrt(omega) * std::log(1e8);
}

std::vector<InitialGuess> graph_initial_guesses(const GraphDiscretization& disc, double omega,
                                                const ExperimentOptions& options)
{
    require_positive_omega(omega);
    const auto& g = disc.graph;
    const auto& mesh = disc.mesh;
    const std::set<std::string> far(g.truncated_ends.begin(), g.truncated_ends.end());
    std::vector<InitialGuess> out;
    for (std::size_t v = 0; v < g.vertices.size(); ++v) {
        if (mesh.vertex_dofs[v] < 0 || far.contains(g.vertices[v])) continue;
        out.push_back({"vertex:" + g.vertices[v], Field{bump(mesh, mesh.vertex_dofs[v], omega)}});
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto& edge = g.edges[e];
        if (far.contains(edge.to) || far.contains(edge.from)) continue;
        const auto& ids = mesh.edge_dofs[e];
        if (ids.size() < 3) continue;
        out.push_back({"edge:" + edge.id, Field{bump(mesh, ids[ids.size() / 2], omega)}});
    }
    if (far.empty()) {
        for (int k = 0; k < options.random_starts; ++k) {
            const Vector noise = seeded_noise(mesh.dof_count, options.seed + static_cast<std::uint64_t>(k));
            out.push_back({"random:" + std::to_string(options.seed + static_cast<std::uint64_t>(k)),
                           Field{Vector::Ones(mesh.dof_count) + 0.5 * noise}});
        }
    }
    if (out.empty()) throw ValidationError("graph has no admissible bump centre");
    return out;
}

GraphGroundState graph_ground_state(const GraphSpec& graph, const Params& params, const ExperimentOptions& options)
{
    check_graph_params(params);
    GraphGroundState out;
    out.discretization = assemble_graph_operators(finite_graph(graph, params.omega), options.h);
    const auto inits = graph_initial_guesses(out.discretization, params.omega, options);
    GroundStateSolver solver(out.discretization.ops, params);
    out.result = run_multi_start(solver, inits, options.solve_options());
    return out;
}

double reference_line_level(double omega, double p, double length, const ExperimentOptions& options)
{
    require_positive_omega(omega);
    if (!(std::exp(-std::sqrt(omega) * length / 4.0) < 1e-8)) {
        throw ValidationError("reference_line_level: truncation " + format_double(length)
                              + " too short, need exp(-sqrt(omega) T / 4) < 1e-8");
    }
    const auto gs = graph_ground_state(graphs::truncated_line(length), Params{omega, p, std::nullopt}, options);
    if (!gs.result.best.report.converged) throw ConvergenceError("reference_line_level: no convergence");
    return gs.level();
}

int transverse_nodes_for(double width, double h) { return node_count(std::max(1.0, width), h); }

std::vector<InitialGuess> product_initial_guesses(const ProductMesh& mesh, const Field& graph_state, double width,
                                                  const ExperimentOptions& options)
{
    const Field lift = lift_graph_field(graph_state, mesh);
    const int ny = mesh.transverse_nodes;
    const int n = mesh.book.dofs.dof_count;
    Vector ridge(n);
    Vector edge(n);
    for (int d = 0; d < n; ++d) {
        const double y = static_cast<double>(mesh.transverse_index[static_cast<std::size_t>(d)]) / (ny - 1);
        const double t = width * y;
        const double w = t < 1.0 ? std::pow(std::cos(0.5 * kPi * t), 2) : 0.0;
        ridge[d] = lift.values[d] * (1.0 + 0.1 * std::cos(kPi * y));
        edge[d] = lift.values[d] * w;
    }
    std::vector<InitialGuess> out{{"lift", lift}, {"ridge", Field{ridge}}, {"edge", Field{edge}}};
    for (int k = 0; k < options.random_starts; ++k) {
        const auto seed = options.seed + static_cast<std::uint64_t>(k);
        const Vector noise = seeded_noise(n, seed);
        out.push_back({"random:" + std::to_string(seed),
                       Field{lift.values.cwiseProduct(Vector::Ones(n) + 0.5 * noise)}});
    }
    return out;
}

SweepResult sweep_widths(const GraphSpec& graph, const Params& params, const std::vector<double>& widths,
                         const ExperimentOptions& options)
{
    check_graph_params(Params{params.omega, params.p, std::nullopt});
    for (double L : widths) {
        if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("widths must be positive and finite");
    }
    const Params physical{params.omega, params.p, std::nullopt};
    const auto base = graph_ground_state(graph, physical, options);
    SweepResult out;
    out.reference = record_from(base.result, 0.0);
    out.reference.transverse_fraction = 0.0;

    const GraphSpec finite = base.discretization.graph;
    std::optional<WidthSolve> previous;
    for (double L : widths) {
        auto solved = solve_width(finite, physical, L, transverse_nodes_for(L, options.h), base.field(), options,
                                  previous ? &*previous : nullptr);
        out.records.push_back(record_from(solved.result, L));
        previous = std::move(solved);
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRecord>& records)
{
    std::ostringstream out;
    out << "L,level,transverse_fraction,iterations,residual,converged\n";
    for (const auto& r : records) {
        out << format_double(r.width) << ',' << format_double(r.level) << ',' << format_double(r.transverse_fraction)
            << ',' << r.iterations << ',' << format_double(r.residual) << ',' << (r.converged ? "true" : "false")
            << '\n';
    }
    return out.str();
}

LminResult detect_lmin(const GraphSpec& graph, const Params& params, double lower, double upper,
                       const ExperimentOptions& options, double threshold, double width_tol)
{
    if (!(lower > 0.0) || !(upper > lower) || !std::isfinite(upper)) {
        throw ValidationError("detect_lmin: need 0 < lo < hi < inf");
    }
    if (!(width_tol > 0.0)) throw ValidationError("detect_lmin: width tolerance must be positive");
    const Params physical{params.omega, params.p, std::nullopt};
    const auto base = graph_ground_state(graph, physical, options);
    const GraphSpec finite = base.discretization.graph;

    LminResult out;
    out.plateau_level = base.level();
    out.predicted_width = linearized_smallest_eig(base.field(), base.discretization.ops, physical).predicted_width;

    auto probe = [&](double L) {
        const auto solved = solve_width(finite, physical, L, transverse_nodes_for(L, options.h), base.field(), options);
        MultiStartResult any = solved.result;
        any.best_index = select_best(any.runs, options.tol, false);
        any.best = any.runs[any.best_index];
        auto rec = record_from(any, L);
        out.evidence.push_back(rec);
        return rec;
    };

    const auto lo_rec = probe(lower);
    if (lo_rec.transverse_fraction > threshold) {
        throw ValidationError("detect_lmin: lower end " + format_double(lower) + " already shows transverse dependence");
    }
    auto hi_rec = probe(upper);
    if (!(hi_rec.transverse_fraction > threshold)) {
        throw ValidationError("detect_lmin: upper end " + format_double(upper) + " shows no transverse dependence");
    }
    while (upper - lower > width_tol) {
        const double mid = 0.5 * (lower + upper);
        const auto rec = probe(mid);
        if (rec.transverse_fraction > threshold) {
            upper = mid;
            hi_rec = rec;
        } else {
            lower = mid;
        }
    }
    out.lower = lower;
    out.upper = upper;
    out.estimate = 0.5 * (lower + upper);
    out.sharpness_confirmed = hi_rec.level < out.plateau_level * (1.0 - 2.0 * options.tol);
    return out;
}

namespace {

void fill_violations(OmegaScan& scan)
{
    for (std::size_t i = 1; i < scan.rows.size(); ++i) {
        const auto& a = scan.rows[i - 1];
        const auto& b = scan.rows[i];
        if (!(b.level > a.level)) {
            scan.violations.push_back("level(" + format_double(b.omega) + ") = " + format_double(b.level)
                                      + " <= level(" + format_double(a.omega) + ") = " + format_double(a.level));
        }
    }
}

void check_omegas(const std::vector<double>& omegas)
{
    if (omegas.empty()) throw ValidationError("omega scan: no omega values");
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        require_positive_omega(omegas[i]);
        if (i > 0 && !(omegas[i] > omegas[i - 1])) throw ValidationError("omega scan: omegas must increase");
    }
}

} // namespace

OmegaScan omega_monotonicity_scan(const GraphSpec& graph, double p, const std::vector<double>& omegas,
                                  const ExperimentOptions& options)
{
    check_omegas(omegas);
    const GraphSpec finite = finite_graph(graph, omegas.front());
    OmegaScan scan;
    for (double omega : omegas) {
        const auto gs = graph_ground_state(finite, Params{omega, p, std::nullopt}, options);
        scan.rows.push_back({omega, gs.level(), gs.result.best.report.converged});
    }
    fill_violations(scan);
    return scan;
}

OmegaScan omega_monotonicity_scan(const Book& book, double p, const std::vector<double>& omegas,
                                  const ExperimentOptions& options, std::optional<double> truncation)
{
    check_omegas(omegas);
    const double T = truncation.value_or(default_truncation(omegas.front()));
    OmegaScan scan;
    for (double omega : omegas) {
        const auto gs = book_ground_state(book, Params{omega, p, std::nullopt}, options, T);
        scan.rows.push_back({omega, gs.level(), gs.result.best.report.converged});
    }
    fill_violations(scan);
    return scan;
}

Vector core_envelope(const BookMesh& mesh, double omega)
{
    require_positive_omega(omega);
    const auto& book = mesh.book;
    Vector env = Vector::Zero(mesh.dofs.dof_count);
    for (std::size_t pg = 0; pg < book.pages.size(); ++pg) {
        bool along_x = false;
        bool along_y = false;
        for (const auto& t : book.truncations) {
            if (t.page != book.pages[pg].id) continue;
            (t.axis == Axis::X ? along_x : along_y) = true;
        }
        const auto& grid = mesh.plan.pages[pg];
        for (int j = 0; j < grid.ny; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                const double dx = along_x ? i * grid.hx : 0.0;
                const double dy = along_y ? j * grid.hy : 0.0;
                const double value = 1.0 / std::cosh(std::sqrt(omega) * std::hypot(dx, dy));
                const int d = mesh.dofs.at(pg, grid, i, j);
                env[d] = std::max(env[d], value);
            }
        }
    }
    return env;
}

std::vector<InitialGuess> book_initial_guesses(const BookMesh& mesh, double omega, const ExperimentOptions& options)
{
    const Vector env = core_envelope(mesh, omega);
    std::vector<InitialGuess> out{{"core", Field{env}}};
    const int n = mesh.dofs.dof_count;
    for (int k = 0; k < options.random_starts; ++k) {
        const auto seed = options.seed + static_cast<std::uint64_t>(k);
        const Vector noise = seeded_noise(n, seed);
        out.push_back({"random:" + std::to_string(seed), Field{env.cwiseProduct(Vector::Ones(n) + 0.5 * noise)}});
    }
    return out;
}

std::function<void(Vector&)> page_symmetry_projection(const BookMesh& mesh)
{
    const auto& book = mesh.book;
    std::map<std::string, int> uses;
    for (const auto& a : book.attachments) ++uses[a.binding];

    // Signature: grid size plus, per side, the shared binding (or "private").
    auto signature = [&](std::size_t pg) {
        const auto& grid = mesh.plan.pages[pg];
        std::string sig = std::to_string(grid.nx) + "x" + std::to_string(grid.ny);
        for (Side side : {Side::South, Side::North, Side::West, Side::East}) {
            const auto* a = book.attachment_at(book.pages[pg].id, side);
            sig += '|';
            if (a == nullptr) {
                sig += '-';
            } else if (uses[a->binding] > 1) {
                sig += a->binding + ":" + std::string(to_string(a->orientation));
            } else {
                sig += "private";
            }
        }
        return sig;
    };
    std::map<std::string, std::vector<std::size_t>> classes;
    for (std::size_t pg = 0; pg < book.pages.size(); ++pg) classes[signature(pg)].push_back(pg);

    std::vector<std::vector<std::vector<int>>> orbits; // class -> node -> dofs
    for (const auto& [sig, pages] : classes) {
        if (pages.size() < 2) continue;
        const auto& grid = mesh.plan.pages[pages.front()];
        std::vector<std::vector<int>> nodes(static_cast<std::size_t>(grid.nx * grid.ny));
        for (std::size_t pg : pages) {
            for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k].push_back(mesh.dofs.page_dofs[pg][k]);
        }
        orbits.push_back(std::move(nodes));
    }
    return [orbits = std::move(orbits)](Vector& u) {
        for (const auto& nodes : orbits) {
            for (const auto& dofs : nodes) {
                double sum = 0.0;
                for (int d : dofs) sum += u[d];
                const double mean = sum / static_cast<double>(dofs.size());
                for (int d : dofs) u[d] = mean;
            }
        }
    };
}

BookGroundState book_ground_state(const Book& book, const Params& params, const ExperimentOptions& options,
                                  std::optional<double> truncation, bool page_symmetric)
{
    check_graph_params(params);
    require_valid(book);
    if (!is_connected(book)) throw ValidationError("book is disconnected");
    Book finite = book;
    if (!book.is_compact()) finite = truncate_book(book, truncation.value_or(default_truncation(params.omega)));
    BookGroundState out;
    out.mesh = mesh_book(finite, options.h);
    auto solve = options.solve_options();
    if (page_symmetric) solve.constraint = page_symmetry_projection(out.mesh);
    GroundStateSolver solver(out.mesh.ops, params);
    out.result = run_multi_start(solver, book_initial_guesses(out.mesh, params.omega, options), solve);
    return out;
}

DecayFit decay_fit(const BookMesh& mesh, const Vector& u, const std::string& page, double omega,
                   std::optional<std::pair<double, double>> window)
{
    require_positive_omega(omega);
    const auto index = mesh.book.page_index(page);
    if (!index) throw ValidationError("decay_fit: unknown page " + page);
    const auto truncation = std::find_if(mesh.book.truncations.begin(), mesh.book.truncations.end(),
                                         [&](const Truncation& t) { return t.page == page; });
    if (truncation == mesh.book.truncations.end()) throw ValidationError("decay_fit: page " + page + " is not truncated");
    const double T = truncation->length;
    const auto [x0, x1] = window.value_or(std::pair{0.2 * T, 0.7 * T});
    if (!(x0 >= 0.1 * T - 1e-12) || !(x1 <= 0.9 * T + 1e-12) || !(x1 > x0)) {
        throw ValidationError("decay_fit: window must lie in [0.1 T, 0.9 T] with x0 < x1");
    }

    const auto& grid = mesh.plan.pages[*index];
    const bool along_x = truncation->axis == Axis::X;
    const int n_along = along_x ? grid.nx : grid.ny;
    const int n_across = along_x ? grid.ny : grid.nx;
    const double spacing = along_x ? grid.hx : grid.hy;
    std::vector<std::pair<double, double>> profile;
    for (int a = 0; a < n_along; ++a) {
        const double x = a * spacing;
        if (x < x0 - 1e-12 || x > x1 + 1e-12) continue;
        double peak = 0.0;
        for (int b = 0; b < n_across; ++b) {
            const int d = along_x ? mesh.dofs.at(*index, grid, a, b) : mesh.dofs.at(*index, grid, b, a);
            peak = std::max(peak, std::abs(u[d]));
        }
        if (peak < 1e-14) {
            // The default window is cut back to the last resolved node.
            if (!window && !profile.empty() && profile.back().first - x0 >= 0.1 * T) break;
            throw ValidationError("decay_fit: numerical floor reached at " + format_double(x) + " on page " + page
                                  + "; shrink the window");
        }
        profile.emplace_back(x, std::log(peak));
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto count = static_cast<double>(profile.size());
    for (const auto& [x, y] : profile) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    if (profile.size() < 3) throw ValidationError("decay_fit: fewer than three nodes in the window");
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    DecayFit fit;
    fit.page = page;
    fit.axis = truncation->axis;
    fit.x0 = x0;
    fit.x1 = profile.back().first;
    fit.rate = -slope;
    fit.bound = 0.5 * std::sqrt(omega);
    fit.margin = fit.rate - fit.bound;
    return fit;
}

std::vector<DecayFit> decay_fits(const BookMesh& mesh, const Vector& u, double omega,
                                 std::optional<std::pair<double, double>> window)
{
    std::vector<DecayFit> out;
    for (const auto& t : mesh.book.truncations) out.push_back(decay_fit(mesh, u, t.page, omega, window));
    return out;
}

ExistenceReport existence_report(const Book& book, const Params& params, double truncation,
                                 const ExperimentOptions& options)
{
    check_graph_params(params);
    require_valid(book);
    if (book.is_compact()) throw ValidationError("existence_report: book is compact; a ground state always exists");
    double widest = 0.0;
    for (const auto& pg : book.pages) {
        const bool ix = is_infinite(pg.lx);
        const bool iy = is_infinite(pg.ly);
        if (ix && iy) {
            throw ValidationError("existence_report: page " + pg.id
                                  + " is infinite in both directions; the half-strip comparison does not apply");
        }
        if (ix) widest = std::max(widest, pg.ly);
        if (iy) widest = std::max(widest, pg.lx);
    }
    if (!(widest > 0.0)) throw ValidationError("existence_report: no half-strip page");

    ExistenceReport rep;
    const auto gs = book_ground_state(book, params, options, truncation);
    rep.level = gs.level();
    rep.converged = gs.result.best.report.converged;
    rep.strip_width = widest;

    const GraphSpec line = graphs::truncated_line(2.0 * truncation);
    const auto line_state = graph_ground_state(line, params, options);
    const auto strip = solve_width(line_state.discretization.graph, params, widest, node_count(widest, options.h),
                                   line_state.field(), options);
    rep.strip_level = widest * strip.result.best.report.level;
    rep.converged = rep.converged && strip.result.best.report.converged;

    const double diff = rep.level - rep.strip_level;
    if (std::abs(diff) <= 4.0 * options.tol * rep.strip_level) {
        rep.verdict = "inconclusive";
    } else {
        rep.verdict = diff < 0.0 ? "satisfied" : "not satisfied";
    }
    return rep;
}

double test_profile_power(double q)
{
    if (!(q > 0.0)) throw ValidationError("test_profile_power: q must be positive");
    constexpr int n = 2000; // Simpson, even
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / n;
        const double f = std::pow(std::cos(0.5 * kPi * t), 2.0 * q);
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        sum += w * f;
    }
    return sum / (3.0 * n);
}

WidthBoundCheck large_width_bound_check(const GraphSpec& graph, const Params& params,
                                        const std::vector<double>& widths, const ExperimentOptions& options,
                                        double factor)
{
    if (!(factor >= 1.0)) throw ValidationError("large_width_bound_check: factor must be >= 1");
    const Params physical{params.omega, params.p, std::nullopt};
    const auto base = graph_ground_state(graph, physical, options);
    const auto sweep = sweep_widths(graph, physical, widths, options);

    WidthBoundCheck out;
    out.plateau_level = base.level();
    out.test_function_constant = nonlinearity_constant(params.p)
                                 * lumped_power_sum(base.discretization.ops, base.field().values, params.p + 1.0)
                                 * test_profile_power(params.p + 1.0);
    const GraphSpec finite = base.discretization.graph;
    for (const auto& rec : sweep.records) {
        WidthBoundRow row;
        row.width = rec.width;
        row.level = rec.level;
        row.scaled_level = rec.level * std::sqrt(rec.width);
        row.converged = rec.converged;
        const auto mesh = mesh_product(finite, 1.0, options.h, transverse_nodes_for(rec.width, options.h));
        Params rescaled = physical;
        rescaled.width = rec.width;
        const auto inits = product_initial_guesses(mesh, base.field(), rec.width, ExperimentOptions{options.h});
        const auto& edge = std::find_if(inits.begin(), inits.end(), [](const auto& g) { return g.label == "edge"; })->field;
        row.test_function_level = evaluate(nehari_project(edge, mesh.book.ops, rescaled).values, mesh.book.ops, rescaled).level;
        out.rows.push_back(row);
    }

    out.decreasing = out.below_plateau = out.within_factor = out.below_test_function = true;
    const double C = out.test_function_constant;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        const auto& r = out.rows[i];
        const std::string at = "L=" + format_double(r.width) + ": ";
        if (i > 0 && !(r.level < out.rows[i - 1].level)) {
            out.decreasing = false;
            out.violations.push_back(at + "level did not decrease");
        }
        if (!(r.level < out.plateau_level)) {
            out.below_plateau = false;
            out.violations.push_back(at + "level not below the one-dimensional level");
        }
        if (!(r.scaled_level >= C / factor && r.scaled_level <= factor * C)) {
            out.within_factor = false;
            out.violations.push_back(at + "level*sqrt(L) = " + format_double(r.scaled_level) + " outside ["
                                     + format_double(C / factor) + ", " + format_double(factor * C) + "]");
        }
        if (!(r.level <= r.test_function_level * (1.0 + 2.0 * options.tol))) {
            out.below_test_function = false;
            out.violations.push_back(at + "level above the test-function level");
        }
        if (!r.converged) out.violations.push_back(at + "not converged");
    }
    return out;
}

} // namespace openbook
