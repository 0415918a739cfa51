#include "openbook/spec_io.hpp"

#include "openbook/error.hpp"
#include "openbook/format.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <type_traits>

namespace openbook {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what)
{
    throw ValidationError(path + ": " + what);
}

const Json& member(const Json& obj, const std::string& key, const std::string& path)
{
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, "missing key \"" + key + "\"");
    return *it;
}

std::string string_at(const Json& obj, const std::string& key, const std::string& path)
{
    const auto& v = member(obj, key, path);
    if (!v.is_string()) schema_error(path + "." + key, "expected a string");
    return v.get<std::string>();
}

double length_value(const Json& v, const std::string& path)
{
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "Infinity") return kInfinity;
        schema_error(path, "expected a number or \"inf\", got \"" + s + "\"");
    }
    if (!v.is_number()) schema_error(path, "expected a number or \"inf\"");
    return v.get<double>();
}

double length_at(const Json& obj, const std::string& key, const std::string& path)
{
    return length_value(member(obj, key, path), path + "." + key);
}

const Json& array_at(const Json& obj, const std::string& key, const std::string& path)
{
    const auto& v = member(obj, key, path);
    if (!v.is_array()) schema_error(path + "." + key, "expected an array");
    return v;
}

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

Json length_json(double length)
{
    if (is_infinite(length)) return "inf";
    return length;
}

Book parse_book(const Json& doc)
{
    Book book;
    const auto& pages = array_at(doc, "pages", "$");
    for (std::size_t i = 0; i < pages.size(); ++i) {
        const auto path = index_path("$.pages", i);
        if (!pages[i].is_object()) schema_error(path, "expected an object");
        book.pages.push_back({string_at(pages[i], "id", path), length_at(pages[i], "lx", path),
                              length_at(pages[i], "ly", path)});
    }
    const auto& bindings = array_at(doc, "bindings", "$");
    for (std::size_t i = 0; i < bindings.size(); ++i) {
        const auto path = index_path("$.bindings", i);
        if (!bindings[i].is_object()) schema_error(path, "expected an object");
        book.bindings.push_back({string_at(bindings[i], "id", path), length_at(bindings[i], "length", path)});
    }
    const auto& attachments = array_at(doc, "attachments", "$");
    for (std::size_t i = 0; i < attachments.size(); ++i) {
        const auto path = index_path("$.attachments", i);
        const auto& a = attachments[i];
        if (!a.is_object()) schema_error(path, "expected an object");
        Attachment att;
        att.page = string_at(a, "page", path);
        if (!book.find_page(att.page)) schema_error(path + ".page", "unknown page \"" + att.page + "\"");
        const auto side = parse_side(string_at(a, "side", path));
        if (!side) schema_error(path + ".side", "expected South, North, West or East");
        att.side = *side;
        att.binding = string_at(a, "binding", path);
        if (!book.find_binding(att.binding)) schema_error(path + ".binding", "unknown binding \"" + att.binding + "\"");
        if (a.contains("orientation")) {
            const auto o = parse_orientation(string_at(a, "orientation", path));
            if (!o) schema_error(path + ".orientation", "expected forward or reversed");
            att.orientation = *o;
        }
        book.attachments.push_back(att);
    }
    if (doc.contains("truncations")) {
        const auto& truncations = array_at(doc, "truncations", "$");
        for (std::size_t i = 0; i < truncations.size(); ++i) {
            const auto path = index_path("$.truncations", i);
            const auto axis = string_at(truncations[i], "axis", path);
            if (axis != "x" && axis != "y") schema_error(path + ".axis", "expected x or y");
            book.truncations.push_back({string_at(truncations[i], "page", path), axis == "x" ? Axis::X : Axis::Y,
                                        length_at(truncations[i], "length", path)});
        }
    }
    require_valid(book);
    return book;
}

GraphSpec parse_graph(const Json& doc)
{
    GraphSpec graph;
    const auto& vertices = array_at(doc, "vertices", "$");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (!vertices[i].is_string()) schema_error(index_path("$.vertices", i), "expected a string");
        graph.vertices.push_back(vertices[i].get<std::string>());
    }
    const auto& edges = array_at(doc, "edges", "$");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto path = index_path("$.edges", i);
        const auto& e = edges[i];
        if (!e.is_object()) schema_error(path, "expected an object");
        GraphEdge edge;
        edge.id = string_at(e, "id", path);
        edge.from = string_at(e, "from", path);
        if (e.contains("to") && !e["to"].is_null()) edge.to = string_at(e, "to", path);
        edge.length = length_at(e, "length", path);
        for (const auto* end : {&edge.from, &edge.to}) {
            if (end->empty()) continue;
            if (!graph.vertex_index(*end)) {
                schema_error(path + (end == &edge.from ? ".from" : ".to"), "unknown vertex \"" + *end + "\"");
            }
        }
        graph.edges.push_back(edge);
    }
    if (doc.contains("truncated_ends")) {
        for (const auto& v : array_at(doc, "truncated_ends", "$")) graph.truncated_ends.push_back(v.get<std::string>());
    }
    const auto report = validate_graph(graph);
    if (!report.ok()) throw ValidationError("invalid graph: " + report.summary());
    return graph;
}

Json book_json(const Book& book)
{
    Json doc;
    doc["pages"] = Json::array();
    for (const auto& p : book.pages) doc["pages"].push_back({{"id", p.id}, {"lx", length_json(p.lx)}, {"ly", length_json(p.ly)}});
    doc["bindings"] = Json::array();
    for (const auto& b : book.bindings) doc["bindings"].push_back({{"id", b.id}, {"length", length_json(b.length)}});
    doc["attachments"] = Json::array();
    for (const auto& a : book.attachments) {
        doc["attachments"].push_back({{"page", a.page},
                                      {"side", std::string(to_string(a.side))},
                                      {"binding", a.binding},
                                      {"orientation", std::string(to_string(a.orientation))}});
    }
    if (!book.truncations.empty()) {
        doc["truncations"] = Json::array();
        for (const auto& t : book.truncations) {
            doc["truncations"].push_back(
                {{"page", t.page}, {"axis", std::string(to_string(t.axis))}, {"length", length_json(t.length)}});
        }
    }
    return doc;
}

Json graph_json(const GraphSpec& graph)
{
    Json doc;
    doc["vertices"] = graph.vertices;
    doc["edges"] = Json::array();
    for (const auto& e : graph.edges) {
        Json edge{{"id", e.id}, {"from", e.from}};
        edge["to"] = e.is_half_line() ? Json(nullptr) : Json(e.to);
        edge["length"] = length_json(e.length);
        doc["edges"].push_back(edge);
    }
    if (!graph.truncated_ends.empty()) doc["truncated_ends"] = graph.truncated_ends;
    return doc;
}

double parse_number(std::string_view text, const std::string& what)
{
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError(what + ": cannot parse \"" + std::string(text) + "\" as a number");
    }
    return value;
}

void emit(const RunConfig& config, std::ostream& out, const std::string& text)
{
    if (config.out.empty()) {
        out << text;
        return;
    }
    write_file(config.out, text);
}

std::string dump_path(const std::string& out, const std::string& page)
{
    std::string stem = out;
    if (const auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos) {
        stem.resize(dot);
    }
    std::string safe;
    for (char c : page) safe += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return stem + "." + safe + ".csv";
}

Json report_json(const SolveReport& report) { return Json::parse(to_json(report)); }

ExperimentOptions experiment_options(const RunConfig& c)
{
    ExperimentOptions o;
    o.h = c.h;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    o.seed = c.seed;
    return o;
}

const GraphSpec& need_graph(const Spec& spec, std::string_view command)
{
    if (!std::holds_alternative<GraphSpec>(spec)) {
        throw ValidationError(std::string(command) + " needs a graph specification");
    }
    return std::get<GraphSpec>(spec);
}

const Book& need_book(const Spec& spec, std::string_view command)
{
    if (!std::holds_alternative<Book>(spec)) throw ValidationError(std::string(command) + " needs a book specification");
    return std::get<Book>(spec);
}

double truncation_for(const RunConfig& c) { return c.truncate.value_or(default_truncation(c.omega)); }

int run_spectrum(const RunConfig& c, const Spec& spec, std::ostream& out)
{
    Json doc;
    std::vector<EigenPair> pairs;
    EigenOptions eig;
    eig.seed = c.seed;
    if (const auto* book = std::get_if<Book>(&spec)) {
        const Book finite = book->is_compact() ? *book : truncate_book(*book, truncation_for(c));
        const auto mesh = mesh_book(finite, c.h);
        doc["dof_count"] = mesh.dofs.dof_count;
        pairs = spectral_bottom(mesh.ops, c.k, eig);
    } else {
        const auto& graph = std::get<GraphSpec>(spec);
        const GraphSpec finite = graph.is_finite_length() ? graph : truncate_graph(graph, truncation_for(c));
        const auto disc = assemble_graph_operators(finite, c.h);
        doc["dof_count"] = disc.mesh.dof_count;
        pairs = spectral_bottom(disc.ops, c.k, eig);
    }
    doc["h"] = c.h;
    doc["eigenvalues"] = Json::array();
    for (const auto& pr : pairs) doc["eigenvalues"].push_back(pr.value);
    emit(c, out, doc.dump(2) + "\n");
    return kExitOk;
}

int run_solve(const RunConfig& c, const Spec& spec, std::ostream& out)
{
    const auto options = experiment_options(c);
    const Params params{c.omega, c.p, std::nullopt};
    Json doc;
    std::vector<std::pair<std::string, std::string>> dumps;
    SolveReport report;
    if (const auto* book = std::get_if<Book>(&spec)) {
        if (c.width) throw ValidationError("--L applies to graph inputs only");
        const auto gs = book_ground_state(*book, params, options, c.truncate);
        report = gs.result.best.report;
        for (std::size_t pg = 0; pg < gs.mesh.book.pages.size(); ++pg) {
            dumps.emplace_back(gs.mesh.book.pages[pg].id, page_field_csv(gs.mesh, pg, gs.field().values));
        }
    } else {
        const auto& graph = std::get<GraphSpec>(spec);
        const auto base = graph_ground_state(graph, params, options);
        if (!c.width) {
            report = base.result.best.report;
            for (std::size_t e = 0; e < base.discretization.graph.edges.size(); ++e) {
                dumps.emplace_back(base.discretization.graph.edges[e].id,
                                   graph_field_csv(base.discretization, e, base.field().values));
            }
        } else {
            const double L = *c.width;
            const auto mesh = mesh_product(base.discretization.graph, 1.0, c.h, transverse_nodes_for(L, c.h));
            Params rescaled = params;
            rescaled.width = L;
            GroundStateSolver solver(mesh.book.ops, rescaled);
            const auto result = run_multi_start(solver, product_initial_guesses(mesh, base.field(), L, options),
                                                options.solve_options());
            report = result.best.report;
            for (std::size_t pg = 0; pg < mesh.book.book.pages.size(); ++pg) {
                dumps.emplace_back(mesh.book.book.pages[pg].id, page_field_csv(mesh.book, pg, result.best.field.values));
            }
            doc["L"] = L;
        }
    }
    doc["report"] = report_json(report);
    doc["fields"] = Json::array();
    if (!c.out.empty()) {
        for (const auto& [page, csv] : dumps) {
            const auto path = dump_path(c.out, page);
            write_file(path, csv);
            doc["fields"].push_back(path);
        }
    }
    emit(c, out, doc.dump(2) + "\n");
    return report.converged ? kExitOk : kExitNoConvergence;
}

int run_sweep(const RunConfig& c, const Spec& spec, std::ostream& out)
{
    const auto& graph = need_graph(spec, "sweep");
    std::vector<double> widths = c.widths;
    if (widths.empty() && c.width) widths.push_back(*c.width);
    if (widths.empty()) throw ValidationError("sweep needs --widths a:b:n or --L");
    const auto result = sweep_widths(graph, Params{c.omega, c.p, std::nullopt}, widths, experiment_options(c));
    std::vector<SweepRecord> rows{result.reference};
    rows.insert(rows.end(), result.records.begin(), result.records.end());
    emit(c, out, sweep_csv(rows));
    for (const auto& r : rows) {
        if (!r.converged) return kExitNoConvergence;
    }
    return kExitOk;
}

int run_lmin(const RunConfig& c, const Spec& spec, std::ostream& out)
{
    const auto& graph = need_graph(spec, "lmin");
    if (!c.bracket) throw ValidationError("lmin needs --bracket lo,hi");
    const auto r = detect_lmin(graph, Params{c.omega, c.p, std::nullopt}, c.bracket->first, c.bracket->second,
                               experiment_options(c));
    Json doc;
    doc["estimate"] = r.estimate;
    doc["bracket"] = {r.lower, r.upper};
    doc["plateau_level"] = r.plateau_level;
    doc["sharpness_confirmed"] = r.sharpness_confirmed;
    doc["predicted_width"] = r.predicted_width ? Json(*r.predicted_width) : Json(nullptr);
    doc["evidence"] = sweep_csv(r.evidence);
    emit(c, out, doc.dump(2) + "\n");
    return kExitOk;
}

int run_decay(const RunConfig& c, const Spec& spec, std::ostream& out)
{
    const auto& book = need_book(spec, "decay");
    if (book.is_compact()) throw ValidationError("decay needs a book with semi-infinite pages");
    const double T = truncation_for(c);
    const auto gs = book_ground_state(book, Params{c.omega, c.p, std::nullopt}, experiment_options(c), T);
    Json doc;
    doc["truncation"] = T;
    doc["level"] = gs.level();
    doc["converged"] = gs.result.best.report.converged;
    doc["fits"] = Json::array();
    for (const auto& f : decay_fits(gs.mesh, gs.field().values, c.omega, c.window)) {
        doc["fits"].push_back({{"page", f.page},
                               {"axis", std::string(to_string(f.axis))},
                               {"x0", f.x0},
                               {"x1", f.x1},
                               {"rate", f.rate},
                               {"bound", f.bound},
                               {"margin", f.margin}});
    }
    emit(c, out, doc.dump(2) + "\n");
    return gs.result.best.report.converged ? kExitOk : kExitNoConvergence;
}

int run_report(const RunConfig& c, const Spec& spec, std::ostream& out)
{
    const auto& book = need_book(spec, "report");
    const double T = truncation_for(c);
    const auto r = existence_report(book, Params{c.omega, c.p, std::nullopt}, T, experiment_options(c));
    Json doc;
    doc["truncation"] = T;
    doc["level"] = r.level;
    doc["strip_width"] = r.strip_width;
    doc["strip_level"] = r.strip_level;
    doc["converged"] = r.converged;
    doc["condition"] = r.verdict;
    emit(c, out, doc.dump(2) + "\n");
    return r.converged ? kExitOk : kExitNoConvergence;
}

} // namespace

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path + " for writing");
    file << text;
    if (!file) throw IoError("failed writing " + path);
}

Spec parse_book_spec(std::string_view text)
{
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("$: malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) schema_error("$", "expected an object");
    const bool is_book = doc.contains("pages");
    const bool is_graph = doc.contains("edges") || doc.contains("vertices");
    if (is_book == is_graph) schema_error("$", "expected either \"pages\" (book) or \"vertices\"/\"edges\" (graph)");
    if (is_book) return parse_book(doc);
    return parse_graph(doc);
}

std::string serialize_book(const Book& book) { return book_json(book).dump(2); }
std::string serialize_graph(const GraphSpec& graph) { return graph_json(graph).dump(2); }

std::string serialize_spec(const Spec& spec)
{
    return std::visit([](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Book>) {
            return serialize_book(s);
        } else {
            return serialize_graph(s);
        }
    }, spec);
}

Spec load_spec(const std::string& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    if (file.bad()) throw IoError("failed reading " + path);
    return parse_book_spec(buffer.str());
}

std::optional<Command> parse_command(std::string_view name) noexcept
{
    if (name == "spectrum") return Command::Spectrum;
    if (name == "solve") return Command::Solve;
    if (name == "sweep") return Command::Sweep;
    if (name == "lmin") return Command::Lmin;
    if (name == "decay") return Command::Decay;
    if (name == "report") return Command::Report;
    return std::nullopt;
}

std::string_view to_string(Command command) noexcept
{
    switch (command) {
    case Command::Spectrum: return "spectrum";
    case Command::Solve: return "solve";
    case Command::Sweep: return "sweep";
    case Command::Lmin: return "lmin";
    case Command::Decay: return "decay";
    case Command::Report: return "report";
    }
    return "?";
}

std::vector<double> parse_width_list(std::string_view text)
{
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw ValidationError("--widths: expected a:b:n");
    const double a = parse_number(text.substr(0, c1), "--widths");
    const double b = parse_number(text.substr(c1 + 1, c2 - c1 - 1), "--widths");
    const double n_real = parse_number(text.substr(c2 + 1), "--widths");
    const int n = static_cast<int>(n_real);
    if (n != n_real || n < 1) throw ValidationError("--widths: n must be a positive integer");
    if (n == 1 && a != b) throw ValidationError("--widths: a single value needs a == b");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    if (n > 1) out.back() = b;
    return out;
}

std::pair<double, double> parse_pair(std::string_view text)
{
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw ValidationError("expected lo,hi");
    return {parse_number(text.substr(0, comma), "pair"), parse_number(text.substr(comma + 1), "pair")};
}

void validate_config(const RunConfig& c)
{
    if (!(c.omega > 0.0) || !std::isfinite(c.omega)) throw ValidationError("--omega must be positive");
    if (!(c.p > 1.0) || !std::isfinite(c.p)) throw ValidationError("--p must exceed 1");
    if (!(c.h > 0.0) || !std::isfinite(c.h)) throw ValidationError("--h must be positive");
    if (!(c.tol > 0.0)) throw ValidationError("--tol must be positive");
    if (c.width && (!(*c.width > 0.0) || !std::isfinite(*c.width))) throw ValidationError("--L must be positive");
    for (std::size_t i = 0; i < c.widths.size(); ++i) {
        if (!(c.widths[i] > 0.0) || !std::isfinite(c.widths[i])) throw ValidationError("--widths must be positive");
        if (i > 0 && !(c.widths[i] > c.widths[i - 1])) throw ValidationError("--widths must be ascending");
    }
    if (c.bracket && !(c.bracket->first > 0.0 && c.bracket->second > c.bracket->first)) {
        throw ValidationError("--bracket needs 0 < lo < hi");
    }
    if (c.truncate && (!(*c.truncate > 0.0) || !std::isfinite(*c.truncate))) {
        throw ValidationError("--truncate must be positive");
    }
    if (c.k < 1) throw ValidationError("--k must be positive");
    if (c.max_iter < 1) throw ValidationError("--max-iter must be positive");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        validate_config(config);
        if (config.input.empty()) throw ValidationError("--input is required");
        const Spec spec = load_spec(config.input);
        switch (config.command) {
        case Command::Spectrum: return run_spectrum(config, spec, out);
        case Command::Solve: return run_solve(config, spec, out);
        case Command::Sweep: return run_sweep(config, spec, out);
        case Command::Lmin: return run_lmin(config, spec, out);
        case Command::Decay: return run_decay(config, spec, out);
        case Command::Report: return run_report(config, spec, out);
        }
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NoConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNoConvergence;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNoConvergence;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

std::string graph_field_csv(const GraphDiscretization& disc, std::size_t edge, const Vector& u)
{
    const auto& ids = disc.mesh.edge_dofs.at(edge);
    std::ostringstream out;
    out << "page_id,nx,ny,hx,hy\n";
    out << disc.graph.edges[edge].id << ',' << ids.size() << ",1," << format_double(disc.mesh.edge_h[edge]) << ",0\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) out << ',';
        out << format_double(u[ids[i]]);
    }
    out << '\n';
    return out.str();
}

} // namespace openbook
