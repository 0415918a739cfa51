#pragma once

// Book/graph specifications in JSON and the command runner behind the
// `openbook` executable.
//
//   {"pages": [{"id", "lx", "ly"}], "bindings": [{"id", "length"}],
//    "attachments": [{"page", "side", "binding", "orientation"}]}
//   {"vertices": ["a", ...], "edges": [{"id", "from", "to", "length"}]}
//
// Lengths are numbers or the string "inf". A half-line edge omits "to" (or
// sets it to null).

#include "openbook/experiments.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace openbook {

using Spec = std::variant<Book, GraphSpec>;

/// Throws ValidationError with a JSON path ("$.pages[1].lx: ...") on schema
/// errors; topology violations are passed through.
[[nodiscard]] Spec parse_book_spec(std::string_view text);

[[nodiscard]] std::string serialize_book(const Book& book);
[[nodiscard]] std::string serialize_graph(const GraphSpec& graph);
[[nodiscard]] std::string serialize_spec(const Spec& spec);

[[nodiscard]] Spec load_spec(const std::string& path);

/// Throws IoError.
void write_file(const std::string& path, const std::string& text);

enum class Command { Spectrum, Solve, Sweep, Lmin, Decay, Report };

[[nodiscard]] std::optional<Command> parse_command(std::string_view name) noexcept;
[[nodiscard]] std::string_view to_string(Command command) noexcept;

struct RunConfig {
    Command command = Command::Solve;
    std::string input;
    double omega = 1.0;
    double p = 3.0;
    std::optional<double> width;
    std::vector<double> widths;
    std::optional<std::pair<double, double>> bracket;
    double h = 0.1;
    double tol = 1e-8;
    std::optional<double> truncate;
    std::uint64_t seed = 1;
    /// Output file; empty writes to the given stream.
    std::string out;
    /// Eigenpairs requested by `spectrum`.
    int k = 4;
    /// Fit window of `decay`.
    std::optional<std::pair<double, double>> window;
    int max_iter = 4000;
};

/// "a:b:n": n equally spaced values from a to b inclusive.
[[nodiscard]] std::vector<double> parse_width_list(std::string_view text);
/// "lo,hi".
[[nodiscard]] std::pair<double, double> parse_pair(std::string_view text);

/// Throws ValidationError on omega <= 0, p <= 1, h <= 0, tol <= 0, unsorted widths.
void validate_config(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitIo = 4;

/// Runs one command. Results go to config.out (or `out`), diagnostics to `err`.
[[nodiscard]] int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Field dump of a graph state: one block per edge in the page format with ny = 1.
[[nodiscard]] std::string graph_field_csv(const GraphDiscretization& disc, std::size_t edge, const Vector& u);

} // namespace openbook
