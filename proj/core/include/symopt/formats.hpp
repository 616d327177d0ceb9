#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symopt/abstraction.hpp"
#include "symopt/refine.hpp"
#include "symopt/synthesis.hpp"

namespace symopt {

/*
 * Text formats. Every writer is deterministic: numbers use the shortest
 * representation that reads back to the same double, and the only
 * run-dependent content is an optional leading "# generated ..." comment.
 *
 * STS1 (finite system)
 *   STS1
 *   # grid: <key> = <value>       optional metadata block
 *   states <N>
 *   inputs <M>
 *   initial <x> <x> ...
 *   t <x> <u> : <x'> <x'> ...     one line per enabled pair, ascending
 *
 * CTL1 (symbolic controller)
 *   CTL1
 *   states <N>
 *   inputs <M>
 *   c <x> <value> : <u> <u> ...   one line per winning state, ascending
 *
 * Lines starting with '#' are comments except for the grid block.
 */

/* shortest round-trip text of a double; "inf"/"-inf"/"nan" otherwise */
[[nodiscard]] std::string format_number(double v);
/* entry time or "inf" */
[[nodiscard]] std::string format_level(std::uint32_t v);

struct SystemFile {
  FiniteSystem system;
  std::optional<GridSpec> grid;
};

void write_system(std::ostream& out, const FiniteSystem& sys, const GridSpec* grid = nullptr);
/* throws ParseError with the line number */
[[nodiscard]] SystemFile read_system(std::istream& in);

void write_controller(std::ostream& out, const SymbolicController& controller);
[[nodiscard]] SymbolicController read_controller(std::istream& in);

/* state,lower,upper for every state */
void write_bounds(std::ostream& out, const EntryTimeTable& lower, const SymbolicController& upper);

struct BoundsRow {
  StateIndex state = 0;
  std::uint32_t lower = kUnreachable;
  std::uint32_t upper = kUnreachable;
};
[[nodiscard]] std::vector<BoundsRow> read_bounds(std::istream& in);

/* k,x1..xn,u1..um,cell,value rows followed by "# reason=... achieved=k";
 * the final row leaves the input columns empty */
void write_trace(std::ostream& out, const Trace& trace, std::size_t state_dim, std::size_t input_dim);

/* one row per winning cell: cell,c1..cn,u1..um,value with the input the
 * refined controller applies at the cell center (empty on target cells) */
void write_plot(std::ostream& out, const RefinedController& controller);
/* gridless variant for explicit systems: state,input,value */
void write_plot(std::ostream& out, const SymbolicController& controller, const FiniteSystem& system,
                InputPolicy policy);

/* "# generated <UTC time>" */
[[nodiscard]] std::string timestamp_comment();

}  // namespace symopt
