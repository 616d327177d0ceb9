#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "oracles.hpp"
#include "symopt/errors.hpp"
#include "symopt/formats.hpp"

using namespace symopt;

namespace {

FiniteSystem branching() {
  return FiniteSystemBuilder(3, 2)
      .add_transition(0, 0, 1)
      .add_transition(0, 0, 2)
      .add_transition(0, 1, 1)
      .add_transition(1, 0, 2)
      .build();
}

SystemFile parse_system(const std::string& text) {
  std::istringstream in(text);
  return read_system(in);
}

SymbolicController parse_controller(const std::string& text) {
  std::istringstream in(text);
  return read_controller(in);
}

GridSpec unicycle_grid() {
  GridSpec g;
  g.tau = 0.5;
  g.eta = 0.2;
  g.mu = 0.1;
  g.domain = {{-0.1, -0.1, -std::numbers::pi}, {5.1, 5.1, std::numbers::pi}};
  g.input_box = {{0, -0.5}, {0.5, 0.5}};
  g.periodic = {false, false, true};
  return g;
}

}  // namespace

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-3.0), "-3");
  EXPECT_EQ(format_number(1e300), "1e+300");
  EXPECT_EQ(format_number(HUGE_VAL), "inf");
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = d(rng);
    ASSERT_EQ(std::stod(format_number(v)), v);
  }
  EXPECT_EQ(format_level(kUnreachable), "inf");
  EXPECT_EQ(format_level(7), "7");
}

TEST(Timestamp, CommentShape) {
  EXPECT_TRUE(std::regex_match(timestamp_comment(), std::regex(R"(# generated \d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
}

TEST(SystemFormat, ExactText) {
  std::ostringstream out;
  write_system(out, branching());
  EXPECT_EQ(out.str(),
            "STS1\n"
            "states 3\n"
            "inputs 2\n"
            "initial 0 1 2\n"
            "t 0 0 : 1 2\n"
            "t 0 1 : 1\n"
            "t 1 0 : 2\n");
}

TEST(SystemFormat, RoundTripWithGrid) {
  for (Overlap mode : {Overlap::Interior, Overlap::Closed}) {
    GridSpec g = unicycle_grid();
    g.overlap = mode;
    std::ostringstream out;
    write_system(out, branching(), &g);
    const SystemFile f = parse_system(out.str());
    EXPECT_EQ(f.system, branching());
    ASSERT_TRUE(f.grid.has_value());
    EXPECT_EQ(*f.grid, g);
  }
  std::ostringstream out;
  write_system(out, branching());
  EXPECT_FALSE(parse_system(out.str()).grid.has_value());
}

TEST(SystemFormat, CommentsAndBlankLinesAreSkipped) {
  const SystemFile f = parse_system("STS1\n# a comment\n\nstates 2\ninputs 1\ninitial 0\n# x\nt 0 0 : 1\n\n");
  EXPECT_EQ(f.system.num_transitions(), 1u);
  EXPECT_EQ(f.system.initial().indices(), (std::vector<StateIndex>{0}));
}

TEST(SystemFormat, ParseErrorsCarryLineNumbers) {
  const std::pair<std::string, std::string> bad[] = {
      {"STS2\n", "line 1"},
      {"STS1\nstates x\n", "line 2"},
      {"STS1\nstates 2\ninputs 1\ninitial 5\n", "line 4"},
      {"STS1\nstates 2\ninputs 1\ninitial\nt 0 0 : 2\n", "line 5"},
      {"STS1\nstates 2\ninputs 1\ninitial\nt 0 0 : 1 0\n", "line 5"},
      {"STS1\nstates 2\ninputs 1\ninitial\nt 1 0 : 1\nt 0 0 : 1\n", "line 6"},
      {"STS1\nstates 2\ninputs 1\ninitial\nt 0 0 :\n", "line 5"},
      {"STS1\nstates 2\ninputs 1\ninitial\nt 0 3 : 1\n", "line 5"},
      {"STS1\nstates 2\n", "missing 'inputs'"},
  };
  for (const auto& [text, where] : bad) {
    try {
      (void)parse_system(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  }
}

TEST(ControllerFormat, ExactTextAndRoundTrip) {
  const FiniteSystem s = branching();
  const StateSet w = StateSet::from_indices(3, std::vector<StateIndex>{2});
  const SymbolicController c = extract_controller(s, w, solve_pessimistic(s, w));
  std::ostringstream out;
  write_controller(out, c);
  EXPECT_EQ(out.str(), "CTL1\nstates 3\ninputs 2\nc 0 2 : 0 1\nc 1 1 : 0\nc 2 0 :\n");
  EXPECT_EQ(parse_controller(out.str()), c);
}

TEST(ControllerFormat, ParseErrors) {
  EXPECT_THROW((void)parse_controller("CTL1\nstates 2\ninputs 1\nc 3 0 :\n"), ParseError);
  EXPECT_THROW((void)parse_controller("CTL1\nstates 2\ninputs 1\nc 1 0 :\nc 0 1 : 0\n"), ParseError);
  EXPECT_THROW((void)parse_controller("CTL1\nstates 2\ninputs 1\nc 0 1 : 4\n"), ParseError);
  EXPECT_THROW((void)parse_controller("STS1\n"), ParseError);
}

TEST(BoundsFormat, RoundTrip) {
  const FiniteSystem s = branching();
  const StateSet w = StateSet::from_indices(3, std::vector<StateIndex>{2});
  const SymbolicController c = extract_controller(s, w, solve_pessimistic(s, w));
  const EntryTimeTable lower = solve_optimistic(s, w);
  std::ostringstream out;
  out << timestamp_comment() << '\n';
  write_bounds(out, lower, c);
  EXPECT_NE(out.str().find("state,lower,upper\n0,1,2\n1,1,1\n2,0,0\n"), std::string::npos);
  std::istringstream in(out.str());
  const auto rows = read_bounds(in);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].lower, 1u);
  EXPECT_EQ(rows[0].upper, 2u);
  std::istringstream inf_rows("state,lower,upper\n0,inf,inf\n");
  EXPECT_EQ(read_bounds(inf_rows)[0].upper, kUnreachable);
  std::istringstream bad("state,lower\n");
  EXPECT_THROW((void)read_bounds(bad), ParseError);
}

TEST(TraceFormat, HeaderRowsAndReasonLine) {
  Trace t;
  t.steps.push_back({0, {3, 0}, {-1}, 12, 3});
  t.steps.push_back({1, {2.5, -1}, {}, std::numeric_limits<StateIndex>::max(), kUnreachable});
  t.reason = TerminationReason::ReachedTarget;
  t.achieved = 1;
  std::ostringstream out;
  write_trace(out, t, 2, 1);
  EXPECT_EQ(out.str(), "k,x1,x2,u1,cell,value\n0,3,0,-1,12,3\n1,2.5,-1,,,inf\n# reason=reached-target achieved=1\n");
}

// parse(serialize(s)) == s on random systems and controllers
TEST(FormatsProperty, RandomRoundTrips) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 200; ++trial) {
    const FiniteSystem s = symopt::testing::random_system(rng, {.max_states = 30, .max_inputs = 5});
    std::ostringstream out;
    write_system(out, s);
    ASSERT_EQ(parse_system(out.str()).system, s);

    const StateSet w = symopt::testing::random_subset(rng, s.num_states(), 0.2);
    const SymbolicController c = extract_controller(s, w, solve_pessimistic(s, w));
    std::ostringstream cout;
    write_controller(cout, c);
    ASSERT_EQ(parse_controller(cout.str()), c);
    std::ostringstream again;
    write_controller(again, parse_controller(cout.str()));
    ASSERT_EQ(again.str(), cout.str());
  }
}
