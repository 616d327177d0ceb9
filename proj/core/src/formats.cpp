#include "symopt/formats.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "symopt/errors.hpp"

namespace symopt {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_level(std::uint32_t v) {
  return v == kUnreachable ? "inf" : std::to_string(v);
}

std::string timestamp_comment() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string("# generated ") + buf;
}

namespace {

/* line cursor over a whole file with 1-based numbering for messages */
class LineReader {
 public:
  explicit LineReader(std::istream& in)
      : text_(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()) {}

  bool next(std::string_view& line) {
    while (pos_ < text_.size()) {
      const std::size_t end = std::min(text_.find('\n', pos_), text_.size());
      line = std::string_view(text_).substr(pos_, end - pos_);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      pos_ = end + 1;
      ++number_;
      if (!blank(line)) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("line " + std::to_string(number_) + ": " + what);
  }

 private:
  static bool blank(std::string_view s) {
    return s.find_first_not_of(" \t") == std::string_view::npos;
  }

  std::string text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_int(std::string_view s, T& v) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& v) {
  if (s == "inf") v = HUGE_VAL;
  else if (s == "-inf") v = -HUGE_VAL;
  else {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
  }
  return true;
}

template <typename T>
T expect_int(const LineReader& r, std::string_view s, const char* what) {
  T v{};
  if (!parse_int(s, v)) r.fail(std::string("expected ") + what + ", got '" + std::string(s) + "'");
  return v;
}

std::size_t header_count(LineReader& r, std::string_view& line, const char* key) {
  if (!r.next(line)) r.fail(std::string("missing '") + key + "' line");
  const auto tok = split(line);
  if (tok.size() != 2 || tok[0] != key) r.fail(std::string("expected '") + key + " <count>'");
  return expect_int<std::size_t>(r, tok[1], "a count");
}

void write_list(std::ostream& out, const Vector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << format_number(v[i]);
}

void write_grid(std::ostream& out, const GridSpec& g) {
  out << "# grid: tau = " << format_number(g.tau) << '\n';
  out << "# grid: eta = " << format_number(g.eta) << '\n';
  out << "# grid: mu = " << format_number(g.mu) << '\n';
  out << "# grid: domain_lo = ";
  write_list(out, g.domain.lo);
  out << "\n# grid: domain_hi = ";
  write_list(out, g.domain.hi);
  out << "\n# grid: input_lo = ";
  write_list(out, g.input_box.lo);
  out << "\n# grid: input_hi = ";
  write_list(out, g.input_box.hi);
  out << "\n# grid: periodic =";
  for (std::size_t i = 0; i < g.state_dim(); ++i) out << ' ' << (g.is_periodic(i) ? 1 : 0);
  out << "\n# grid: overlap = " << (g.overlap == Overlap::Closed ? "closed" : "interior") << '\n';
}

GridSpec read_grid(const LineReader& r, const std::map<std::string, std::vector<std::string_view>>& kv) {
  auto get = [&](const char* key) -> const std::vector<std::string_view>& {
    const auto it = kv.find(key);
    if (it == kv.end()) r.fail(std::string("grid block lacks '") + key + "'");
    return it->second;
  };
  auto scalar = [&](const char* key) {
    const auto& v = get(key);
    double d = 0;
    if (v.size() != 1 || !parse_double(v[0], d)) r.fail(std::string("bad grid value for '") + key + "'");
    return d;
  };
  auto list = [&](const char* key) {
    Vector out;
    for (auto s : get(key)) {
      double d = 0;
      if (!parse_double(s, d)) r.fail(std::string("bad grid value for '") + key + "'");
      out.push_back(d);
    }
    return out;
  };
  GridSpec g;
  g.tau = scalar("tau");
  g.eta = scalar("eta");
  g.mu = scalar("mu");
  g.domain = Box{list("domain_lo"), list("domain_hi")};
  g.input_box = Box{list("input_lo"), list("input_hi")};
  bool any = false;
  for (double p : list("periodic")) {
    g.periodic.push_back(p != 0);
    any = any || p != 0;
  }
  if (!any) g.periodic.clear();
  const auto& ov = get("overlap");
  if (ov.size() != 1 || (ov[0] != "closed" && ov[0] != "interior")) r.fail("bad grid overlap");
  g.overlap = ov[0] == "closed" ? Overlap::Closed : Overlap::Interior;
  return g;
}

}  // namespace

void write_system(std::ostream& out, const FiniteSystem& sys, const GridSpec* grid) {
  out << "STS1\n";
  if (grid != nullptr) write_grid(out, *grid);
  out << "states " << sys.num_states() << '\n';
  out << "inputs " << sys.num_inputs() << '\n';
  out << "initial";
  for (StateIndex x : sys.initial().indices()) out << ' ' << x;
  out << '\n';
  std::string line;
  const std::size_t m = sys.num_inputs();
  for (std::size_t p = 0; p < sys.num_pairs(); ++p) {
    const auto post = sys.pair_post(p);
    if (post.empty()) continue;
    line = "t " + std::to_string(p / m) + ' ' + std::to_string(p % m) + " :";
    for (StateIndex s : post) {
      line += ' ';
      line += std::to_string(s);
    }
    line += '\n';
    out << line;
  }
}

SystemFile read_system(std::istream& in) {
  LineReader r(in);
  std::string_view line;
  if (!r.next(line) || line != "STS1") r.fail("missing STS1 header");

  std::map<std::string, std::vector<std::string_view>> grid_kv;
  std::size_t n = 0;
  // grid block and other comments precede the counts
  while (true) {
    if (!r.next(line)) r.fail("missing 'states' line");
    if (line.starts_with("# grid:")) {
      const auto body = line.substr(7);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) r.fail("grid line without '='");
      const auto key = split(body.substr(0, eq));
      if (key.size() != 1) r.fail("grid line needs one key");
      grid_kv[std::string(key[0])] = split(body.substr(eq + 1));
      continue;
    }
    if (line.starts_with("#")) continue;
    const auto tok = split(line);
    if (tok.size() != 2 || tok[0] != "states") r.fail("expected 'states <count>'");
    n = expect_int<std::size_t>(r, tok[1], "a count");
    break;
  }
  const std::size_t m = header_count(r, line, "inputs");
  if (!r.next(line)) r.fail("missing 'initial' line");
  auto tok = split(line);
  if (tok.empty() || tok[0] != "initial") r.fail("expected 'initial <states>'");
  StateSet initial(n);
  for (std::size_t i = 1; i < tok.size(); ++i) {
    const auto x = expect_int<StateIndex>(r, tok[i], "a state index");
    if (x >= n) r.fail("initial state " + std::to_string(x) + " out of range");
    initial.insert(x);
  }

  std::vector<std::uint64_t> offsets{0};
  offsets.reserve(n * m + 1);
  std::vector<StateIndex> targets;
  std::size_t next_pair = 0;
  while (r.next(line)) {
    if (line.starts_with("#")) continue;
    tok = split(line);
    if (tok.size() < 5 || tok[0] != "t" || tok[3] != ":")
      r.fail("expected 't <x> <u> : <successors>'");
    const auto x = expect_int<std::size_t>(r, tok[1], "a state index");
    const auto u = expect_int<std::size_t>(r, tok[2], "an input index");
    if (x >= n || u >= m) r.fail("transition index out of range");
    const std::size_t p = x * m + u;
    if (p < next_pair) r.fail("transitions must be listed once each in ascending (state, input) order");
    while (next_pair < p) {
      offsets.push_back(targets.size());
      ++next_pair;
    }
    StateIndex prev = 0;
    for (std::size_t i = 4; i < tok.size(); ++i) {
      const auto s = expect_int<StateIndex>(r, tok[i], "a successor index");
      if (s >= n) r.fail("successor " + std::to_string(s) + " out of range");
      if (i > 4 && s <= prev) r.fail("successors must be sorted and unique");
      targets.push_back(s);
      prev = s;
    }
    offsets.push_back(targets.size());
    ++next_pair;
  }
  while (next_pair < n * m) {
    offsets.push_back(targets.size());
    ++next_pair;
  }

  SystemFile file{FiniteSystem(n, m, std::move(initial), std::move(offsets), std::move(targets)),
                  std::nullopt};
  if (!grid_kv.empty()) file.grid = read_grid(r, grid_kv);
  return file;
}

void write_controller(std::ostream& out, const SymbolicController& controller) {
  out << "CTL1\n";
  out << "states " << controller.num_states() << '\n';
  out << "inputs " << controller.num_inputs() << '\n';
  for (std::size_t x = 0; x < controller.num_states(); ++x) {
    const auto xi = static_cast<StateIndex>(x);
    if (!controller.in_domain(xi)) continue;
    out << "c " << x << ' ' << controller.value(xi) << " :";
    for (InputIndex u : controller.enabled(xi)) out << ' ' << u;
    out << '\n';
  }
}

SymbolicController read_controller(std::istream& in) {
  LineReader r(in);
  std::string_view line;
  if (!r.next(line) || line != "CTL1") r.fail("missing CTL1 header");
  std::size_t n = 0;
  while (true) {
    if (!r.next(line)) r.fail("missing 'states' line");
    if (line.starts_with("#")) continue;
    const auto tok = split(line);
    if (tok.size() != 2 || tok[0] != "states") r.fail("expected 'states <count>'");
    n = expect_int<std::size_t>(r, tok[1], "a count");
    break;
  }
  const std::size_t m = header_count(r, line, "inputs");
  std::vector<std::uint32_t> values(n, kUnreachable);
  InputSets enabled(n);
  std::size_t next = 0;
  while (r.next(line)) {
    if (line.starts_with("#")) continue;
    const auto tok = split(line);
    if (tok.size() < 4 || tok[0] != "c" || tok[3] != ":") r.fail("expected 'c <x> <value> : <inputs>'");
    const auto x = expect_int<std::size_t>(r, tok[1], "a state index");
    if (x >= n) r.fail("state " + std::to_string(x) + " out of range");
    if (x < next) r.fail("states must be listed once each in ascending order");
    next = x + 1;
    values[x] = expect_int<std::uint32_t>(r, tok[2], "a value");
    if (values[x] == kUnreachable) r.fail("value out of range");
    for (std::size_t i = 4; i < tok.size(); ++i) {
      const auto u = expect_int<InputIndex>(r, tok[i], "an input index");
      if (u >= m) r.fail("input " + std::to_string(u) + " out of range");
      enabled[x].push_back(u);
    }
  }
  try {
    return SymbolicController(n, m, std::move(values), std::move(enabled));
  } catch (const std::exception& e) {
    throw ParseError(std::string("inconsistent controller: ") + e.what());
  }
}

void write_bounds(std::ostream& out, const EntryTimeTable& lower, const SymbolicController& upper) {
  if (lower.size() != upper.num_states())
    throw IntegrityError("lower bound table and controller cover different state counts");
  out << "state,lower,upper\n";
  for (std::size_t x = 0; x < lower.size(); ++x) {
    const auto xi = static_cast<StateIndex>(x);
    out << x << ',' << format_level(lower.entry_time(xi)) << ',' << format_level(upper.value(xi)) << '\n';
  }
}

std::vector<BoundsRow> read_bounds(std::istream& in) {
  LineReader r(in);
  std::string_view line;
  while (r.next(line) && line.starts_with("#")) {
  }
  if (line != "state,lower,upper") r.fail("expected header 'state,lower,upper'");
  std::vector<BoundsRow> rows;
  auto level = [&](std::string_view s) {
    if (s == "inf") return kUnreachable;
    return expect_int<std::uint32_t>(r, s, "an entry time");
  };
  while (r.next(line)) {
    if (line.starts_with("#")) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos) r.fail("expected three columns");
    BoundsRow row;
    row.state = expect_int<StateIndex>(r, line.substr(0, c1), "a state index");
    row.lower = level(line.substr(c1 + 1, c2 - c1 - 1));
    row.upper = level(line.substr(c2 + 1));
    rows.push_back(row);
  }
  return rows;
}

void write_trace(std::ostream& out, const Trace& trace, std::size_t state_dim, std::size_t input_dim) {
  out << 'k';
  for (std::size_t i = 1; i <= state_dim; ++i) out << ",x" << i;
  for (std::size_t i = 1; i <= input_dim; ++i) out << ",u" << i;
  out << ",cell,value\n";
  for (const TraceStep& s : trace.steps) {
    out << s.k;
    for (double v : s.x) out << ',' << format_number(v);
    for (std::size_t i = 0; i < input_dim; ++i) {
      out << ',';
      if (i < s.u.size()) out << format_number(s.u[i]);
    }
    out << ',';
    if (s.cell != std::numeric_limits<StateIndex>::max()) out << s.cell;
    out << ',' << format_level(s.value) << '\n';
  }
  out << "# reason=" << to_string(trace.reason) << " achieved=" << trace.achieved << '\n';
}

void write_plot(std::ostream& out, const RefinedController& controller) {
  const Abstraction& abs = controller.abstraction();
  const SymbolicController& ctl = controller.controller();
  const std::size_t n = abs.quantizer.dim();
  const std::size_t m = abs.inputs.dim();
  out << "cell";
  for (std::size_t i = 1; i <= n; ++i) out << ",c" << i;
  for (std::size_t i = 1; i <= m; ++i) out << ",u" << i;
  out << ",value\n";
  for (std::size_t c = 0; c < ctl.num_states(); ++c) {
    const auto ci = static_cast<StateIndex>(c);
    if (!ctl.in_domain(ci)) continue;
    const Vector center = abs.quantizer.center(ci);
    out << c;
    for (double v : center) out << ',' << format_number(v);
    Vector u;
    if (ctl.value(ci) > 0) u = controller.control_input(center).u;
    for (std::size_t i = 0; i < m; ++i) {
      out << ',';
      if (i < u.size()) out << format_number(u[i]);
    }
    out << ',' << ctl.value(ci) << '\n';
  }
}

void write_plot(std::ostream& out, const SymbolicController& controller, const FiniteSystem& system,
                InputPolicy policy) {
  out << "state,input,value\n";
  for (std::size_t x = 0; x < controller.num_states(); ++x) {
    const auto xi = static_cast<StateIndex>(x);
    if (!controller.in_domain(xi)) continue;
    out << x << ',';
    if (controller.value(xi) > 0) out << select_input(controller, &system, xi, policy);
    out << ',' << controller.value(xi) << '\n';
  }
}

}  // namespace symopt
