#include "symopt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "symopt/errors.hpp"

namespace symopt {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/* value tokens: "[", "]", "x" between intervals, and atoms */
std::vector<std::string> tokenize(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : v) {
    if (c == '[' || c == ']') {
      flush();
      out.emplace_back(1, c);
    } else if (c == ',' || c == ' ' || c == '\t') {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

class ValueParser {
 public:
  ValueParser(std::string key, const std::string& value, std::size_t line)
      : key_(std::move(key)), tokens_(tokenize(value)), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + key_ + ": " + what);
  }

  bool done() const { return pos_ == tokens_.size(); }
  void finish() const {
    if (!done()) fail("unexpected '" + tokens_[pos_] + "'");
  }

  double number() {
    if (done()) fail("expected a number");
    return number_of(tokens_[pos_++]);
  }

  std::size_t count() {
    const double v = number();
    if (!(v >= 0) || v != std::floor(v) || v > 1e15) fail("expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  std::string word() {
    if (done()) fail("expected a value");
    return tokens_[pos_++];
  }

  bool boolean() {
    const std::string w = word();
    if (w == "true" || w == "1") return true;
    if (w == "false" || w == "0") return false;
    fail("expected true or false, got '" + w + "'");
  }

  std::vector<double> list() {
    expect("[");
    std::vector<double> out;
    while (peek() != "]") out.push_back(number());
    expect("]");
    return out;
  }

  std::vector<bool> bool_list() {
    expect("[");
    std::vector<bool> out;
    while (peek() != "]") out.push_back(boolean());
    expect("]");
    return out;
  }

  /* [lo, hi] x [lo, hi] ... */
  Box box() {
    Box b;
    while (true) {
      const auto iv = list();
      if (iv.size() != 2) fail("a box is a product of [lo, hi] intervals");
      if (!(iv[0] <= iv[1])) fail("interval with lo > hi");
      b.lo.push_back(iv[0]);
      b.hi.push_back(iv[1]);
      if (done() || peek() != "x") break;
      ++pos_;
    }
    return b;
  }

 private:
  std::string peek() const {
    if (done()) fail("unterminated list");
    return tokens_[pos_];
  }

  void expect(const char* t) {
    if (done() || tokens_[pos_] != t) fail(std::string("expected '") + t + "'");
    ++pos_;
  }

  /* number, pi, and products/quotients of those with an optional sign */
  double number_of(const std::string& tok) const {
    std::string s = tok;
    double sign = 1;
    if (!s.empty() && (s[0] == '-' || s[0] == '+') && s.find_first_of("*/") != std::string::npos) {
      if (s[0] == '-') sign = -1;
      s.erase(0, 1);
    }
    double acc = 0;
    char op = 0;
    std::size_t i = 0;
    while (true) {
      const std::size_t j = s.find_first_of("*/", i);
      const double f = factor(s.substr(i, j == std::string::npos ? std::string::npos : j - i), tok);
      if (op == 0) acc = f;
      else if (op == '*') acc *= f;
      else acc /= f;
      if (j == std::string::npos) break;
      op = s[j];
      i = j + 1;
    }
    if (!std::isfinite(acc)) fail("'" + tok + "' is not a finite number");
    return sign * acc;
  }

  double factor(const std::string& f, const std::string& tok) const {
    if (f == "pi" || f == "+pi") return std::numbers::pi;
    if (f == "-pi") return -std::numbers::pi;
    double v = 0;
    const char* first = f.data();
    if (!f.empty() && f[0] == '+') ++first;
    const auto res = std::from_chars(first, f.data() + f.size(), v);
    if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size())
      fail("'" + tok + "' is not a number");
    return v;
  }

  std::string key_;
  std::vector<std::string> tokens_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::vector<StateIndex> state_list(ValueParser& p) {
  std::vector<StateIndex> out;
  for (double v : p.list()) {
    if (!(v >= 0) || v != std::floor(v) || v > 4e9) p.fail("state indices are non-negative integers");
    out.push_back(static_cast<StateIndex>(v));
  }
  return out;
}

const std::set<std::string> kRepeatable = {"target.box", "target.ball", "obstacles.box",
                                           "simulation.initial"};

}  // namespace

Model ProblemConfig::make_model() const {
  switch (model) {
    case ModelId::DoubleIntegrator:
      return double_integrator();
    case ModelId::Unicycle: {
      if (growth_l) {
        Eigen::MatrixXd l(3, 3);
        for (int i = 0; i < 9; ++i) l(i / 3, i % 3) = (*growth_l)[static_cast<std::size_t>(i)];
        return unicycle(l);
      }
      double v_max = 0;
      if (grid.input_box.dim() >= 1)
        v_max = std::max(std::abs(grid.input_box.lo[0]), std::abs(grid.input_box.hi[0]));
      return unicycle_input_growth(v_max);
    }
    case ModelId::Explicit:
      break;
  }
  throw ConfigError("an explicit system has no continuous model");
}

ProblemConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ProblemConfig cfg;
  cfg.source = base_dir;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  bool have_tau = false, have_eta = false, have_mu = false, have_domain = false, have_inputs = false;
  bool have_model = false;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": " + key + ": empty value");
    if (!kRepeatable.contains(key) && !seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": " + key + " given twice");
    ValueParser p(key, value, line_no);

    if (key == "model.id") {
      const std::string w = p.word();
      if (w == "double_integrator") cfg.model = ModelId::DoubleIntegrator;
      else if (w == "unicycle") cfg.model = ModelId::Unicycle;
      else if (w == "explicit") cfg.model = ModelId::Explicit;
      else p.fail("unknown model '" + w + "' (double_integrator, unicycle, explicit)");
      have_model = true;
    } else if (key == "model.system") {
      cfg.system_file = base_dir / p.word();
    } else if (key == "model.growth_L") {
      cfg.growth_l = p.list();
      if (cfg.growth_l->size() != 9) p.fail("expected 9 entries (3x3, row major)");
    } else if (key == "model.substeps") {
      cfg.substeps = p.count();
      if (cfg.substeps == 0) p.fail("must be >= 1");
    } else if (key == "grid.tau") {
      cfg.grid.tau = p.number();
      have_tau = true;
    } else if (key == "grid.eta") {
      cfg.grid.eta = p.number();
      have_eta = true;
    } else if (key == "grid.mu") {
      cfg.grid.mu = p.number();
      have_mu = true;
    } else if (key == "grid.domain") {
      cfg.grid.domain = p.box();
      have_domain = true;
    } else if (key == "grid.inputs") {
      cfg.grid.input_box = p.box();
      have_inputs = true;
    } else if (key == "grid.periodic") {
      cfg.grid.periodic = p.bool_list();
    } else if (key == "grid.overlap") {
      const std::string w = p.word();
      if (w == "interior") cfg.grid.overlap = Overlap::Interior;
      else if (w == "closed") cfg.grid.overlap = Overlap::Closed;
      else p.fail("expected interior or closed");
    } else if (key == "target.box") {
      cfg.target.boxes.push_back(p.box());
    } else if (key == "target.ball") {
      const auto c = p.list();
      const double r = p.number();
      cfg.target.boxes.push_back(TargetSpec::ball(c, r).boxes.front());
    } else if (key == "target.ignore") {
      cfg.target.ignored = p.bool_list();
    } else if (key == "target.states") {
      cfg.target_states = state_list(p);
    } else if (key == "obstacles.box") {
      cfg.obstacles.boxes.push_back(p.box());
    } else if (key == "obstacles.ignore") {
      cfg.obstacles.ignored = p.bool_list();
    } else if (key == "safety.unsafe_states") {
      cfg.unsafe_states = state_list(p);
    } else if (key == "simulation.initial") {
      cfg.initial.push_back(p.list());
    } else if (key == "simulation.max_steps") {
      cfg.max_steps = p.count();
    } else if (key == "simulation.policy") {
      const std::string w = p.word();
      if (w == "value-greedy") cfg.policy = InputPolicy::ValueGreedy;
      else if (w == "first-enabled") cfg.policy = InputPolicy::FirstEnabled;
      else p.fail("expected value-greedy or first-enabled");
    } else if (key == "output.dir") {
      cfg.output_dir = p.word();
    } else if (key == "output.timestamp") {
      cfg.timestamp = p.boolean();
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    p.finish();
  }

  if (!have_model) throw ConfigError("model.id is required");
  if (cfg.is_explicit()) {
    if (cfg.system_file.empty()) throw ConfigError("model.system is required for explicit models");
    if (!seen.contains("target.states")) throw ConfigError("target.states is required for explicit models");
    if (!cfg.target.boxes.empty() || !cfg.obstacles.boxes.empty())
      throw ConfigError("explicit models take target.states and safety.unsafe_states, not boxes");
    return cfg;
  }

  if (!have_tau || !have_eta || !have_mu || !have_domain || !have_inputs)
    throw ConfigError("grid.tau, grid.eta, grid.mu, grid.domain and grid.inputs are required");
  if (!cfg.target_states.empty() || !cfg.unsafe_states.empty())
    throw ConfigError("target.states and safety.unsafe_states apply to explicit models only");
  if (cfg.target.boxes.empty()) throw ConfigError("a target (target.box or target.ball) is required");
  cfg.grid.validate();
  const std::size_t n = cfg.grid.state_dim();
  if (cfg.grid.periodic.size() > n) throw ConfigError("grid.periodic has more entries than state axes");
  if (cfg.target.ignored.size() > n) throw ConfigError("target.ignore has more entries than state axes");
  for (const Box& b : cfg.target.boxes)
    if (b.dim() != n) throw ConfigError("target box dimension does not match grid.domain");
  if (cfg.obstacles.ignored.size() > n) throw ConfigError("obstacles.ignore has more entries than state axes");
  for (const Box& b : cfg.obstacles.boxes)
    if (b.dim() != n) throw ConfigError("obstacle box dimension does not match grid.domain");
  for (const Vector& x : cfg.initial)
    if (x.size() != n) throw ConfigError("simulation.initial dimension does not match grid.domain");
  if (cfg.growth_l && cfg.model != ModelId::Unicycle)
    throw ConfigError("model.growth_L applies to the unicycle only");
  const Model m = cfg.make_model();
  if (m.state_dim() != n || m.input_dim() != cfg.grid.input_dim())
    throw ConfigError("model '" + m.name() + "' needs a " + std::to_string(m.state_dim()) +
                      "-dimensional domain and " + std::to_string(m.input_dim()) +
                      "-dimensional inputs");
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

}  // namespace symopt
