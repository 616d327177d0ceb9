#include "symopt/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "symopt/errors.hpp"

namespace symopt {

namespace {

std::size_t axis_cell_count(double lo, double hi, double eta, bool periodic) {
  const double ratio = (hi - lo) / eta;
  if (periodic) return static_cast<std::size_t>(std::ceil(ratio - kGridTolerance));
  return static_cast<std::size_t>(std::floor(ratio + kGridTolerance)) + 1;
}

void check_box(const Box& b, const std::string& what) {
  if (b.lo.size() != b.hi.size() || b.lo.empty())
    throw ConfigError(what + ": lower and upper bounds must have the same non-zero length");
  for (std::size_t i = 0; i < b.lo.size(); ++i) {
    if (!std::isfinite(b.lo[i]) || !std::isfinite(b.hi[i]))
      throw ConfigError(what + ": bound on axis " + std::to_string(i) + " is not finite");
    if (!(b.lo[i] < b.hi[i]))
      throw ConfigError(what + ": degenerate interval on axis " + std::to_string(i));
  }
}

double wrap(double v, double origin, double period) {
  double t = std::fmod(v - origin, period);
  if (t < 0) t += period;
  if (t >= period) t -= period;
  return origin + t;
}

}  // namespace

void GridSpec::validate() const {
  if (!(tau > 0) || !std::isfinite(tau)) throw ConfigError("grid.tau must be > 0");
  if (!(eta > 0) || !std::isfinite(eta)) throw ConfigError("grid.eta must be > 0");
  if (!(mu > 0) || !std::isfinite(mu)) throw ConfigError("grid.mu must be > 0");
  check_box(domain, "grid domain");
  check_box(input_box, "grid input box");
  if (!periodic.empty() && periodic.size() != domain.dim())
    throw ConfigError("grid.periodic must have one flag per state coordinate");
  double cells = 1;
  for (std::size_t i = 0; i < domain.dim(); ++i)
    cells *= static_cast<double>(
        axis_cell_count(domain.lo[i], domain.hi[i], eta, is_periodic(i)));
  if (cells > static_cast<double>(std::numeric_limits<StateIndex>::max()))
    throw ConfigError("grid has too many cells for 32-bit state indices");
}

Quantizer::Quantizer(const GridSpec& grid) {
  grid.validate();
  const std::size_t n = grid.state_dim();
  num_cells_ = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const bool per = grid.is_periodic(i);
    const double lo = grid.domain.lo[i];
    const double hi = grid.domain.hi[i];
    const std::size_t count = axis_cell_count(lo, hi, grid.eta, per);
    const double step = per ? (hi - lo) / static_cast<double>(count) : grid.eta;
    counts_.push_back(count);
    steps_.push_back(step);
    origin_.push_back(lo);
    periodic_.push_back(per);
    region_lo_.push_back(lo);
    region_hi_.push_back(
        per ? hi : std::min(hi, lo + (static_cast<double>(count) - 0.5) * step));
    num_cells_ *= count;
  }
}

StateIndex Quantizer::flat(std::span<const std::size_t> c) const {
  if (c.size() != dim()) throw std::invalid_argument("cell coordinate dimension mismatch");
  std::size_t idx = 0;
  for (std::size_t i = dim(); i-- > 0;) {
    if (c[i] >= counts_[i]) throw IndexError("cell coordinate out of range on axis " + std::to_string(i));
    idx = idx * counts_[i] + c[i];
  }
  return static_cast<StateIndex>(idx);
}

std::vector<std::size_t> Quantizer::coords(StateIndex cell) const {
  if (cell >= num_cells_) throw IndexError("cell index " + std::to_string(cell) + " out of range");
  std::vector<std::size_t> c(dim());
  std::size_t rest = cell;
  for (std::size_t i = 0; i < dim(); ++i) {
    c[i] = rest % counts_[i];
    rest /= counts_[i];
  }
  return c;
}

Vector Quantizer::center(StateIndex cell) const {
  const auto c = coords(cell);
  Vector x(dim());
  for (std::size_t i = 0; i < dim(); ++i) x[i] = origin_[i] + static_cast<double>(c[i]) * steps_[i];
  return x;
}

Box Quantizer::cell_box(StateIndex cell) const {
  Vector x = center(cell);
  Box b{x, x};
  for (std::size_t i = 0; i < dim(); ++i) {
    b.lo[i] -= steps_[i] / 2;
    b.hi[i] += steps_[i] / 2;
  }
  return b;
}

std::optional<StateIndex> Quantizer::quantize(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("point dimension does not match grid");
  std::size_t idx = 0;
  for (std::size_t i = dim(); i-- > 0;) {
    if (!std::isfinite(x[i])) return std::nullopt;
    double v = x[i];
    if (periodic_[i]) v = wrap(v, origin_[i], period(i));
    const double k = std::floor((v - origin_[i]) / steps_[i] + 0.5);
    std::size_t ki;
    if (periodic_[i]) {
      ki = static_cast<std::size_t>(k) % counts_[i];
    } else {
      if (k < 0 || k >= static_cast<double>(counts_[i])) return std::nullopt;
      ki = static_cast<std::size_t>(k);
    }
    idx = idx * counts_[i] + ki;
  }
  return static_cast<StateIndex>(idx);
}

std::vector<StateIndex> Quantizer::related(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("point dimension does not match grid");
  std::vector<StateIndex> out{0};
  for (std::size_t i = dim(); i-- > 0;) {
    if (!std::isfinite(x[i])) return {};
    double v = x[i];
    if (periodic_[i]) v = wrap(v, origin_[i], period(i));
    const double t = (v - origin_[i]) / steps_[i];
    const auto count = static_cast<long long>(counts_[i]);
    std::vector<std::size_t> ks;
    for (auto k = static_cast<long long>(std::ceil(t - 0.5 - kGridTolerance));
         k <= static_cast<long long>(std::floor(t + 0.5 + kGridTolerance)); ++k) {
      if (periodic_[i])
        ks.push_back(static_cast<std::size_t>(((k % count) + count) % count));
      else if (k >= 0 && k < count)
        ks.push_back(static_cast<std::size_t>(k));
    }
    if (ks.empty()) return {};
    std::vector<StateIndex> next;
    for (StateIndex base : out)
      for (std::size_t k : ks) next.push_back(static_cast<StateIndex>(base * counts_[i] + k));
    out.swap(next);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Quantizer::normalize(std::span<double> x) const {
  for (std::size_t i = 0; i < dim() && i < x.size(); ++i)
    if (periodic_[i]) x[i] = wrap(x[i], origin_[i], period(i));
}

InputGrid::InputGrid(const GridSpec& grid) : lo_(grid.input_box.lo), hi_(grid.input_box.hi), mu_(grid.mu) {
  grid.validate();
  num_inputs_ = 1;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    counts_.push_back(static_cast<std::size_t>(std::floor((hi_[i] - lo_[i]) / mu_ + kGridTolerance)) + 1);
    num_inputs_ *= counts_.back();
  }
}

Vector InputGrid::point(InputIndex u) const {
  if (u >= num_inputs_) throw IndexError("input index " + std::to_string(u) + " out of range");
  Vector p(dim());
  std::size_t rest = u;
  for (std::size_t i = 0; i < dim(); ++i) {
    const std::size_t k = rest % counts_[i];
    rest /= counts_[i];
    p[i] = std::min(hi_[i], lo_[i] + static_cast<double>(k) * mu_);
  }
  return p;
}

InputIndex InputGrid::nearest(std::span<const double> u) const {
  if (u.size() != dim()) throw std::invalid_argument("input dimension does not match grid");
  std::size_t idx = 0;
  for (std::size_t i = dim(); i-- > 0;) {
    double k = std::round((u[i] - lo_[i]) / mu_);
    k = std::clamp(k, 0.0, static_cast<double>(counts_[i] - 1));
    idx = idx * counts_[i] + static_cast<std::size_t>(k);
  }
  return static_cast<InputIndex>(idx);
}

TargetSpec TargetSpec::ball(std::span<const double> center, double radius) {
  if (!(radius >= 0)) throw ConfigError("ball radius must be non-negative");
  Box b{Vector(center.begin(), center.end()), Vector(center.begin(), center.end())};
  for (std::size_t i = 0; i < b.dim(); ++i) {
    b.lo[i] -= radius;
    b.hi[i] += radius;
  }
  return TargetSpec{{std::move(b)}, {}};
}

TargetSpec TargetSpec::box(Box b) { return TargetSpec{{std::move(b)}, {}}; }

bool TargetSpec::contains(std::span<const double> x) const {
  for (const Box& b : boxes) {
    if (b.dim() != x.size()) throw std::invalid_argument("target box dimension mismatch");
    bool inside = true;
    for (std::size_t i = 0; i < x.size() && inside; ++i)
      if (!is_ignored(i)) inside = b.lo[i] <= x[i] && x[i] <= b.hi[i];
    if (inside) return true;
  }
  return false;
}

namespace {

enum class Test { Contained, Intersects };

/* cell interval [a, b] against region [lo, hi] on one axis */
bool axis_test(const Quantizer& q, std::size_t axis, double a, double b, double lo, double hi,
               Test test) {
  const double tol = kGridTolerance * q.step(axis);
  if (q.is_periodic(axis)) {
    const double period = q.period(axis);
    if (hi - lo >= period - tol) return true;
    // shift the cell so its lower end lies in [lo, lo + period)
    const double shift = wrap(a, lo, period) - a;
    a += shift;
    b += shift;
    if (test == Test::Contained) return b <= hi + tol;
    return a <= hi + tol || b >= lo + period - tol;
  }
  if (test == Test::Contained) return a >= lo - tol && b <= hi + tol;
  return a <= hi + tol && b >= lo - tol;
}

StateSet cells_matching(const Quantizer& q, const TargetSpec& w, Test test) {
  StateSet out(q.num_cells());
  for (const Box& box : w.boxes)
    if (box.dim() != q.dim()) throw ConfigError("target box dimension does not match grid");
  for (std::size_t c = 0; c < q.num_cells(); ++c) {
    const Box cb = q.cell_box(static_cast<StateIndex>(c));
    for (const Box& box : w.boxes) {
      bool ok = true;
      for (std::size_t i = 0; i < q.dim() && ok; ++i) {
        if (w.is_ignored(i)) continue;
        // R(c) holds the concrete states of the cell box, which end at the region
        double a = cb.lo[i], b = cb.hi[i];
        if (!q.is_periodic(i)) {
          a = std::max(a, q.region_lo(i));
          b = std::min(b, q.region_hi(i));
        }
        ok = axis_test(q, i, a, b, box.lo[i], box.hi[i], test);
      }
      if (ok) {
        out.insert(static_cast<StateIndex>(c));
        break;
      }
    }
  }
  return out;
}

}  // namespace

StateSet target_under(const Quantizer& quantizer, const TargetSpec& w) {
  return cells_matching(quantizer, w, Test::Contained);
}

StateSet target_over(const Quantizer& quantizer, const TargetSpec& w) {
  return cells_matching(quantizer, w, Test::Intersects);
}

namespace {

struct RowBlock {
  std::vector<std::uint32_t> counts;  // successors per (cell, input) pair
  std::vector<StateIndex> targets;
};

class TransitionWorker {
 public:
  TransitionWorker(const Model& model, const Abstraction& abs)
      : abs_(abs), rk4_(model), ranges_(abs.quantizer.dim()) {}

  void run(std::size_t first_cell, std::size_t last_cell, RowBlock& out) {
    const std::size_t m = abs_.inputs.size();
    std::vector<Vector> input_points(m);
    for (std::size_t u = 0; u < m; ++u) input_points[u] = abs_.inputs.point(static_cast<InputIndex>(u));
    out.counts.assign((last_cell - first_cell) * m, 0);
    std::vector<StateIndex> succ;
    for (std::size_t c = first_cell; c < last_cell; ++c) {
      const Vector center = abs_.quantizer.center(static_cast<StateIndex>(c));
      for (std::size_t u = 0; u < m; ++u) {
        x_ = center;
        rk4_.step(abs_.flow, x_, input_points[u]);
        succ.clear();
        if (successors(abs_.input_radius[u], succ)) {
          out.counts[(c - first_cell) * m + u] = static_cast<std::uint32_t>(succ.size());
          out.targets.insert(out.targets.end(), succ.begin(), succ.end());
        }
      }
    }
  }

 private:
  /* fills out with the cells meeting the box x_ +- radius; false when the
   * box leaves the region */
  bool successors(const Vector& radius, std::vector<StateIndex>& out) {
    const Quantizer& q = abs_.quantizer;
    const std::size_t n = q.dim();
    const bool closed = abs_.grid.overlap == Overlap::Closed;
    for (std::size_t i = 0; i < n; ++i) {
      const double step = q.step(i);
      const double tol = kGridTolerance * step;
      // closed: grow by tol so touching cells count; interior: shrink by tol
      // so they do not (a degenerate box keeps its touching cells)
      const double shrink = (closed || radius[i] <= tol) ? -tol : tol;
      const double a = x_[i] - radius[i] + shrink;
      const double b = x_[i] + radius[i] - shrink;
      auto& r = ranges_[i];
      r.clear();
      const double kmin = std::ceil((a - q.origin(i)) / step - 0.5);
      const double kmax = std::floor((b - q.origin(i)) / step + 0.5);
      const auto count = static_cast<long long>(q.cells_on_axis(i));
      if (q.is_periodic(i)) {
        if (kmax - kmin + 1 >= static_cast<double>(count)) {
          for (long long k = 0; k < count; ++k) r.push_back(static_cast<std::size_t>(k));
        } else {
          for (auto k = static_cast<long long>(kmin); k <= static_cast<long long>(kmax); ++k)
            r.push_back(static_cast<std::size_t>(((k % count) + count) % count));
        }
      } else {
        if (closed ? (a < q.region_lo(i) || b > q.region_hi(i))
                   : (x_[i] - radius[i] < q.region_lo(i) - tol || x_[i] + radius[i] > q.region_hi(i) + tol))
          return false;
        const auto lo = std::max(0LL, static_cast<long long>(kmin));
        const auto hi = std::min(count - 1, static_cast<long long>(kmax));
        for (long long k = lo; k <= hi; ++k) r.push_back(static_cast<std::size_t>(k));
      }
      if (r.empty()) return false;
    }
    // cartesian product; axis 0 varies fastest in the flat index
    std::vector<std::size_t> pos(n, 0);
    while (true) {
      std::size_t idx = 0;
      for (std::size_t i = n; i-- > 0;) idx = idx * q.cells_on_axis(i) + ranges_[i][pos[i]];
      out.push_back(static_cast<StateIndex>(idx));
      std::size_t i = 0;
      while (i < n && ++pos[i] == ranges_[i].size()) pos[i++] = 0;
      if (i == n) break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return true;
  }

  const Abstraction& abs_;
  Rk4Integrator rk4_;
  Vector x_;
  std::vector<std::vector<std::size_t>> ranges_;
};

}  // namespace

Abstraction build_abstraction(const Model& model, const GridSpec& grid, unsigned threads) {
  return build_abstraction(model, grid, SampledFlow::with_default_substeps(grid.tau), threads);
}

namespace {

/* everything but the transitions */
Abstraction shell(const Model& model, const GridSpec& grid, const SampledFlow& flow) {
  grid.validate();
  flow.validate();
  if (model.state_dim() != grid.state_dim())
    throw ConfigError("model '" + model.name() + "' has state dimension " +
                      std::to_string(model.state_dim()) + " but the grid domain has " +
                      std::to_string(grid.state_dim()));
  if (model.input_dim() != grid.input_dim())
    throw ConfigError("model '" + model.name() + "' has input dimension " +
                      std::to_string(model.input_dim()) + " but the grid input box has " +
                      std::to_string(grid.input_dim()));
  if (std::abs(flow.tau - grid.tau) > 1e-12 * grid.tau)
    throw ConfigError("sampling period of the flow does not match grid.tau");

  Abstraction abs;
  abs.grid = grid;
  abs.quantizer = Quantizer(grid);
  abs.inputs = InputGrid(grid);
  abs.flow = flow;
  Vector half(grid.state_dim());
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = abs.quantizer.step(i) / 2;
  abs.radius = growth_radius(model, flow, half);
  abs.input_radius.reserve(abs.inputs.size());
  for (std::size_t u = 0; u < abs.inputs.size(); ++u)
    abs.input_radius.push_back(growth_radius(model, flow, half, abs.inputs.point(static_cast<InputIndex>(u))));
  return abs;
}

}  // namespace

Abstraction attach_system(const Model& model, const GridSpec& grid, const SampledFlow& flow,
                          FiniteSystem system) {
  Abstraction abs = shell(model, grid, flow);
  if (system.num_states() != abs.quantizer.num_cells() || system.num_inputs() != abs.inputs.size())
    throw IntegrityError("system has " + std::to_string(system.num_states()) + " states and " +
                         std::to_string(system.num_inputs()) + " inputs but the grid has " +
                         std::to_string(abs.quantizer.num_cells()) + " cells and " +
                         std::to_string(abs.inputs.size()) + " inputs");
  abs.system = std::move(system);
  return abs;
}

Abstraction build_abstraction(const Model& model, const GridSpec& grid, const SampledFlow& flow,
                              unsigned threads) {
  Abstraction abs = shell(model, grid, flow);
  const std::size_t cells = abs.quantizer.num_cells();
  const std::size_t m = abs.inputs.size();
  if (cells == 0) throw ConfigError("grid has no cells");

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, cells);
  std::vector<RowBlock> blocks(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto job = [&](std::size_t w) {
    try {
      TransitionWorker worker(model, abs);
      worker.run(cells * w / workers, cells * (w + 1) / workers, blocks[w]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::uint64_t> offsets;
  offsets.reserve(cells * m + 1);
  offsets.push_back(0);
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.targets.size();
  std::vector<StateIndex> targets;
  targets.reserve(total);
  for (auto& b : blocks) {
    for (std::uint32_t k : b.counts) offsets.push_back(offsets.back() + k);
    targets.insert(targets.end(), b.targets.begin(), b.targets.end());
    b = RowBlock{};
  }
  abs.system = FiniteSystem(cells, m, StateSet(cells, true), std::move(offsets), std::move(targets));
  return abs;
}

}  // namespace symopt
