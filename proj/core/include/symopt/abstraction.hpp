#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "symopt/dynamics.hpp"
#include "symopt/fts.hpp"

namespace symopt {

/* closed axis-aligned box */
struct Box {
  Vector lo;
  Vector hi;

  [[nodiscard]] std::size_t dim() const noexcept { return lo.size(); }
  friend bool operator==(const Box&, const Box&) = default;
};

/* struct: GridSpec
 *
 * quantization parameters of the abstraction
 *
 * - state cells are centered at domain.lo + i*eta on every axis,
 *   i = 0 .. floor((hi-lo)/eta), and have radius eta/2 (epsilon)
 * - a periodic axis covers [lo, hi) as a circle; it gets
 *   ceil((hi-lo)/eta) cells so the cells tile the circle exactly, which
 *   makes its step (hi-lo)/cells <= eta
 * - inputs are the points input_box.lo + k*mu, k = 0 .. floor((hi-lo)/mu)
 * - overlap picks which cells count as successors of an over-approximation
 *   box: those sharing interior with it (default) or every cell whose
 *   closed box touches it
 */
enum class Overlap { Interior, Closed };

struct GridSpec {
  double tau = 1.0;
  double eta = 1.0;
  double mu = 1.0;
  Box domain;
  Box input_box;
  std::vector<bool> periodic;  // empty = no periodic axis
  Overlap overlap = Overlap::Interior;

  [[nodiscard]] double epsilon() const noexcept { return eta / 2; }
  [[nodiscard]] std::size_t state_dim() const noexcept { return domain.dim(); }
  [[nodiscard]] std::size_t input_dim() const noexcept { return input_box.dim(); }
  [[nodiscard]] bool is_periodic(std::size_t axis) const noexcept {
    return axis < periodic.size() && periodic[axis];
  }
  /* throws ConfigError naming the offending field */
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/* relative tolerance (in units of the axis step) under which two grid
 * boundaries are treated as coincident */
inline constexpr double kGridTolerance = 1e-9;

/* class: Quantizer
 *
 * bijection between flat state indices and integer cell coordinates
 * (axis 0 varies fastest) and the map from concrete points to cells. The
 * relation R = {(c, x) : |x - center(c)|_inf <= eta/2} is realized as
 * "x lies in the closed box of c".
 */
class Quantizer {
 public:
  Quantizer() = default;
  explicit Quantizer(const GridSpec& grid);

  [[nodiscard]] std::size_t dim() const noexcept { return counts_.size(); }
  [[nodiscard]] std::size_t num_cells() const noexcept { return num_cells_; }
  [[nodiscard]] std::size_t cells_on_axis(std::size_t axis) const { return counts_.at(axis); }
  [[nodiscard]] double step(std::size_t axis) const { return steps_.at(axis); }
  [[nodiscard]] double origin(std::size_t axis) const { return origin_.at(axis); }
  [[nodiscard]] bool is_periodic(std::size_t axis) const { return periodic_.at(axis); }
  [[nodiscard]] double period(std::size_t axis) const { return steps_.at(axis) * counts_.at(axis); }

  [[nodiscard]] StateIndex flat(std::span<const std::size_t> coords) const;
  [[nodiscard]] std::vector<std::size_t> coords(StateIndex cell) const;
  [[nodiscard]] Vector center(StateIndex cell) const;
  /* closed cell box; on a periodic axis the interval is not wrapped */
  [[nodiscard]] Box cell_box(StateIndex cell) const;

  /* cell containing x, rounding half up between centers; nullopt when x
   * is outside the cells of a non-periodic axis */
  [[nodiscard]] std::optional<StateIndex> quantize(std::span<const double> x) const;
  /* every cell whose closed box contains x (up to kGridTolerance), sorted:
   * the cells related to x; more than one only on shared faces */
  [[nodiscard]] std::vector<StateIndex> related(std::span<const double> x) const;
  /* wraps periodic coordinates into [origin, origin + period) */
  void normalize(std::span<double> x) const;

  /* [lo, hi] on a non-periodic axis inside which over-approximation boxes
   * must stay: the domain intersected with the union of the cells */
  [[nodiscard]] double region_lo(std::size_t axis) const { return region_lo_.at(axis); }
  [[nodiscard]] double region_hi(std::size_t axis) const { return region_hi_.at(axis); }

  friend bool operator==(const Quantizer&, const Quantizer&) = default;

 private:
  std::vector<std::size_t> counts_;
  std::vector<double> steps_;
  std::vector<double> origin_;
  std::vector<bool> periodic_;
  std::vector<double> region_lo_;
  std::vector<double> region_hi_;
  std::size_t num_cells_ = 0;
};

/* finite input alphabet: grid points of the input box */
class InputGrid {
 public:
  InputGrid() = default;
  explicit InputGrid(const GridSpec& grid);

  [[nodiscard]] std::size_t size() const noexcept { return num_inputs_; }
  [[nodiscard]] std::size_t dim() const noexcept { return counts_.size(); }
  [[nodiscard]] Vector point(InputIndex u) const;
  /* index of the grid point closest to u (per axis) */
  [[nodiscard]] InputIndex nearest(std::span<const double> u) const;

 private:
  std::vector<std::size_t> counts_;
  Vector lo_;
  Vector hi_;
  double mu_ = 1.0;
  std::size_t num_inputs_ = 0;
};

/* struct: TargetSpec
 *
 * union of closed boxes in concrete coordinates; coordinates flagged in
 * `ignored` are unconstrained (e.g. the heading of a vehicle). An
 * infinity-norm ball is the box center +- radius.
 */
struct TargetSpec {
  std::vector<Box> boxes;
  std::vector<bool> ignored;

  static TargetSpec ball(std::span<const double> center, double radius);
  static TargetSpec box(Box b);

  [[nodiscard]] bool is_ignored(std::size_t axis) const noexcept {
    return axis < ignored.size() && ignored[axis];
  }
  /* concrete membership; periodic coordinates are not wrapped here */
  [[nodiscard]] bool contains(std::span<const double> x) const;
};

/* cells whose closed box lies inside a single box of W (exact floor of W
 * for a single box, a sound under-approximation for unions). Both lifts
 * clip cell boxes to the region, since R(c) only holds concrete states. */
[[nodiscard]] StateSet target_under(const Quantizer& quantizer, const TargetSpec& w);
/* cells whose closed box intersects W (exact ceil of W) */
[[nodiscard]] StateSet target_over(const Quantizer& quantizer, const TargetSpec& w);

struct Abstraction {
  GridSpec grid;
  Quantizer quantizer;
  InputGrid inputs;
  SampledFlow flow;
  /* per-coordinate over-approximation radius around the nominal successor,
   * valid for every input */
  Vector radius;
  /* radius used for each grid input; equals `radius` unless the growth
   * bound is input dependent */
  std::vector<Vector> input_radius;
  FiniteSystem system;
};

/* Builds S_abs. For every cell c and grid input u the nominal successor
 * x' = integrate(center(c), u) is inflated by growth_radius(eta/2, u); u
 * is disabled at c when the inflated box leaves the region, otherwise the
 * successors are the cells meeting it in the sense of grid.overlap. Cells
 * touching the box only on a face are not needed for soundness: the
 * relation is closed, so a point on a shared face is related to the cell
 * on the inner side as well. All cells are initial. Rows are computed by `threads` workers and merged in index
 * order, so the result does not depend on the thread count. */
[[nodiscard]] Abstraction build_abstraction(const Model& model, const GridSpec& grid,
                                            const SampledFlow& flow, unsigned threads = 1);
[[nodiscard]] Abstraction build_abstraction(const Model& model, const GridSpec& grid,
                                            unsigned threads = 1);

/* an abstraction whose transitions were computed earlier (e.g. read from a
 * file); throws IntegrityError when the system does not fit the grid */
[[nodiscard]] Abstraction attach_system(const Model& model, const GridSpec& grid,
                                        const SampledFlow& flow, FiniteSystem system);

}  // namespace symopt
