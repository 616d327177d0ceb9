#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace symopt {

using Vector = std::vector<double>;

/* dx = f(x, u); dx is preallocated with the state dimension */
using VectorField =
    std::function<void(std::span<const double> x, std::span<const double> u, std::span<double> dx)>;

/* linear part A of the dynamics; beta(r, tau) = ||exp(A tau)||_inf * r */
struct LinearGrowth {
  Eigen::MatrixXd a;
};

/* componentwise bound: |d/dt (x - x')_i| <= sum_j L_ij |x_j - x'_j| with L
 * having non-negative off-diagonal entries; beta(r, tau) = exp(L tau) r.
 * per_input optionally gives a tighter L(u) valid while u is held constant;
 * it must stay below l entrywise. */
struct ContractionGrowth {
  Eigen::MatrixXd l;
  std::function<Eigen::MatrixXd(std::span<const double> u)> per_input;
};

using GrowthBound = std::variant<LinearGrowth, ContractionGrowth>;

/* class: Model
 *
 * continuous-time control system dx/dt = f(x, u) together with the data
 * needed to over-approximate the tau-step reachable set of a cell
 */
class Model {
 public:
  Model(std::string name, std::size_t state_dim, std::size_t input_dim, VectorField f,
        GrowthBound growth);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::size_t state_dim() const noexcept { return state_dim_; }
  [[nodiscard]] std::size_t input_dim() const noexcept { return input_dim_; }
  [[nodiscard]] const VectorField& field() const noexcept { return field_; }
  [[nodiscard]] const GrowthBound& growth() const noexcept { return growth_; }

 private:
  std::string name_;
  std::size_t state_dim_;
  std::size_t input_dim_;
  VectorField field_;
  GrowthBound growth_;
};

/* sampling period and number of RK4 substeps per period */
struct SampledFlow {
  double tau = 1.0;
  std::size_t substeps = 1;

  /* smallest substep count with step <= tau / 10 */
  static SampledFlow with_default_substeps(double tau);
  /* throws ConfigError */
  void validate() const;
};

/* xi' = x2, x2' = u on R^2 with |u| <= 1 */
[[nodiscard]] Model double_integrator();

/* x' = v cos(theta), y' = v sin(theta), theta' = omega; inputs (v, omega).
 * growth_l is the 3x3 contraction matrix supplied by the caller. */
[[nodiscard]] Model unicycle(const Eigen::MatrixXd& growth_l);
/* same dynamics with L(u) = unicycle_growth_matrix(|v|) per input and
 * unicycle_growth_matrix(v_max) as the envelope */
[[nodiscard]] Model unicycle_input_growth(double v_max);

/* Contraction matrix for the unicycle with |v| <= v_max: the position rows
 * depend on theta with gain v_max, nothing else couples. */
[[nodiscard]] Eigen::MatrixXd unicycle_growth_matrix(double v_max);

/* fixed-step classic Runge-Kutta integrator; owns its stage buffers so one
 * instance per thread avoids allocation in the abstraction loop */
class Rk4Integrator {
 public:
  explicit Rk4Integrator(const Model& model);

  /* integrates x in place over one sampling period with u held constant;
   * throws DivergenceError on a non-finite intermediate value */
  void step(const SampledFlow& flow, std::span<double> x, std::span<const double> u);

 private:
  const Model* model_;
  Vector k1_, k2_, k3_, k4_, tmp_;
};

/* xi_{x,u}(tau) approximated with RK4 */
[[nodiscard]] Vector integrate(const Model& model, const SampledFlow& flow,
                               std::span<const double> x, std::span<const double> u);

/* Per-coordinate radius of a box that contains xi_{x',u}(tau) for every x'
 * with |x' - x|_inf <= r around the nominal xi_{x,u}(tau). Throws
 * DivergenceError when the matrix exponential overflows. */
[[nodiscard]] Vector growth_radius(const Model& model, const SampledFlow& flow, double r);
/* same with a per-coordinate initial radius */
[[nodiscard]] Vector growth_radius(const Model& model, const SampledFlow& flow,
                                   std::span<const double> r);
/* radius for one held input; differs from the above only when the growth
 * bound has a per-input matrix */
[[nodiscard]] Vector growth_radius(const Model& model, const SampledFlow& flow,
                                   std::span<const double> r, std::span<const double> u);

}  // namespace symopt
