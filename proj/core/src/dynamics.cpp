#include "symopt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "symopt/errors.hpp"

namespace symopt {

Model::Model(std::string name, std::size_t state_dim, std::size_t input_dim, VectorField f,
             GrowthBound growth)
    : name_(std::move(name)),
      state_dim_(state_dim),
      input_dim_(input_dim),
      field_(std::move(f)),
      growth_(std::move(growth)) {
  if (state_dim_ == 0) throw ConfigError("model '" + name_ + "' has zero state dimension");
  if (!field_) throw ConfigError("model '" + name_ + "' has no vector field");
  const auto n = static_cast<Eigen::Index>(state_dim_);
  const Eigen::MatrixXd& m = std::visit(
      [](const auto& g) -> const Eigen::MatrixXd& {
        if constexpr (std::is_same_v<std::decay_t<decltype(g)>, LinearGrowth>)
          return g.a;
        else
          return g.l;
      },
      growth_);
  if (m.rows() != n || m.cols() != n)
    throw ConfigError("model '" + name_ + "' growth matrix must be " + std::to_string(n) + "x" +
                      std::to_string(n));
  if (const auto* c = std::get_if<ContractionGrowth>(&growth_)) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j && c->l(i, j) < 0)
          throw ConfigError("model '" + name_ + "' contraction matrix has a negative off-diagonal entry");
  }
}

SampledFlow SampledFlow::with_default_substeps(double tau) {
  // ceil(tau / (tau / 10))
  return SampledFlow{tau, 10};
}

void SampledFlow::validate() const {
  if (!(tau > 0) || !std::isfinite(tau)) throw ConfigError("sampling period tau must be > 0");
  if (substeps < 1) throw ConfigError("integration substeps must be >= 1");
}

Model double_integrator() {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 0, 0;
  return Model(
      "double_integrator", 2, 1,
      [](std::span<const double> x, std::span<const double> u, std::span<double> dx) {
        dx[0] = x[1];
        dx[1] = u[0];
      },
      LinearGrowth{a});
}

Eigen::MatrixXd unicycle_growth_matrix(double v_max) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(3, 3);
  l(0, 2) = std::abs(v_max);
  l(1, 2) = std::abs(v_max);
  return l;
}

namespace {
void unicycle_field(std::span<const double> x, std::span<const double> u, std::span<double> dx) {
  dx[0] = u[0] * std::cos(x[2]);
  dx[1] = u[0] * std::sin(x[2]);
  dx[2] = u[1];
}
}  // namespace

Model unicycle(const Eigen::MatrixXd& growth_l) {
  return Model("unicycle", 3, 2, unicycle_field, ContractionGrowth{growth_l, {}});
}

Model unicycle_input_growth(double v_max) {
  return Model("unicycle", 3, 2, unicycle_field,
               ContractionGrowth{unicycle_growth_matrix(v_max), [](std::span<const double> u) {
                                   return unicycle_growth_matrix(u[0]);
                                 }});
}

Rk4Integrator::Rk4Integrator(const Model& model)
    : model_(&model),
      k1_(model.state_dim()),
      k2_(model.state_dim()),
      k3_(model.state_dim()),
      k4_(model.state_dim()),
      tmp_(model.state_dim()) {}

namespace {

[[noreturn]] void diverged(std::span<const double> x, std::span<const double> u) {
  std::ostringstream msg;
  msg << "integration diverged from state (";
  for (std::size_t i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x[i];
  msg << ") under input (";
  for (std::size_t i = 0; i < u.size(); ++i) msg << (i ? ", " : "") << u[i];
  msg << ")";
  throw DivergenceError(msg.str());
}

}  // namespace

void Rk4Integrator::step(const SampledFlow& flow, std::span<double> x,
                         std::span<const double> u) {
  const std::size_t n = model_->state_dim();
  const auto& f = model_->field();
  const double h = flow.tau / static_cast<double>(flow.substeps);
  const double h2 = h / 2;
  const double h6 = h / 6;
  const Vector x0(x.begin(), x.end());

  for (std::size_t s = 0; s < flow.substeps; ++s) {
    f(x, u, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h2 * k1_[i];
    f(tmp_, u, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h2 * k2_[i];
    f(tmp_, u, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * k3_[i];
    f(tmp_, u, k4_);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += h6 * (k1_[i] + 2 * k2_[i] + 2 * k3_[i] + k4_[i]);
      if (!std::isfinite(x[i])) diverged(x0, u);
    }
  }
}

Vector integrate(const Model& model, const SampledFlow& flow, std::span<const double> x,
                 std::span<const double> u) {
  flow.validate();
  if (x.size() != model.state_dim() || u.size() != model.input_dim())
    throw std::invalid_argument("state/input dimension does not match model '" + model.name() +
                                "'");
  for (double v : x)
    if (!std::isfinite(v)) diverged(x, u);
  Vector out(x.begin(), x.end());
  Rk4Integrator(model).step(flow, out, u);
  return out;
}

Vector growth_radius(const Model& model, const SampledFlow& flow, double r) {
  return growth_radius(model, flow, Vector(model.state_dim(), r));
}

namespace {

Vector contraction_radius(const Eigen::MatrixXd& l, double tau, std::span<const double> r) {
  const auto n = static_cast<Eigen::Index>(r.size());
  const Eigen::MatrixXd e = (l * tau).exp();
  Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
  const Eigen::VectorXd grown = e * rv;
  Vector out(r.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(grown(i))) throw DivergenceError("matrix exponential overflow in growth bound");
    out[static_cast<std::size_t>(i)] = grown(i);
  }
  return out;
}

}  // namespace

Vector growth_radius(const Model& model, const SampledFlow& flow, std::span<const double> r,
                     std::span<const double> u) {
  const auto* con = std::get_if<ContractionGrowth>(&model.growth());
  if (con == nullptr || !con->per_input) return growth_radius(model, flow, r);
  flow.validate();
  if (r.size() != model.state_dim() || u.size() != model.input_dim())
    throw std::invalid_argument("radius or input dimension does not match model '" + model.name() + "'");
  for (double v : r)
    if (!(v >= 0)) throw std::invalid_argument("growth radius must be non-negative");
  const Eigen::MatrixXd l = con->per_input(u);
  if (l.rows() != con->l.rows() || l.cols() != con->l.cols())
    throw ConfigError("model '" + model.name() + "' per-input growth matrix has the wrong size");
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    for (Eigen::Index j = 0; j < l.cols(); ++j)
      if ((i != j && l(i, j) < 0) || l(i, j) > con->l(i, j))
        throw ConfigError("model '" + model.name() +
                          "' per-input growth matrix is negative off the diagonal or exceeds the envelope");
  return contraction_radius(l, flow.tau, r);
}

Vector growth_radius(const Model& model, const SampledFlow& flow, std::span<const double> r) {
  flow.validate();
  if (r.size() != model.state_dim())
    throw std::invalid_argument("radius dimension does not match model '" + model.name() + "'");
  for (double v : r)
    if (!(v >= 0)) throw std::invalid_argument("growth radius must be non-negative");

  Vector out(model.state_dim());
  if (const auto* lin = std::get_if<LinearGrowth>(&model.growth())) {
    const Eigen::MatrixXd e = (lin->a * flow.tau).exp();
    const double norm = e.cwiseAbs().rowwise().sum().maxCoeff();
    if (!std::isfinite(norm)) throw DivergenceError("matrix exponential overflow in growth bound");
    const double rmax = *std::max_element(r.begin(), r.end());
    std::fill(out.begin(), out.end(), norm * rmax);
  } else {
    out = contraction_radius(std::get<ContractionGrowth>(model.growth()).l, flow.tau, r);
  }
  return out;
}

}  // namespace symopt
