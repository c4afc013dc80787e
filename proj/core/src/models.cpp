#include "sdecert/models.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "sdecert/error.hpp"

namespace sdecert {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

// ---------------------------------------------------------------- ring

RingModel::RingModel(double sigma) : sigma_(sigma) { require_positive(sigma, "ring: sigma"); }

double RingModel::potential(double x, double y) noexcept {
  const double q = x * x + y * y - 1.0;
  return q * q;
}

void RingModel::drift_into(ConstVecRef x, VecRef out) const {
  const double q = x[0] * x[0] + x[1] * x[1] - 1.0;
  out[0] = -4.0 * x[0] * q + x[1];
  out[1] = -4.0 * x[1] * q - x[0];
}

void RingModel::diffusion_into(ConstVecRef, MatRef out) const {
  out.setZero();
  out.diagonal().setConstant(sigma_);
}

double RingModel::density_unnormalized(ConstVecRef x) const {
  return std::exp(-2.0 * potential(x[0], x[1]) / (sigma_ * sigma_));
}

StateVec RingModel::default_initial_state() const { return StateVec::Unit(2, 0); }

double RingModel::normalizer() const {
  const double a = 2.0 / (sigma_ * sigma_);
  const double half_line = 0.5 * std::sqrt(std::numbers::pi / a) * (1.0 + std::erf(std::sqrt(a)));
  return std::numbers::pi * half_line;
}

// ---------------------------------------------------------------- double well

DoubleWellModel::DoubleWellModel(double r, double sigma) : r_(r), sigma_(sigma) {
  require_positive(r, "double-well: r");
  require_positive(sigma, "double-well: sigma");
}

double DoubleWellModel::potential(double x) const noexcept {
  if (x >= 4.0) return 6.0 * x * x - 60.0;
  if (x >= 0.0) return 0.25 * x * x * x * x - 2.0 * x * x + 4.0;
  if (x >= -4.0 / r_) {
    const double rx = r_ * x;
    return 0.25 * rx * rx * rx * rx - 2.0 * rx * rx + 4.0;
  }
  return 6.0 * r_ * r_ * x * x - 60.0;
}

double DoubleWellModel::potential_derivative(double x) const noexcept {
  if (x >= 4.0) return 12.0 * x;
  if (x >= 0.0) return x * x * x - 4.0 * x;
  if (x >= -4.0 / r_) {
    const double rx = r_ * x;
    return r_ * (rx * rx * rx - 4.0 * rx);
  }
  return 12.0 * r_ * r_ * x;
}

void DoubleWellModel::drift_into(ConstVecRef x, VecRef out) const { out[0] = -potential_derivative(x[0]); }

void DoubleWellModel::diffusion_into(ConstVecRef, MatRef out) const { out(0, 0) = sigma_; }

double DoubleWellModel::density_unnormalized(ConstVecRef x) const {
  return std::exp(-2.0 * potential(x[0]) / (sigma_ * sigma_));
}

StateVec DoubleWellModel::default_initial_state() const { return StateVec::Constant(1, 2.0); }

// ---------------------------------------------------------------- Langevin

double RingPotential::value(ConstVecRef x) const {
  const double q = x.squaredNorm() - 1.0;
  return q * q;
}

void RingPotential::gradient_into(ConstVecRef x, VecRef out) const { out = (4.0 * (x.squaredNorm() - 1.0)) * x; }

StateVec RingPotential::default_position() const { return StateVec::Unit(2, 0); }

LangevinModel::LangevinModel(std::shared_ptr<const Potential> potential, double gamma, double sigma)
    : potential_(std::move(potential)), gamma_(gamma), sigma_(sigma) {
  if (!potential_) throw Error("langevin: potential is null");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw Error("langevin: gamma must be nonnegative and finite");
  require_positive(sigma, "langevin: sigma");
}

void LangevinModel::drift_into(ConstVecRef x, VecRef out) const {
  const Eigen::Index d = spatial_dim();
  out.head(d) = x.tail(d);
  potential_->gradient_into(x.head(d), out.tail(d));
  out.tail(d) = -out.tail(d) - gamma_ * x.tail(d);
}

void LangevinModel::diffusion_into(ConstVecRef, MatRef out) const {
  const Eigen::Index d = spatial_dim();
  out.setZero();
  out.bottomRows(d).diagonal().setConstant(sigma_);
}

double LangevinModel::density_unnormalized(ConstVecRef x) const {
  const Eigen::Index d = spatial_dim();
  const double beta = 2.0 * gamma_ / (sigma_ * sigma_);
  return std::exp(-beta * (0.5 * x.tail(d).squaredNorm() + potential_->value(x.head(d))));
}

StateVec LangevinModel::default_initial_state() const {
  StateVec s = StateVec::Zero(dim());
  s.head(spatial_dim()) = potential_->default_position();
  return s;
}

// ---------------------------------------------------------------- Lorenz-96

Lorenz96Model::Lorenz96Model(int dimension, double forcing, double sigma)
    : dim_(dimension), forcing_(forcing), sigma_(sigma) {
  if (dimension < 4) throw Error("lorenz96: dimension must be at least 4");
  if (!std::isfinite(forcing)) throw Error("lorenz96: forcing must be finite");
  require_positive(sigma, "lorenz96: sigma");
}

ParamMap Lorenz96Model::params() const {
  return {{"D", static_cast<double>(dim_)}, {"F", forcing_}, {"sigma", sigma_}};
}

void Lorenz96Model::drift_into(ConstVecRef x, VecRef out) const {
  const Eigen::Index n = dim_;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double next = x[(i + 1) % n];
    const double prev = x[(i + n - 1) % n];
    const double prev2 = x[(i + n - 2) % n];
    out[i] = (next - prev2) * prev - x[i] + forcing_;
  }
}

void Lorenz96Model::diffusion_into(ConstVecRef, MatRef out) const {
  out.setZero();
  out.diagonal().setConstant(sigma_);
}

StateVec Lorenz96Model::default_initial_state() const {
  StateVec s = StateVec::Constant(dim_, forcing_);
  s[0] += 0.01;
  return s;
}

// ---------------------------------------------------------------- FitzHugh–Nagumo

FitzHughNagumoModel::FitzHughNagumoModel(Params p) : p_(p) {
  if (p.neurons < 2) throw Error("fhn: at least two neurons are required");
  require_positive(p.mu, "fhn: mu");
  require_positive(p.sigma, "fhn: sigma");
  if (p.d_u < 0.0 || p.w < 0.0) throw Error("fhn: coupling strengths must be nonnegative");
  inv_mu_ = 1.0 / p.mu;
  inv_sqrt_mu_ = 1.0 / std::sqrt(p.mu);
}

ParamMap FitzHughNagumoModel::params() const {
  return {{"N", static_cast<double>(p_.neurons)}, {"mu", p_.mu}, {"d_u", p_.d_u},
          {"w", p_.w},     {"sigma", p_.sigma}, {"a", p_.a}};
}

void FitzHughNagumoModel::drift_into(ConstVecRef x, VecRef out) const {
  const Eigen::Index n = p_.neurons;
  const auto u = x.head(n);
  const auto v = x.tail(n);
  const double mean_u = u.mean();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ui = u[i];
    const double laplacian = u[(i + 1) % n] + u[(i + n - 1) % n] - 2.0 * ui;
    out[i] = inv_mu_ * (ui - ui * ui * ui / 3.0) - inv_sqrt_mu_ * v[i] + p_.d_u * inv_mu_ * laplacian +
             p_.w * inv_mu_ * (mean_u - ui);
    out[n + i] = inv_sqrt_mu_ * (ui + p_.a);
  }
}

void FitzHughNagumoModel::diffusion_into(ConstVecRef, MatRef out) const {
  out.setZero();
  out.diagonal().setConstant(p_.sigma * inv_sqrt_mu_);
}

StateVec FitzHughNagumoModel::default_initial_state() const {
  // deterministic rest state of an isolated neuron
  const Eigen::Index n = p_.neurons;
  const double u = -p_.a;
  const double v = (u - u * u * u / 3.0) * std::sqrt(p_.mu);
  StateVec s(2 * n);
  s.head(n).setConstant(u);
  s.tail(n).setConstant(v);
  return s;
}

// ---------------------------------------------------------------- function-backed

FunctionModel::FunctionModel(Spec spec) : spec_(std::move(spec)) {
  if (spec_.dim < 1 || spec_.noise_dim < 1) throw Error(spec_.name + ": dimensions must be positive");
  if (!spec_.drift || !spec_.diffusion) throw Error(spec_.name + ": drift and diffusion are required");
}

void FunctionModel::diffusion_diagonal_derivative_into(ConstVecRef x, VecRef out) const {
  if (!spec_.diffusion_diagonal_derivative) SdeModel::diffusion_diagonal_derivative_into(x, out);
  spec_.diffusion_diagonal_derivative(x, out);
}

double FunctionModel::density_unnormalized(ConstVecRef x) const {
  if (!spec_.density) return SdeModel::density_unnormalized(x);
  return spec_.density(x);
}

ModelPtr make_ornstein_uhlenbeck(double theta, double sigma) {
  FunctionModel::Spec spec;
  spec.name = "ornstein-uhlenbeck";
  spec.dim = 1;
  spec.noise_dim = 1;
  spec.drift = [theta](ConstVecRef x, VecRef out) { out[0] = -theta * x[0]; };
  spec.diffusion = [sigma](ConstVecRef, MatRef out) { out(0, 0) = sigma; };
  spec.constant_diffusion = true;
  if (sigma > 0.0 && theta > 0.0) {
    spec.density = [theta, sigma](ConstVecRef x) { return std::exp(-theta * x[0] * x[0] / (sigma * sigma)); };
  }
  spec.params = {{"theta", theta}, {"sigma", sigma}};
  return std::make_shared<FunctionModel>(std::move(spec));
}

}  // namespace sdecert
