#include "sdecert/integrate.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sdecert/models.hpp"

namespace sdecert {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::EulerMaruyama:
      return "euler-maruyama";
    case Scheme::Milstein:
      return "milstein";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "euler-maruyama" || text == "em") return Scheme::EulerMaruyama;
  if (text == "milstein") return Scheme::Milstein;
  throw Error("unknown scheme '" + std::string(text) + "' (expected euler-maruyama or milstein)");
}

double default_strong_order(Scheme scheme, const SdeModel& model) {
  if (scheme == Scheme::Milstein || model.constant_diffusion()) return 1.0;
  return 0.5;
}

double richardson_constant(double strong_order) {
  if (!(strong_order > 0.0)) throw Error("strong order must be positive");
  return 1.0 / (std::exp2(strong_order) - 1.0);
}

std::int64_t step_count(double T, double h) {
  if (!(h > 0.0) || !(T > 0.0) || !std::isfinite(T) || !std::isfinite(h)) {
    throw Error("time horizon and step size must be positive");
  }
  const double ratio = T / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw Error("T = " + std::to_string(T) + " is not an integer multiple of " + std::to_string(h));
  }
  return static_cast<std::int64_t>(rounded);
}

namespace {

void check_step_args(const SdeModel& model, ConstVecRef x, double h, ConstVecRef dW) {
  model.check_state(x);
  if (dW.size() != model.noise_dim()) {
    throw DimensionError(model.name() + ": noise increment has length " + std::to_string(dW.size()) +
                         ", expected " + std::to_string(model.noise_dim()));
  }
  if (!(h > 0.0)) throw Error("step size must be positive");
}

bool is_diagonal(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

Stepper::Stepper(ModelPtr model, Scheme scheme) : model_(std::move(model)), scheme_(scheme) {
  if (!model_) throw Error("stepper: model is null");
  const Eigen::Index n = model_->dim();
  const Eigen::Index m = model_->noise_dim();
  drift_.resize(n);
  sigma_.resize(n, m);
  constant_ = model_->constant_diffusion();
  if (constant_) {
    model_->diffusion_into(StateVec::Zero(n), sigma_);
    diagonal_ = is_diagonal(sigma_);
    if (diagonal_) sigma_diag_ = sigma_.diagonal();
  } else if (scheme_ == Scheme::Milstein) {
    if (n != m || !model_->has_diffusion_derivative()) {
      throw Error(model_->name() +
                  ": Milstein with state-dependent diffusion needs diagonal noise and dσ_ii/dx_i "
                  "(general Lévy-area schemes are not supported)");
    }
    derivative_.resize(n);
  }
}

void Stepper::add_noise(VecRef x, ConstVecRef dW) const {
  if (diagonal_) {
    x.array() += sigma_diag_.array() * dW.array();
  } else {
    x.noalias() += sigma_ * dW;
  }
}

void Stepper::step(VecRef x, double h, ConstVecRef dW) {
  model_->drift_into(x, drift_);
  if (constant_) {
    x += h * drift_;
    add_noise(x, dW);
    return;
  }
  model_->diffusion_into(x, sigma_);
  if (scheme_ == Scheme::Milstein) {
    if (!is_diagonal(sigma_)) {
      throw Error(model_->name() + ": Milstein correction requires diagonal diffusion");
    }
    model_->diffusion_diagonal_derivative_into(x, derivative_);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double s = sigma_(i, i);
      const double w = dW[i];
      x[i] += h * drift_[i] + s * w + 0.5 * s * derivative_[i] * (w * w - h);
    }
    return;
  }
  x += h * drift_;
  x.noalias() += sigma_ * dW;
}

StateVec em_step(const SdeModel& model, ConstVecRef x, double h, ConstVecRef dW, double t) {
  check_step_args(model, x, h, dW);
  StateVec out = x + h * model.drift(x) + model.diffusion(x) * dW;
  if (!out.allFinite()) throw DivergenceError(t + h, model.name() + ": Euler-Maruyama step diverged");
  return out;
}

StateVec milstein_step(const SdeModel& model, ConstVecRef x, double h, ConstVecRef dW, double t) {
  check_step_args(model, x, h, dW);
  if (model.constant_diffusion()) return em_step(model, x, h, dW, t);
  const Eigen::MatrixXd sigma = model.diffusion(x);
  if (model.dim() != model.noise_dim() || !is_diagonal(sigma) || !model.has_diffusion_derivative()) {
    throw Error(model.name() + ": Milstein correction requires diagonal state-dependent diffusion");
  }
  StateVec derivative(model.dim());
  model.diffusion_diagonal_derivative_into(x, derivative);
  StateVec out = x + h * model.drift(x);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double s = sigma(i, i);
    out[i] += s * dW[i] + 0.5 * s * derivative[i] * (dW[i] * dW[i] - h);
  }
  if (!out.allFinite()) throw DivergenceError(t + h, model.name() + ": Milstein step diverged");
  return out;
}

FineCoarsePair paired_fine_coarse(Stepper& stepper, ConstVecRef x0, double h, double T, NoiseStream& stream) {
  return paired_fine_coarse(stepper, x0, h, T, stream, [](std::int64_t, const StateVec&) {});
}

FineCoarsePair paired_fine_coarse(ModelPtr model, Scheme scheme, ConstVecRef x0, double h, double T,
                                  NoiseStream& stream) {
  model->check_state(x0);
  Stepper stepper(std::move(model), scheme);
  return paired_fine_coarse(stepper, x0, h, T, stream);
}

Trajectory simulate(Stepper& stepper, ConstVecRef x0, double h, std::int64_t steps, NoiseStream& stream,
                    std::int64_t record_every) {
  stepper.model().check_state(x0);
  if (steps < 0 || record_every < 1) throw Error("simulate: invalid step counts");
  Trajectory traj;
  StateVec x = x0;
  StateVec dw(stepper.noise_dim());
  const double scale = std::sqrt(h);
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  for (std::int64_t k = 1; k <= steps; ++k) {
    stream.fill_normal(dw, scale);
    stepper.step(x, h, dw);
    if (!x.allFinite()) throw DivergenceError(static_cast<double>(k) * h, stepper.model().name() + ": diverged");
    if (k % record_every == 0) {
      traj.times.push_back(static_cast<double>(k) * h);
      traj.states.push_back(x);
    }
  }
  return traj;
}

GaussianParams em_step_density(const SdeModel& model, ConstVecRef x, double h) {
  if (!model.constant_diffusion()) throw Error(model.name() + ": one-step density needs constant diffusion");
  const Eigen::MatrixXd sigma = model.diffusion(x);
  return {x + h * model.drift(x), h * sigma * sigma.transpose()};
}

GaussianParams langevin_two_step_density(const LangevinModel& model, ConstVecRef state, double h) {
  model.check_state(state);
  if (!(h > 0.0)) throw Error("step size must be positive");
  const Eigen::Index d = model.spatial_dim();
  const double sigma = model.sigma();
  const double gamma = model.gamma();

  // mean: two noise-free Euler–Maruyama steps
  const StateVec zero = StateVec::Zero(d);
  const StateVec mid = em_step(model, state, h, zero);
  StateVec mean = em_step(model, mid, h, zero);

  const double a = sigma * h * std::sqrt(h);               // N₀ → X'
  const double b = sigma * (1.0 - gamma * h) * std::sqrt(h);  // N₀ → V'
  const double c = sigma * std::sqrt(h);                   // N₁ → V'
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    cov(i, i) = a * a;
    cov(i, d + i) = a * b;
    cov(d + i, i) = a * b;
    cov(d + i, d + i) = b * b + c * c;
  }
  return {std::move(mean), std::move(cov)};
}

GaussianQuadraticForm::GaussianQuadraticForm(const Eigen::MatrixXd& covariance) : llt_(covariance) {
  if (llt_.info() != Eigen::Success) throw Error("covariance is not positive definite");
}

double GaussianQuadraticForm::mahalanobis_squared(ConstVecRef deviation) const {
  return llt_.matrixL().solve(deviation).squaredNorm();
}

void GaussianQuadraticForm::whiten(ConstVecRef deviation, VecRef out) const {
  out = llt_.matrixL().solve(deviation);
}

}  // namespace sdecert
