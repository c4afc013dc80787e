#include "sdecert/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "sdecert/models.hpp"

namespace sdecert {

std::string_view to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::Reflection:
      return "reflection";
    case CouplingKind::Synchronous:
      return "synchronous";
    case CouplingKind::Maximal:
      return "maximal";
    case CouplingKind::Mixed:
      return "mixed";
    case CouplingKind::LangevinMixed:
      return "langevin-mixed";
  }
  return "unknown";
}

CouplingKind parse_coupling_kind(std::string_view text) {
  for (auto kind : {CouplingKind::Reflection, CouplingKind::Synchronous, CouplingKind::Maximal, CouplingKind::Mixed,
                    CouplingKind::LangevinMixed}) {
    if (text == to_string(kind)) return kind;
  }
  throw Error("unknown coupling kind '" + std::string(text) +
              "' (expected reflection, synchronous, maximal, mixed or langevin-mixed)");
}

double default_q_switch(double h) { return 0.08 * std::sqrt(h / 0.001); }

PairCoupler::PairCoupler(ModelPtr model, double h, CouplingPolicy policy)
    : stepper_(std::move(model), Scheme::EulerMaruyama), h_(h), sqrt_h_(std::sqrt(h)), policy_(policy) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error("coupling: step size must be positive");
  if (policy_.switch_threshold && !(*policy_.switch_threshold >= 0.0)) {
    throw Error("coupling: switch threshold must be nonnegative");
  }
  if (policy_.q_switch && !(*policy_.q_switch >= 0.0)) throw Error("coupling: q_switch must be nonnegative");
  if (!(policy_.window_multiplier >= 0.0)) throw Error("coupling: window multiplier must be nonnegative");

  const SdeModel& m = stepper_.model();
  const Eigen::Index n = m.dim();
  const Eigen::Index k = m.noise_dim();
  if (!m.constant_diffusion() && policy_.kind != CouplingKind::Synchronous) {
    throw Error("coupling: " + std::string(to_string(policy_.kind)) + " coupling needs state-independent σ");
  }

  if (m.constant_diffusion() && n == k) {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(stepper_.constant_sigma());
    if (lu.isInvertible()) {
      square_sigma_ = true;
      sigma_inv_ = lu.inverse();
    }
  }
  if (m.constant_diffusion()) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(stepper_.constant_sigma());
    switch_threshold_ = policy_.switch_threshold.value_or(2.0 * sqrt_h_ * svd.singularValues()[0]);
  }
  q_switch_ = policy_.q_switch.value_or(default_q_switch(h));

  switch (policy_.kind) {
    case CouplingKind::Reflection:
    case CouplingKind::Maximal:
    case CouplingKind::Mixed:
      require_square_sigma(to_string(policy_.kind).data());
      break;
    case CouplingKind::LangevinMixed:
      langevin_ = dynamic_cast<const LangevinModel*>(&m);
      if (langevin_ == nullptr) throw Error("coupling: langevin-mixed policy needs a Langevin model");
      if (!(langevin_->gamma() > 0.0)) throw Error("coupling: langevin-mixed policy needs friction gamma > 0");
      two_step_form_ = GaussianQuadraticForm(langevin_two_step_density(*langevin_, m.default_initial_state(), h).covariance);
      break;
    case CouplingKind::Synchronous:
      break;
  }

  for (StateVec* v : {&dw1_, &dw2_, &xi1_, &xi2_, &delta_}) v->resize(k);
  for (StateVec* v : {&e_, &diff_, &mean1_, &mean2_, &z1_, &z2_, &dev_}) v->resize(n);
  if (square_sigma_) delta_.resize(n);
}

void PairCoupler::require_square_sigma(const char* what) const {
  if (!square_sigma_) {
    throw Error(std::string("coupling: ") + what + " coupling needs a square invertible diffusion matrix");
  }
}

CoupledState PairCoupler::make_state(ConstVecRef x, ConstVecRef y) const {
  model().check_state(x);
  model().check_state(y);
  CoupledState s{StateVec(x), StateVec(y), false, 0, 0.0};
  s.coupled = (s.x1 == s.x2);
  return s;
}

void PairCoupler::advance(CoupledState& s, std::int64_t steps) {
  s.step += steps;
  s.t = static_cast<double>(s.step) * h_;
}

void PairCoupler::step_coupled(CoupledState& s, NoiseStream& stream) {
  stream.fill_normal(dw1_, sqrt_h_);
  stepper_.step(s.x1, h_, dw1_);
  s.x2 = s.x1;
  advance(s, 1);
  last_branch_ = CouplingBranch::AlreadyCoupled;
}

void PairCoupler::reflection_step(CoupledState& s, ConstVecRef dW) {
  require_square_sigma("reflection");
  if (s.coupled) throw Error("reflection step on a coupled pair");
  diff_ = s.x1 - s.x2;
  e_.noalias() = sigma_inv_ * diff_;
  const double norm = e_.norm();
  if (!(norm > 0.0)) throw Error("reflection step: x1 == x2, reflection direction undefined");
  e_ /= norm;
  dw2_ = dW - (2.0 * e_.dot(dW)) * e_;
  stepper_.step(s.x1, h_, dW);
  stepper_.step(s.x2, h_, dw2_);
  advance(s, 1);
  last_branch_ = CouplingBranch::Reflection;
}

void PairCoupler::synchronous_step(CoupledState& s, ConstVecRef dW) {
  stepper_.step(s.x1, h_, dW);
  stepper_.step(s.x2, h_, dW);
  advance(s, 1);
  last_branch_ = CouplingBranch::Synchronous;
}

void PairCoupler::maximal_step(CoupledState& s, NoiseStream& stream) {
  require_square_sigma("maximal");
  if (s.coupled) {
    step_coupled(s, stream);
    return;
  }
  const SdeModel& m = model();
  m.drift_into(s.x1, mean1_);
  m.drift_into(s.x2, mean2_);
  mean1_ = s.x1 + h_ * mean1_;
  mean2_ = s.x2 + h_ * mean2_;

  stream.fill_normal(xi1_);
  stream.fill_normal(xi2_);
  diff_ = mean1_ - mean2_;
  delta_.noalias() = sigma_inv_ * diff_;
  delta_ /= sqrt_h_;

  // log p1 − log p2 at each proposal, in whitened coordinates
  const double half_delta_sq = 0.5 * delta_.squaredNorm();
  const double log_ratio1 = xi1_.dot(delta_) + half_delta_sq;
  const double log_ratio2 = xi2_.dot(delta_) - half_delta_sq;
  const double r = std::exp(-std::abs(log_ratio1) - std::abs(log_ratio2));
  last_acceptance_ = std::isfinite(r) ? std::clamp(r, 0.0, 1.0) : 0.0;

  const Eigen::MatrixXd& sigma = stepper_.constant_sigma();
  const double u = stream.uniform();
  if (u < last_acceptance_) {
    s.x2.noalias() = mean2_ + sqrt_h_ * (sigma * xi2_);
    s.x1 = s.x2;
    s.coupled = true;
  } else {
    s.x1.noalias() = mean1_ + sqrt_h_ * (sigma * xi1_);
    s.x2.noalias() = mean2_ + sqrt_h_ * (sigma * xi2_);
  }
  advance(s, 1);
  last_branch_ = CouplingBranch::Maximal;
}

void PairCoupler::mixed_step(CoupledState& s, NoiseStream& stream) {
  if (s.coupled) {
    step_coupled(s, stream);
    return;
  }
  if ((s.x1 - s.x2).norm() >= switch_threshold_) {
    stream.fill_normal(dw1_, sqrt_h_);
    reflection_step(s, dw1_);
  } else {
    maximal_step(s, stream);
  }
}

void PairCoupler::langevin_two_step_maximal(CoupledState& s, NoiseStream& stream) {
  const Eigen::Index d = langevin_->spatial_dim();
  const StateVec zero = StateVec::Zero(d);

  // noise-free two-step means
  mean1_ = s.x1;
  stepper_.step(mean1_, h_, zero);
  stepper_.step(mean1_, h_, zero);
  mean2_ = s.x2;
  stepper_.step(mean2_, h_, zero);
  stepper_.step(mean2_, h_, zero);

  // independent two-step proposals
  z1_ = s.x1;
  stream.fill_normal(dw1_, sqrt_h_);
  stepper_.step(z1_, h_, dw1_);
  stream.fill_normal(dw1_, sqrt_h_);
  stepper_.step(z1_, h_, dw1_);
  z2_ = s.x2;
  stream.fill_normal(dw2_, sqrt_h_);
  stepper_.step(z2_, h_, dw2_);
  stream.fill_normal(dw2_, sqrt_h_);
  stepper_.step(z2_, h_, dw2_);

  auto log_ratio = [this](const StateVec& z) {
    dev_ = z - mean1_;
    const double q1 = two_step_form_.mahalanobis_squared(dev_);
    dev_ = z - mean2_;
    const double q2 = two_step_form_.mahalanobis_squared(dev_);
    return -0.5 * (q1 - q2);
  };
  const double r = std::exp(-std::abs(log_ratio(z1_)) - std::abs(log_ratio(z2_)));
  last_acceptance_ = std::isfinite(r) ? std::clamp(r, 0.0, 1.0) : 0.0;

  if (stream.uniform() < last_acceptance_) {
    s.x1 = z2_;
    s.x2 = z2_;
    s.coupled = true;
  } else {
    s.x1 = z1_;
    s.x2 = z2_;
  }
  advance(s, 2);
  last_branch_ = CouplingBranch::MaximalTwoStep;
}

void PairCoupler::langevin_step(CoupledState& s, NoiseStream& stream, std::int64_t steps_left) {
  if (langevin_ == nullptr) throw Error("coupling: langevin step needs a Langevin model");
  if (s.coupled) {
    step_coupled(s, stream);
    return;
  }
  const Eigen::Index d = langevin_->spatial_dim();
  const double sigma = langevin_->sigma();
  const StateVec dx = (s.x1.head(d) - s.x2.head(d)).cwiseAbs();
  const StateVec dv = (s.x1.tail(d) - s.x2.tail(d)).cwiseAbs();
  const double w = policy_.window_multiplier;
  const bool in_window = (dx.array() < w * sigma * h_ * sqrt_h_).all() && (dv.array() < w * sigma * sqrt_h_).all();
  if (in_window && steps_left >= 2) {
    langevin_two_step_maximal(s, stream);
    return;
  }

  const StateVec q = (s.x1.head(d) - s.x2.head(d)) + (s.x1.tail(d) - s.x2.tail(d)) / langevin_->gamma();
  const double q_norm = q.norm();
  stream.fill_normal(dw1_, sqrt_h_);
  if (q_norm > q_switch_) {
    const StateVec unit = q / q_norm;
    dw2_ = dw1_ - (2.0 * unit.dot(dw1_)) * unit;
    stepper_.step(s.x1, h_, dw1_);
    stepper_.step(s.x2, h_, dw2_);
    advance(s, 1);
    last_branch_ = CouplingBranch::Reflection;
  } else {
    synchronous_step(s, dw1_);
  }
}

void PairCoupler::step(CoupledState& s, NoiseStream& stream, std::int64_t steps_left) {
  switch (policy_.kind) {
    case CouplingKind::Reflection:
      if (s.coupled) {
        step_coupled(s, stream);
      } else {
        stream.fill_normal(dw1_, sqrt_h_);
        reflection_step(s, dw1_);
      }
      return;
    case CouplingKind::Synchronous:
      if (s.coupled) {
        step_coupled(s, stream);
      } else {
        stream.fill_normal(dw1_, sqrt_h_);
        synchronous_step(s, dw1_);
      }
      return;
    case CouplingKind::Maximal:
      maximal_step(s, stream);
      return;
    case CouplingKind::Mixed:
      mixed_step(s, stream);
      return;
    case CouplingKind::LangevinMixed:
      langevin_step(s, stream, steps_left);
      return;
  }
}

CouplingOutcome PairCoupler::coupling_time(ConstVecRef x, ConstVecRef y, double T, NoiseStream& stream) {
  const std::int64_t total = step_count(T, h_);
  CoupledState s = make_state(x, y);
  CouplingOutcome out;
  out.horizon = T;
  if (s.coupled) {
    out.coupled = true;
    return out;
  }
  while (s.step < total) {
    if (policy_.kind == CouplingKind::Reflection && s.x1 == s.x2) {
      // exact collision under pure reflection: direction undefined, keep together
      stream.fill_normal(dw1_, sqrt_h_);
      synchronous_step(s, dw1_);
    } else {
      step(s, stream, total - s.step);
    }
    if (!s.x1.allFinite() || !s.x2.allFinite()) {
      out.diverged = true;
      return out;
    }
    if (s.coupled) {
      out.coupled = true;
      out.tau = s.t;
      return out;
    }
  }
  return out;
}

}  // namespace sdecert
