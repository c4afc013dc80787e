#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sdecert/error.hpp"
#include "sdecert/model.hpp"
#include "sdecert/random.hpp"

namespace sdecert {

class LangevinModel;

enum class Scheme { EulerMaruyama, Milstein };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

/// Strong order a scheme achieves on this model: Milstein is order 1; Euler–Maruyama
/// is order 1 for additive noise (where it coincides with Milstein) and ½ otherwise.
double default_strong_order(Scheme scheme, const SdeModel& model);

/// Richardson factor turning |X^h_T − X^{2h}_T| into an estimate of |X_T − X^h_T|
/// for a scheme of strong order p: 1 / (2^p − 1).
double richardson_constant(double strong_order);

/// Number of steps of size h in [0, T]; throws unless T is an integer multiple of h.
std::int64_t step_count(double T, double h);

/// x + f(x)h + σ(x)dW. Throws DivergenceError (carrying `t`) on a non-finite result.
StateVec em_step(const SdeModel& model, ConstVecRef x, double h, ConstVecRef dW, double t = 0.0);

/// Euler–Maruyama plus the diagonal-noise correction ½ σ_i ∂_iσ_i (dW_i² − h).
/// Identical to em_step for state-independent σ.
StateVec milstein_step(const SdeModel& model, ConstVecRef x, double h, ConstVecRef dW, double t = 0.0);

/// In-place stepping with cached diffusion and scratch buffers.
/// Not thread-safe: give each worker its own copy.
class Stepper {
 public:
  Stepper(ModelPtr model, Scheme scheme);

  /// One step in place. Does not check finiteness.
  void step(VecRef x, double h, ConstVecRef dW);

  const SdeModel& model() const noexcept { return *model_; }
  const ModelPtr& model_ptr() const noexcept { return model_; }
  Scheme scheme() const noexcept { return scheme_; }
  Eigen::Index dim() const noexcept { return model_->dim(); }
  Eigen::Index noise_dim() const noexcept { return model_->noise_dim(); }

  /// Constant σ, valid when model().constant_diffusion().
  const Eigen::MatrixXd& constant_sigma() const noexcept { return sigma_; }

 private:
  void add_noise(VecRef x, ConstVecRef dW) const;

  ModelPtr model_;
  Scheme scheme_;
  bool constant_ = false;
  bool diagonal_ = false;
  Eigen::MatrixXd sigma_;
  StateVec sigma_diag_;
  StateVec drift_;
  StateVec derivative_;
};

struct FineCoarsePair {
  StateVec fine;
  StateVec coarse;
};

/// Runs X^h and X^{2h} from x0 to T with shared Brownian increments: the coarse
/// trajectory consumes dW_{2k−1} + dW_{2k}. `observe(step, state)` sees every fine
/// state after it is produced (step counts from 1).
template <class Observer>
FineCoarsePair paired_fine_coarse(Stepper& stepper, ConstVecRef x0, double h, double T, NoiseStream& stream,
                                  Observer&& observe) {
  const std::int64_t coarse_steps = step_count(T, 2.0 * h);
  const double scale = std::sqrt(h);
  FineCoarsePair out{StateVec(x0), StateVec(x0)};
  StateVec dw1(stepper.noise_dim());
  StateVec dw2(stepper.noise_dim());
  StateVec dw_coarse(stepper.noise_dim());
  for (std::int64_t k = 0; k < coarse_steps; ++k) {
    stream.fill_normal(dw1, scale);
    stream.fill_normal(dw2, scale);
    dw_coarse = dw1 + dw2;
    stepper.step(out.fine, h, dw1);
    observe(2 * k + 1, static_cast<const StateVec&>(out.fine));
    stepper.step(out.fine, h, dw2);
    observe(2 * k + 2, static_cast<const StateVec&>(out.fine));
    stepper.step(out.coarse, 2.0 * h, dw_coarse);
    if (!out.fine.allFinite() || !out.coarse.allFinite()) {
      throw DivergenceError(static_cast<double>(2 * (k + 1)) * h, stepper.model().name() + ": trajectory diverged");
    }
  }
  return out;
}

FineCoarsePair paired_fine_coarse(Stepper& stepper, ConstVecRef x0, double h, double T, NoiseStream& stream);
FineCoarsePair paired_fine_coarse(ModelPtr model, Scheme scheme, ConstVecRef x0, double h, double T,
                                  NoiseStream& stream);

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVec> states;
};

/// Records every `record_every`-th state, starting with x0 at t = 0.
Trajectory simulate(Stepper& stepper, ConstVecRef x0, double h, std::int64_t steps, NoiseStream& stream,
                    std::int64_t record_every = 1);

struct GaussianParams {
  StateVec mean;
  Eigen::MatrixXd covariance;
};

/// Law of one Euler–Maruyama step from x for state-independent σ: N(x + f(x)h, hσσᵀ).
GaussianParams em_step_density(const SdeModel& model, ConstVecRef x, double h);

/// Exact law of (X, V) after two Euler–Maruyama steps of Langevin dynamics.
///
/// Composing the steps by hand gives, per spatial coordinate,
///   X' = X + 2hV − h²∇U(X) − γh²V + σh^{3/2} N₀
///   V' = (1−γh)²V − (1−γh)h∇U(X) − h∇U(X + hV) + σ(1−γh)h^{1/2} N₀ + σh^{1/2} N₁
/// The map is affine in (N₀, N₁), so the mean is the noise-free composition and the
/// covariance is state independent.
GaussianParams langevin_two_step_density(const LangevinModel& model, ConstVecRef state, double h);

/// log N(z; mean, Σ) up to the shared normalizing constant, via a cached Cholesky factor.
class GaussianQuadraticForm {
 public:
  GaussianQuadraticForm() = default;
  explicit GaussianQuadraticForm(const Eigen::MatrixXd& covariance);

  /// (z − m)ᵀ Σ⁻¹ (z − m)
  double mahalanobis_squared(ConstVecRef deviation) const;
  /// Whitened deviation L⁻¹(z − m).
  void whiten(ConstVecRef deviation, VecRef out) const;

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace sdecert
