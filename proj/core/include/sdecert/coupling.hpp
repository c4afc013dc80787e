#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include "sdecert/integrate.hpp"
#include "sdecert/model.hpp"
#include "sdecert/random.hpp"

namespace sdecert {

class LangevinModel;

enum class CouplingKind { Reflection, Synchronous, Maximal, Mixed, LangevinMixed };

std::string_view to_string(CouplingKind kind);
CouplingKind parse_coupling_kind(std::string_view text);

struct CouplingPolicy {
  CouplingKind kind = CouplingKind::Mixed;
  /// Mixed policy: reflect while ‖x1 − x2‖ ≥ threshold, else attempt maximal coupling.
  /// Defaults to 2√h‖σ‖₂.
  std::optional<double> switch_threshold;
  /// Langevin policy: reflect while ‖Q‖ > q_switch. Defaults to 0.08·√(h / 0.001).
  std::optional<double> q_switch;
  /// Langevin policy: two-step maximal coupling is tried once |ΔX| < w σ h^{3/2} and
  /// |ΔV| < w σ h^{1/2} componentwise.
  double window_multiplier = 2.5;

  friend bool operator==(const CouplingPolicy&, const CouplingPolicy&) = default;
};

/// Default Langevin switch threshold for step size h.
double default_q_switch(double h);

/// Two copies of the numerical chain. Once `coupled` is set, x1 == x2 forever.
struct CoupledState {
  StateVec x1;
  StateVec x2;
  bool coupled = false;
  std::int64_t step = 0;
  double t = 0.0;
};

struct CouplingOutcome {
  bool coupled = false;
  /// Coupling time (a multiple of h) when coupled.
  double tau = 0.0;
  double horizon = 0.0;
  /// The pair left the finite range before coupling; counted as censored.
  bool diverged = false;
};

enum class CouplingBranch { None, AlreadyCoupled, Reflection, Synchronous, Maximal, MaximalTwoStep };

/// Markov couplings of two Euler–Maruyama chains with state-independent σ.
///
/// Holds scratch buffers, so each worker thread needs its own instance. Pairs are
/// only ever declared coupled by an accepted maximal-coupling proposal, never by
/// proximity.
class PairCoupler {
 public:
  PairCoupler(ModelPtr model, double h, CouplingPolicy policy);

  /// x1 receives dW; x2 receives (I − 2eeᵀ)dW with e = σ⁻¹(x1−x2)/‖σ⁻¹(x1−x2)‖.
  void reflection_step(CoupledState& s, ConstVecRef dW);
  /// Both chains receive dW.
  void synchronous_step(CoupledState& s, ConstVecRef dW);
  /// One accept/reject round of the maximal coupling: both chains propose with
  /// independent noise, r is the product of min/max density ratios at the two
  /// proposals, and with probability r both chains jump to the second proposal.
  void maximal_step(CoupledState& s, NoiseStream& stream);
  /// Reflection when far apart, maximal coupling when within switch_threshold().
  void mixed_step(CoupledState& s, NoiseStream& stream);
  /// Reflection / synchronous switch on Q = ΔX + γ⁻¹ΔV, plus two-step maximal
  /// coupling once the pair is inside the proximity window. Advances by 2h when the
  /// maximal branch is taken and at least two steps remain.
  void langevin_step(CoupledState& s, NoiseStream& stream,
                     std::int64_t steps_left = std::numeric_limits<std::int64_t>::max());

  /// Dispatches on the configured policy.
  void step(CoupledState& s, NoiseStream& stream,
            std::int64_t steps_left = std::numeric_limits<std::int64_t>::max());

  /// Runs the coupled pair from (x, y) until it couples or reaches T.
  CouplingOutcome coupling_time(ConstVecRef x, ConstVecRef y, double T, NoiseStream& stream);

  CoupledState make_state(ConstVecRef x, ConstVecRef y) const;

  double h() const noexcept { return h_; }
  const CouplingPolicy& policy() const noexcept { return policy_; }
  double switch_threshold() const noexcept { return switch_threshold_; }
  double q_switch() const noexcept { return q_switch_; }
  CouplingBranch last_branch() const noexcept { return last_branch_; }
  /// Acceptance probability r of the most recent maximal-coupling attempt.
  double last_acceptance() const noexcept { return last_acceptance_; }
  const SdeModel& model() const noexcept { return stepper_.model(); }

 private:
  void advance(CoupledState& s, std::int64_t steps);
  void step_coupled(CoupledState& s, NoiseStream& stream);
  void require_square_sigma(const char* what) const;
  void langevin_two_step_maximal(CoupledState& s, NoiseStream& stream);

  Stepper stepper_;
  double h_;
  double sqrt_h_;
  CouplingPolicy policy_;
  const LangevinModel* langevin_ = nullptr;
  bool square_sigma_ = false;
  Eigen::MatrixXd sigma_inv_;
  double switch_threshold_ = 0.0;
  double q_switch_ = 0.0;
  GaussianQuadraticForm two_step_form_;
  CouplingBranch last_branch_ = CouplingBranch::None;
  double last_acceptance_ = 0.0;

  StateVec dw1_, dw2_, e_, diff_, mean1_, mean2_, xi1_, xi2_, delta_;
  StateVec z1_, z2_, dev_;
};

}  // namespace sdecert
