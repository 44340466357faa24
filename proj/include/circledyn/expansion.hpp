#pragma once

#include <optional>
#include <vector>

#include "circledyn/distortion.hpp"
#include "circledyn/moebius.hpp"
#include "circledyn/thompson.hpp"

namespace circledyn {

struct NonExpandableError : Error {
  explicit NonExpandableError(const std::string& m) : Error(m) {}
};

struct ExpansionTrace {
  Word word;
  std::vector<CirclePoint> trajectory;       // length word.length()+1
  std::vector<double> step_log_derivatives;  // per letter, at its source point
  double derivative = 1.0;                   // composed derivative at the start
  double ratio = 1.0;  // sum_j (f_j o ... o f_1)'(x) / final derivative
  std::optional<CircleInterval> neighborhood;
  std::optional<double> kappa;
};

// Produces expansion steps for one family: greedy letters for the Moebius
// family, forward phi-steps for the smoothed Thompson action.  A step
// appends letters until the appended fragment's derivative reaches lambda;
// near a parabolic point this is exactly the exit word of the parabolic
// letter.  Points where the fragment never reaches lambda within the
// iteration cap are reported non-expandable.
class ExpansionPolicy {
 public:
  virtual ~ExpansionPolicy() = default;
  virtual const MapFamily& family() const = 0;
  virtual void expand_step(ExpansionTrace& trace) const = 0;
  double lambda() const { return 2.0; }
  // Preimage of p under the trace's word, following the branches of the
  // recorded trajectory.
  virtual CirclePoint pull_back(const ExpansionTrace& trace, const CirclePoint& p) const = 0;
  // Inverse-side derivative sum of the ratio identity, evaluated afresh at
  // the trace endpoint.
  virtual double inverse_derivative_sum(const ExpansionTrace& trace) const = 0;
};

class G2Policy final : public ExpansionPolicy {
 public:
  G2Policy();
  const MapFamily& family() const override { return family_; }
  void expand_step(ExpansionTrace& trace) const override;
  CirclePoint pull_back(const ExpansionTrace& trace, const CirclePoint& p) const override;
  double inverse_derivative_sum(const ExpansionTrace& trace) const override;

 private:
  MapFamily family_;
};

class GSPolicy final : public ExpansionPolicy {
 public:
  // Requires a variant whose fundamental domain J = [a, b) is uniformly
  // expanding (the minimal defaults); throws otherwise.
  explicit GSPolicy(SmoothDoubling phi);
  const MapFamily& family() const override { return family_; }
  void expand_step(ExpansionTrace& trace) const override;
  CirclePoint pull_back(const ExpansionTrace& trace, const CirclePoint& p) const override;
  double inverse_derivative_sum(const ExpansionTrace& trace) const override;
  const SmoothDoubling& phi() const { return phi_; }
  const PhiReturnHandle& handle() const { return handle_; }

 private:
  SmoothDoubling phi_;
  MapFamily family_;  // single generator: phi itself (forward steps only)
  PhiReturnHandle handle_;
};

ExpansionTrace expand_step(const ExpansionPolicy& policy, const CirclePoint& x);

// Expansion to derivative >= M with the trace's derivative-sum ratio.
ExpansionTrace expand_to_derivative(const ExpansionPolicy& policy, const CirclePoint& x,
                                    double M, long step_cap = 100000);

// As above, then pulls back U_{eps/2} around the endpoint; measures the
// distortion coefficient of the word on the preimage neighborhood.
ExpansionTrace expand_neighborhood(const ExpansionPolicy& policy, const CirclePoint& x,
                                   double eps, double M);

// The two sides of the forward/inverse derivative-sum identity: the left
// side from the recorded forward trajectory, the right side by evaluating
// the inverse letters afresh at the endpoint.
std::pair<double, double> ratio_identity_sides(const ExpansionPolicy& policy,
                                               const ExpansionTrace& trace);

struct ScanRow {
  CirclePoint point;
  double M = 0.0;
  double ratio = 0.0;    // measured C at this point and M
  bool ne_marked = false;
};

// Ratio table over sample points and target derivatives; non-expandable
// points are marked and skipped.
std::vector<ScanRow> distortion_expandable_scan(const ExpansionPolicy& policy,
                                                const std::vector<CirclePoint>& points,
                                                const std::vector<double>& m_grid);

}  // namespace circledyn
