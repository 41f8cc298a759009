#pragma once

#include <functional>
#include <memory>
#include <string>

#include "decaylab/lattice.hpp"

namespace decaylab {

/// <x> = sqrt(1 + |x|^2).
double japanese_bracket(const Point& x, int dim);

/// Pointwise decay profile with a growth witness F: gamma(x)|x|^2 >= F(|x|) for |x| > r0.
struct GeneralEnvelope {
  std::function<double(const Point&, int)> gamma;
  std::function<double(double)> witness;
  double r0 = 1.0;
  std::string description;
};

/// Deterministic envelope multiplying the random potential.
///
/// The power-law variant is <x>^{-alpha}; it equals 1 at the origin and lies
/// in ]0, 1] everywhere.
class Envelope {
 public:
  static Envelope power_law(double alpha);
  static Envelope general(GeneralEnvelope spec);
  /// gamma == 1 without a witness; used to check the alpha = 0 reduction.
  static Envelope constant_one();

  double value(const Point& x, int dim) const;

  bool is_power_law() const { return general_ == nullptr && !constant_; }
  bool is_constant_one() const { return constant_; }
  double alpha() const { return alpha_; }
  const GeneralEnvelope* general_spec() const { return general_.get(); }
  std::string describe() const;

  /// Checks gamma(x)|x|^2 >= F(|x|) on every node of `domain` with |x| > r0.
  /// Throws PreconditionError naming the first violating node.
  void check_witness(const LatticeDomain& domain) const;

 private:
  double alpha_ = 0.0;
  bool constant_ = false;
  std::shared_ptr<const GeneralEnvelope> general_;
};

double envelope_value(const Envelope& envelope, const Point& x, int dim);

/// Sampled admissibility of a witness on [r0, r_max]: strictly increasing,
/// F(r)/r^2 decreasing toward 0 and F unbounded in trend. Returns an empty
/// string when admissible, otherwise the reason.
std::string witness_admissibility(const std::function<double(double)>& witness, double r0,
                                  double r_max, int samples = 256);

}  // namespace decaylab
