#include "decaylab/envelope.hpp"

#include <cmath>
#include <sstream>

#include "decaylab/error.hpp"

namespace decaylab {

double japanese_bracket(const Point& x, int dim) {
  double s = 1.0;
  for (int k = 0; k < dim; ++k) s += x[k] * x[k];
  return std::sqrt(s);
}

Envelope Envelope::power_law(double alpha) {
  if (!(alpha >= 0.0)) throw PreconditionError("power-law exponent alpha must be >= 0");
  Envelope e;
  e.alpha_ = alpha;
  return e;
}

Envelope Envelope::general(GeneralEnvelope spec) {
  if (!spec.gamma || !spec.witness) throw PreconditionError("general envelope needs gamma and witness F");
  if (!(spec.r0 > 0.0)) throw PreconditionError("general envelope needs R0 > 0");
  Envelope e;
  e.general_ = std::make_shared<const GeneralEnvelope>(std::move(spec));
  return e;
}

Envelope Envelope::constant_one() {
  Envelope e;
  e.constant_ = true;
  return e;
}

double Envelope::value(const Point& x, int dim) const {
  if (constant_) return 1.0;
  if (general_) return general_->gamma(x, dim);
  double r2 = 1.0;
  for (int k = 0; k < dim; ++k) r2 += x[k] * x[k];
  return std::pow(r2, -alpha_ / 2);
}

std::string Envelope::describe() const {
  if (constant_) return "constant(1)";
  if (general_) return "general(" + general_->description + ")";
  std::ostringstream os;
  os.precision(17);
  os << "power-law(alpha=" << alpha_ << ")";
  return os.str();
}

void Envelope::check_witness(const LatticeDomain& domain) const {
  if (!general_) return;
  const int d = domain.dim();
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const Point x = domain.coordinate(i);
    const double r = norm(x, d);
    if (r <= general_->r0) continue;
    const double lhs = general_->gamma(x, d) * r * r;
    const double rhs = general_->witness(r);
    if (!(lhs >= rhs)) {
      std::ostringstream os;
      os.precision(10);
      os << "envelope witness violated at x = (";
      for (int k = 0; k < d; ++k) os << (k ? ", " : "") << x[k];
      os << "): gamma(x)|x|^2 = " << lhs << " < F(|x|) = " << rhs;
      throw PreconditionError(os.str());
    }
  }
}

double envelope_value(const Envelope& envelope, const Point& x, int dim) {
  return envelope.value(x, dim);
}

std::string witness_admissibility(const std::function<double(double)>& witness, double r0,
                                  double r_max, int samples) {
  if (!(r_max > r0)) return "sampling range is empty";
  double prev_f = witness(r0);
  double prev_ratio = prev_f / (r0 * r0);
  if (!(prev_f > 0.0)) return "F(R0) must be positive";
  for (int i = 1; i <= samples; ++i) {
    const double r = r0 * std::pow(r_max / r0, static_cast<double>(i) / samples);
    const double f = witness(r);
    if (!(f > prev_f)) return "F is not strictly increasing at r = " + std::to_string(r);
    const double ratio = f / (r * r);
    if (i > samples / 2 && !(ratio < prev_ratio)) {
      return "F(r)/r^2 does not decay on the sampled range";
    }
    prev_f = f;
    prev_ratio = ratio;
  }
  return {};
}

}  // namespace decaylab
