#include "mist/rng.hpp"

#include <cmath>

#include "mist/field.hpp"

namespace mist {

double GaussianSampler::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so that log(u1) is finite.
  const double u1 = 1.0 - rng_.next_unit();
  const double u2 = rng_.next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * kPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

}  // namespace mist
