#include "sphfield/rng.hpp"

#include <cmath>

namespace sphfield::rng {

std::pair<double, double> Xoshiro256ss::normal_pair() {
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace sphfield::rng
