#ifndef ROBUSTSSM_RNG_HPP
#define ROBUSTSSM_RNG_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace rssm {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Deterministic random stream; replicate streams are derived from
// (seed, index) so results do not depend on worker scheduling.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : eng_(splitmix64(seed)) {}

  static RngStream derive(uint64_t seed, uint64_t index) {
    return RngStream(splitmix64(seed ^ splitmix64(index + 0x51ED2701u)));
  }

  uint64_t raw() { return eng_(); }

  double uniform() {  // in (0, 1)
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double gauss() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586477 * u2);
  }

  Eigen::VectorXd gauss_vector(int n) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = gauss();
    return z;
  }

  // draw from N(mean, cov) via the lower Cholesky factor of cov
  Eigen::VectorXd mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol_l) {
    return mean + chol_l * gauss_vector(static_cast<int>(mean.size()));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace rssm

#endif
