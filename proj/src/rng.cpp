#include "rng.hpp"

#include <cmath>

namespace hw {

std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t index) {
  std::uint64_t s = mix64(master ^ hash_tag(tag));
  return mix64(s + 0x9e3779b97f4a7c15ULL * (index + 1));
}

std::uint64_t site_index(int x, int t) {
  auto zig = [](int v) -> std::uint64_t {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 1) ^
           static_cast<std::uint64_t>(v >> 31);
  };
  return (zig(x) << 32) | (zig(t) & 0xffffffffULL);
}

double Rng::next_normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller on open-interval uniforms.
  double u1, u2;
  do {
    u1 = next_u01();
  } while (u1 <= 0.0);
  u2 = next_u01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

double Rng::next_log_gamma(double shape) {
  // Marsaglia-Tsang. For shape < 1 use the boost
  // Gamma(a) = Gamma(a+1) * U^{1/a}, applied in log space so shapes of
  // order 1e-3 (the Beta(a*eps, a*eps) families) do not underflow.
  double boost = 0.0;
  double a = shape;
  if (a < 1.0) {
    double u;
    do {
      u = next_u01();
    } while (u <= 0.0);
    boost = std::log(u) / a;
    a += 1.0;
  }
  double d = a - 1.0 / 3.0;
  double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u;
    do {
      u = next_u01();
    } while (u <= 0.0);
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d * v) + boost;
    }
  }
}

double Rng::next_beta(double a, double b) {
  // X/(X+Y) for independent gammas, evaluated through logs:
  // 1/(1+exp(lg_b - lg_a)) is stable even when both gammas underflow.
  double lg_a = next_log_gamma(a);
  double lg_b = next_log_gamma(b);
  double d = lg_b - lg_a;
  if (d > 700.0) return 0.0;
  if (d < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(d));
}

}  // namespace hw
