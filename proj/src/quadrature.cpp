#include "qgc/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "qgc/core.hpp"

namespace qgc {

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw Error("quadrature order must be >= 1");
  const size_t n = static_cast<size_t>(order);
  nodes_.resize(n);
  weights_.resize(n);
  // Newton iteration on P_n, seeded with the Chebyshev-like estimate. The
  // recurrence and the iteration run in long double throughout.
  for (size_t i = 0; i < (n + 1) / 2; ++i) {
    long double x = std::cos(kPiL * (static_cast<long double>(i) + 0.75L) /
                             (static_cast<long double>(n) + 0.5L));
    long double pp = 0;
    long double prev_dx = std::numeric_limits<long double>::infinity();
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1, p1 = x;
      for (size_t j = 2; j <= n; ++j) {
        const long double p2 = ((2 * static_cast<long double>(j) - 1) * x * p1 -
                                (static_cast<long double>(j) - 1) * p0) /
                               static_cast<long double>(j);
        p0 = p1;
        p1 = p2;
      }
      pp = static_cast<long double>(n) * (x * p1 - p0) / (x * x - 1);
      const long double dx = p1 / pp;
      x -= dx;
      // stop at the rounding floor: either a tiny correction or stagnation
      if (std::fabs(dx) < 1e-19L || std::fabs(dx) >= prev_dx) break;
      prev_dx = std::fabs(dx);
    }
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    const long double w = 2 / ((1 - x * x) * pp * pp);
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0;  // exact midpoint for odd orders
}

const GaussLegendre& GaussLegendre::cached(int order) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<const GaussLegendre>(order);
  return *slot;
}

int oscillatory_order(double omega, double len, int floor_order) {
  const double phase = std::fabs(omega) * len;
  const int half_waves = static_cast<int>(std::ceil(phase / kPi));
  const int raw = std::max(floor_order, 2 * half_waves + 16);
  // Round up to a multiple of 32 so nearby requests share one cached rule;
  // the extra nodes only add margin.
  return ((raw + 31) / 32) * 32;
}

}  // namespace qgc
