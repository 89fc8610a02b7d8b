#pragma once

// Gauss-Legendre rules with extended-precision internals. Nodes and weights
// are computed and cached in long double, and integration accumulates with
// Kahan compensation in long double: the coupling-decay checks divide by
// matrix elements as small as ~1e-7, so plain double roundoff would dominate.

#include <utility>
#include <vector>

namespace qgc {

class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  int order() const { return static_cast<int>(nodes_.size()); }

  // Integral of f over [a, b]; f is called with long double arguments.
  template <class F>
  long double integrate(long double a, long double b, F&& f) const {
    const long double mid = (a + b) / 2, half = (b - a) / 2;
    long double sum = 0, comp = 0;  // Kahan
    for (size_t i = 0; i < nodes_.size(); ++i) {
      const long double term = weights_[i] * f(mid + half * nodes_[i]);
      const long double y = term - comp;
      const long double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    return sum * half;
  }

  // Shared, thread-safe cache keyed by order.
  static const GaussLegendre& cached(int order);

  const std::vector<long double>& nodes() const { return nodes_; }
  const std::vector<long double>& weights() const { return weights_; }

 private:
  std::vector<long double> nodes_;    // on [-1, 1], ascending
  std::vector<long double> weights_;
};

// Order heuristic for integrands that are products of sinusoids with total
// angular frequency `omega` over an interval of length `len`, optionally
// multiplied by a low-degree polynomial. Resolves the oscillation with margin.
int oscillatory_order(double omega, double len, int floor_order = 32);

}  // namespace qgc
