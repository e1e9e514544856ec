#pragma once

// Reference computations written without the library, used to check it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

inline double max_of(const std::vector<double>& q) {
  return q.empty() ? 0.0 : *std::max_element(q.begin(), q.end());
}

// Average marginal contribution over all orderings of the participants.
inline std::vector<double> shapley_by_permutations(
    const std::function<double(const std::vector<double>&)>& v,
    const std::vector<double>& q) {
  const std::size_t n = q.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(n, 0.0);
  double count = 0.0;
  do {
    std::vector<double> coalition(n, 0.0);
    double prev = v(coalition);
    for (std::size_t i : order) {
      coalition[i] = q[i];
      const double cur = v(coalition);
      phi[i] += cur - prev;
      prev = cur;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= count;
  return phi;
}

// Golden-section maximum of a unimodal f on [lo, hi].
inline double argmax_unimodal(const std::function<double(double)>& f, double lo,
                              double hi, int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters; ++k) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    }
  }
  return 0.5 * (a + b);
}

// Symmetric single-project game, proportional sharing, identity maps: the
// fixed point of the best response of one player against n - 1 copies, found
// by damped iteration of a golden-section best response. A step of 1/n keeps
// the iteration contracting when the best response slopes down steeply.
inline double symmetric_fixed_point(const std::function<double(double)>& v,
                                    const std::function<double(double)>& cost,
                                    int n, double q_hi) {
  double q = q_hi / (2.0 * n);
  for (int it = 0; it < 20000; ++it) {
    const double others = (n - 1) * q;
    auto u = [&](double own) {
      const double total = own + others;
      return total <= 0.0 ? -cost(own) : own / total * v(total) - cost(own);
    };
    const double next = argmax_unimodal(u, 0.0, q_hi);
    if (std::abs(next - q) < 1e-12) return n * next;
    q += (next - q) / n;
  }
  return n * q;
}

inline double harmonic(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

}  // namespace oracle
