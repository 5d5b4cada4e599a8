#pragma once

#include "core.hpp"

#include <array>
#include <map>
#include <vector>

namespace qwalk {

// Sum of coef * prod_a f_a(k_a * scale), f_a in {cos, sin}. Exact derivatives and a
// product-to-sum expansion into exponentials e^{-i k.h}.
struct TrigMonomial {
  double coef = 1.0;
  std::array<bool, 3> is_sin {false, false, false};
};

struct TrigPoly {
  int d = 3;
  double scale = 1.0;
  std::vector<TrigMonomial> terms;

  double value(const WaveVector& k) const {
    double total = 0.0;
    for (const auto& t : terms) {
      double p = t.coef;
      for (int a = 0; a < d; ++a) {
        const double x = k[a] * scale;
        p *= t.is_sin[a] ? std::sin(x) : std::cos(x);
      }
      total += p;
    }
    return total;
  }

  Eigen::VectorXd gradient(const WaveVector& k) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
    for (const auto& t : terms)
      for (int b = 0; b < d; ++b) {
        double p = t.coef;
        for (int a = 0; a < d; ++a) {
          const double x = k[a] * scale;
          if (a == b) p *= t.is_sin[a] ? scale * std::cos(x) : -scale * std::sin(x);
          else p *= t.is_sin[a] ? std::sin(x) : std::cos(x);
        }
        g[b] += p;
      }
    return g;
  }

  Eigen::MatrixXd hessian(const WaveVector& k) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (const auto& t : terms)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          double p = t.coef;
          for (int a = 0; a < d; ++a) {
            const double x = k[a] * scale;
            const double sv = std::sin(x), cv = std::cos(x);
            if (a == b && a == c) p *= -scale * scale * (t.is_sin[a] ? sv : cv);
            else if (a == b || a == c) p *= t.is_sin[a] ? scale * cv : -scale * sv;
            else p *= t.is_sin[a] ? sv : cv;
          }
          h(b, c) += p;
        }
    return h;
  }
};

// Laurent polynomial in z_a = e^{-i k_a scale}; the exponent vector e stands for the
// Cartesian displacement h = scale * e, since z^e = e^{-i k.h}.
using LaurentScalar = std::map<std::vector<int>, cplx>;
using LaurentMat = std::map<std::vector<int>, Mat>;

inline LaurentScalar expand(const TrigPoly& p) {
  LaurentScalar out;
  for (const auto& t : p.terms) {
    LaurentScalar acc {{std::vector<int>(p.d, 0), cplx(t.coef, 0.0)}};
    for (int a = 0; a < p.d; ++a) {
      // cos x = (z + 1/z)/2, sin x = i (z - 1/z)/2 with z = e^{-ix}
      const cplx plus = t.is_sin[a] ? cplx(0.0, 0.5) : cplx(0.5, 0.0);
      const cplx minus = t.is_sin[a] ? cplx(0.0, -0.5) : cplx(0.5, 0.0);
      LaurentScalar next;
      for (const auto& [e, c] : acc) {
        auto ep = e, em = e;
        ep[a] += 1;
        em[a] -= 1;
        next[ep] += c * plus;
        next[em] += c * minus;
      }
      acc.swap(next);
    }
    for (const auto& [e, c] : acc) out[e] += c;
  }
  for (auto it = out.begin(); it != out.end();) {
    if (std::abs(it->second) < 1e-15) it = out.erase(it);
    else ++it;
  }
  return out;
}

inline void accumulate(LaurentMat& into, const LaurentScalar& p, const Mat& coeff) {
  for (const auto& [e, c] : p) {
    auto it = into.find(e);
    if (it == into.end()) into.emplace(e, c * coeff);
    else it->second += c * coeff;
  }
}

inline void prune(LaurentMat& m, double tol = 1e-15) {
  for (auto it = m.begin(); it != m.end();) {
    if (it->second.cwiseAbs().maxCoeff() < tol) it = m.erase(it);
    else ++it;
  }
}

}  // namespace qwalk
