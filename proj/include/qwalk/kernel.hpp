#pragma once

#include "walks.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace qwalk {

using Displacement = std::vector<int>;  // generator-basis coordinates

struct TransitionKernel {
  int d = 3;
  int s = 2;
  std::map<Displacement, Mat> terms;

  WaveVector cartesian(const Displacement& h) const {
    Eigen::VectorXi n(d);
    for (int i = 0; i < d; ++i) n[i] = h[static_cast<std::size_t>(i)];
    return lattice(d).cartesian(n);
  }

  // sum_h e^{-i k.h} A_h
  Mat reconstruct(const WaveVector& k) const {
    Mat a = Mat::Zero(s, s);
    for (const auto& [h, m] : terms) a += std::exp(-I_ * k.dot(cartesian(h))) * m;
    return a;
  }

  int max_extent() const {
    int r = 0;
    for (const auto& [h, m] : terms)
      for (int c : h) r = std::max(r, std::abs(c));
    return r;
  }
};

namespace detail {

inline Displacement to_generator_coords(const std::vector<int>& e, int d) {
  const Lattice& L = lattice(d);
  Eigen::VectorXd h(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) h[i] = e[static_cast<std::size_t>(i)] * scale;
  const Eigen::VectorXd n = L.basis.colPivHouseholderQr().solve(h);
  Displacement out(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const double r = std::round(n[i]);
    if (std::abs(r - n[i]) > 1e-9) throw InvalidInput("exponent is not a lattice displacement");
    out[static_cast<std::size_t>(i)] = static_cast<int>(r);
  }
  return out;
}

inline LaurentMat weyl_laurent(int d, Chirality c, Branch b) {
  const WeylTrig w = weyl_trig(d, c, b);
  LaurentMat out;
  accumulate(out, expand(w.u), pauli(0));
  for (int j = 0; j < 3; ++j) accumulate(out, expand(w.n[static_cast<std::size_t>(j)]), Mat(-I_ * pauli(j + 1)));
  prune(out);
  return out;
}

inline LaurentMat adjoint(const LaurentMat& p) {
  LaurentMat out;
  for (const auto& [e, m] : p) {
    auto ne = e;
    for (auto& x : ne) x = -x;
    out.emplace(ne, m.adjoint());
  }
  return out;
}

}  // namespace detail

// Symbolic product-to-sum expansion of the closed-form symbol.
inline TransitionKernel position_kernel(const WalkSpec& spec) {
  spec.validate();
  const int d = spec.dim;
  TransitionKernel K;
  K.d = d;
  K.s = spec.components();
  LaurentMat poly;
  if (spec.family == Family::weyl) {
    poly = detail::weyl_laurent(d, spec.chirality, spec.branch);
  } else if (d == 1) {
    const double n = spec.n(), m = spec.mass;
    Mat lo = Mat::Zero(2, 2), hi = Mat::Zero(2, 2), zero = Mat::Zero(2, 2);
    lo(0, 0) = n;  // n e^{ik} = n z^{-1}
    hi(1, 1) = n;
    zero(0, 1) = I_ * m;
    zero(1, 0) = I_ * m;
    if (spec.branch == Branch::B) {
      lo.transposeInPlace();
      hi.transposeInPlace();
      zero.transposeInPlace();
    }
    poly[{-1}] = lo;
    poly[{1}] = hi;
    if (m != 0.0) poly[{0}] = zero;
  } else {
    const LaurentMat a = detail::weyl_laurent(d, spec.chirality, spec.branch);
    const LaurentMat ad = detail::adjoint(a);
    const double n = spec.n(), m = spec.mass;
    const Mat z2 = Mat::Zero(2, 2);
    for (const auto& [e, c] : a) poly[e] = block2(n * c, z2, z2, Mat::Zero(2, 2));
    for (const auto& [e, c] : ad) {
      auto it = poly.find(e);
      const Mat blk = block2(z2, z2, z2, n * c);
      if (it == poly.end()) poly.emplace(e, blk);
      else it->second += blk;
    }
    if (m != 0.0) {
      const Mat im = I_ * m * Mat::Identity(2, 2);
      const std::vector<int> origin(static_cast<std::size_t>(d), 0);
      auto it = poly.find(origin);
      if (it == poly.end()) poly.emplace(origin, block2(z2, im, im, z2));
      else it->second += block2(z2, im, im, z2);
    }
    prune(poly);
  }
  for (const auto& [e, c] : poly) K.terms.emplace(detail::to_generator_coords(e, d), c);
  return K;
}

struct ConditionResidual {
  std::string name;
  Displacement displacement;
  double residual = 0.0;
};

struct UnitarityReport {
  std::vector<ConditionResidual> conditions;
  double max_residual = 0.0;
  bool pass = false;
};

inline Displacement sub(const Displacement& a, const Displacement& b) {
  Displacement r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline UnitarityReport check_unitarity_conditions(const TransitionKernel& K, double tol = 1e-12) {
  UnitarityReport rep;
  const Mat id = Mat::Identity(K.s, K.s);
  Mat left = -id, right = -id;
  std::map<Displacement, std::pair<Mat, Mat>> cross;
  for (const auto& [h, a] : K.terms) {
    left += a.adjoint() * a;
    right += a * a.adjoint();
    for (const auto& [h2, b] : K.terms) {
      if (h2 == h) continue;
      // h2 - h = delta: A_h^dag A_h2 and A_h2 A_h^dag
      auto& slot = cross.try_emplace(sub(h2, h), Mat::Zero(K.s, K.s), Mat::Zero(K.s, K.s)).first->second;
      slot.first += a.adjoint() * b;
      slot.second += b * a.adjoint();
    }
  }
  const Displacement zero(static_cast<std::size_t>(K.d), 0);
  rep.conditions.push_back({"sum A^dag A = I", zero, spectral_norm(left)});
  rep.conditions.push_back({"sum A A^dag = I", zero, spectral_norm(right)});
  for (const auto& [delta, pr] : cross) {
    rep.conditions.push_back({"sum A_h^dag A_h' = 0", delta, spectral_norm(pr.first)});
    rep.conditions.push_back({"sum A_h' A_h^dag = 0", delta, spectral_norm(pr.second)});
  }
  for (const auto& c : rep.conditions) rep.max_residual = std::max(rep.max_residual, c.residual);
  rep.pass = rep.max_residual <= tol;
  return rep;
}

struct IsotropyReport {
  bool covariant = false;
  bool transitive = false;
  double max_residual = 0.0;
  bool pass() const { return covariant && transitive; }
};

inline IsotropyReport check_isotropy(const TransitionKernel& K, const IsotropyRep& rep, double tol = 1e-12) {
  const std::size_t ns = rep.support.size();
  auto as_disp = [](const Eigen::VectorXi& v, int sign) {
    Displacement d(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) d[static_cast<std::size_t>(i)] = sign * v[i];
    return d;
  };
  IsotropyReport out;
  for (const auto& el : rep.elements) {
    if (el.perm.size() != ns) throw InvalidInput("isotropy permutation size mismatch");
    for (const auto& [h, a] : K.terms) {
      Displacement image;
      bool found = std::all_of(h.begin(), h.end(), [](int x) { return x == 0; });
      if (found) image = h;
      for (std::size_t i = 0; i < ns && !found; ++i)
        for (int sign : {1, -1})
          if (!found && as_disp(rep.support[i], sign) == h) {
            image = as_disp(rep.support[static_cast<std::size_t>(el.perm[i])], sign);
            found = true;
          }
      if (!found) throw InvalidInput("isotropy permutation does not preserve the kernel support");
      auto it = K.terms.find(image);
      const Mat target = it == K.terms.end() ? Mat::Zero(K.s, K.s) : it->second;
      out.max_residual = std::max(out.max_residual, spectral_norm(target - el.U * a * el.U.adjoint()));
    }
  }
  out.covariant = out.max_residual <= tol;
  std::set<int> orbit {0};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& el : rep.elements)
      for (int i : std::set<int>(orbit))
        if (orbit.insert(el.perm[static_cast<std::size_t>(i)]).second) grew = true;
  }
  out.transitive = orbit.size() == ns;
  return out;
}

// Scalar (s = 1) solutions of the unitarity system on a finite support.
struct ScalarSolution {
  std::size_t index = 0;  // into the support list; coefficient e^{i phi}, phi free
  Displacement displacement;
};

struct ScalarSolutionReport {
  std::vector<ScalarSolution> solutions;
  std::size_t patterns_examined = 0;
  std::size_t patterns_excluded = 0;  // by a difference realized by a single pair
};

inline ScalarSolutionReport scalar_walk_solutions(const std::vector<Displacement>& support,
                                                  std::size_t cap = 20) {
  if (support.size() > cap) throw CapExceeded("support too large for exhaustive pattern search");
  ScalarSolutionReport rep;
  const std::size_t n = support.size();
  for (std::size_t mask = 1; mask < (std::size_t {1} << n); ++mask) {
    ++rep.patterns_examined;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1U) idx.push_back(i);
    if (idx.size() == 1) {
      // |a|^2 = 1 and no cross terms: check the residual at a few phases.
      for (double phi : {0.0, 1.0, 2.5}) {
        TransitionKernel K;
        K.d = static_cast<int>(support[idx[0]].size());
        K.s = 1;
        Mat a(1, 1);
        a(0, 0) = std::exp(I_ * phi);
        K.terms.emplace(support[idx[0]], a);
        if (!check_unitarity_conditions(K).pass) throw InvalidInput("single-term kernel not unitary");
      }
      rep.solutions.push_back({idx[0], support[idx[0]]});
      continue;
    }
    // A difference realized by exactly one ordered pair forces conj(a_h) a_h' = 0.
    std::map<Displacement, int> count;
    for (std::size_t i : idx)
      for (std::size_t j : idx)
        if (i != j) ++count[sub(support[j], support[i])];
    const bool excluded = std::any_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 1; });
    if (!excluded) throw InvalidInput("pattern not decided by single-pair differences");
    ++rep.patterns_excluded;
  }
  return rep;
}

}  // namespace qwalk
