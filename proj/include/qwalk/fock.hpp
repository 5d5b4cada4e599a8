#pragma once

#include "core.hpp"

#include <Eigen/Sparse>

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace qwalk {

// Two Fermionic species phi, psi with M orbitals each (momentum x spin). Orbital q*2 + a of
// phi is global mode q*2 + a, of psi is M + q*2 + a. Omega_k holds momenta 0..N_k-1.
struct FockCheckConfig {
  int M = 8;
  int Nk = 4;
  std::vector<int> filling;  // occupied global modes of the test state
  Vec3 u1 = Vec3::UnitX();
  Vec3 u2 = Vec3::UnitY();

  int modes() const { return 2 * M; }
  void validate() const {
    if (M < 2 || M % 2 != 0) throw InvalidInput("orbitals per species must be a positive even number");
    if (Nk < 1 || 2 * Nk > M) throw InvalidInput("Omega_k needs 2 N_k <= M orbitals");
    for (int m : filling)
      if (m < 0 || m >= modes()) throw InvalidInput("filled mode out of range");
    if (std::abs(u1.norm() - 1.0) > 1e-12 || std::abs(u2.norm() - 1.0) > 1e-12 || std::abs(u1.dot(u2)) > 1e-12)
      throw InvalidInput("polarization vectors must be orthonormal");
  }
  int phi(int q, int a) const { return q * 2 + a; }
  int psi(int q, int a) const { return M + q * 2 + a; }
};

struct FockReport {
  Eigen::Matrix2cd deviation;  // <[eps^i, eps^j dag]> - delta_ij
  double max_deviation = 0.0;
  double anticommutator_residual = 0.0;  // explicit route only
  std::size_t dimension = 0;
};

namespace detail {

// One term of eps^i = f sum_q sum_ab T^i_ab phi_qa psi_qb with T^i = (u^i.sigma)/sqrt2.
struct PairTerm {
  int phi = 0;
  int psi = 0;
  cplx coef;
};

inline std::vector<PairTerm> pair_terms(const FockCheckConfig& cfg, const Vec3& u) {
  const Mat t = sigma_dot(u) / sqrt2;
  const double f = 1.0 / std::sqrt(static_cast<double>(cfg.Nk));
  std::vector<PairTerm> out;
  for (int q = 0; q < cfg.Nk; ++q)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        if (t(a, b) != cplx {0.0, 0.0}) out.push_back({cfg.phi(q, a), cfg.psi(q, b), f * t(a, b)});
  return out;
}

inline Eigen::Matrix2cd deviation_from(const std::array<std::array<cplx, 2>, 2>& comm) {
  Eigen::Matrix2cd d;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d(i, j) = comm[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - (i == j ? 1.0 : 0.0);
  return d;
}

}  // namespace detail

// Explicit Jordan-Wigner matrices on the full 2^{2M} space. Bit j of a basis index is the
// occupation of mode j; a_j carries the sign (-1)^{occupied modes below j}.
class ExplicitFock {
 public:
  using SpMat = Eigen::SparseMatrix<cplx>;

  explicit ExplicitFock(int modes) : n_(modes) {
    if (modes > 24) throw CapExceeded("explicit Fock space limited to 24 modes");
    if (modes < 1) throw InvalidInput("need at least one mode");
    const std::size_t dim = std::size_t {1} << n_;
    ops_.reserve(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      std::vector<Eigen::Triplet<cplx>> t;
      t.reserve(dim / 2);
      for (std::size_t s = 0; s < dim; ++s) {
        if (!(s >> j & 1U)) continue;
        const int below = __builtin_popcountll(s & ((std::size_t {1} << j) - 1));
        t.emplace_back(static_cast<Eigen::Index>(s ^ (std::size_t {1} << j)), static_cast<Eigen::Index>(s),
                       below % 2 ? -1.0 : 1.0);
      }
      SpMat a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      a.setFromTriplets(t.begin(), t.end());
      ops_.push_back(std::move(a));
    }
  }

  std::size_t dimension() const { return std::size_t {1} << n_; }
  const SpMat& a(int j) const { return ops_.at(static_cast<std::size_t>(j)); }

  // max over i, j of ||{a_i, a_j^dag} - delta_ij|| and ||{a_i, a_j}|| (entrywise).
  double anticommutator_residual() const {
    double worst = 0.0;
    SpMat id(static_cast<Eigen::Index>(dimension()), static_cast<Eigen::Index>(dimension()));
    id.setIdentity();
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const SpMat adj = SpMat(a(j).adjoint());
        SpMat c = a(i) * adj + adj * a(i);
        if (i == j) c -= id;
        SpMat z = a(i) * a(j) + a(j) * a(i);
        for (const SpMat* m : {&c, &z})
          for (int k = 0; k < m->outerSize(); ++k)
            for (SpMat::InnerIterator it(*m, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
      }
    return worst;
  }

 private:
  int n_;
  std::vector<SpMat> ops_;
};

inline FockReport fock_commutator_check_explicit(const FockCheckConfig& cfg) {
  cfg.validate();
  const ExplicitFock fock(cfg.modes());
  using SpMat = ExplicitFock::SpMat;
  const auto dim = static_cast<Eigen::Index>(fock.dimension());
  std::array<SpMat, 2> eps;
  const std::array<Vec3, 2> us {cfg.u1, cfg.u2};
  for (std::size_t i = 0; i < 2; ++i) {
    eps[i] = SpMat(dim, dim);
    for (const auto& t : detail::pair_terms(cfg, us[i])) eps[i] += t.coef * SpMat(fock.a(t.phi) * fock.a(t.psi));
  }
  std::size_t idx = 0;
  for (int m : cfg.filling) idx |= std::size_t {1} << m;
  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(dim);
  state[static_cast<Eigen::Index>(idx)] = 1.0;
  std::array<Eigen::VectorXcd, 2> e_s, ed_s;
  for (std::size_t i = 0; i < 2; ++i) {
    e_s[i] = eps[i] * state;
    ed_s[i] = SpMat(eps[i].adjoint()) * state;
  }
  std::array<std::array<cplx, 2>, 2> comm {};
  // <s|e_i e_j^dag|s> - <s|e_j^dag e_i|s>
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) comm[i][j] = ed_s[i].dot(ed_s[j]) - e_s[j].dot(e_s[i]);
  FockReport rep;
  rep.deviation = detail::deviation_from(comm);
  rep.max_deviation = rep.deviation.cwiseAbs().maxCoeff();
  rep.anticommutator_residual = fock.anticommutator_residual();
  rep.dimension = fock.dimension();
  return rep;
}

// Same algebra on sparse states over occupation bitstrings (up to 64 modes).
using SparseFockState = std::unordered_map<std::uint64_t, cplx>;

inline SparseFockState apply_annihilate(const SparseFockState& s, int j) {
  SparseFockState out;
  const std::uint64_t bit = std::uint64_t {1} << j;
  for (const auto& [occ, amp] : s) {
    if (!(occ & bit)) continue;
    const int below = __builtin_popcountll(occ & (bit - 1));
    out[occ ^ bit] += below % 2 ? -amp : amp;
  }
  return out;
}

inline SparseFockState apply_create(const SparseFockState& s, int j) {
  SparseFockState out;
  const std::uint64_t bit = std::uint64_t {1} << j;
  for (const auto& [occ, amp] : s) {
    if (occ & bit) continue;
    const int below = __builtin_popcountll(occ & (bit - 1));
    out[occ | bit] += below % 2 ? -amp : amp;
  }
  return out;
}

inline void accumulate(SparseFockState& into, const SparseFockState& s, cplx c) {
  for (const auto& [occ, amp] : s) into[occ] += c * amp;
}

// <a|b>
inline cplx inner(const SparseFockState& a, const SparseFockState& b) {
  cplx acc {0.0, 0.0};
  for (const auto& [occ, amp] : a) {
    auto it = b.find(occ);
    if (it != b.end()) acc += std::conj(amp) * it->second;
  }
  return acc;
}

inline FockReport fock_commutator_check_sparse(const FockCheckConfig& cfg) {
  cfg.validate();
  if (cfg.modes() > 64) throw CapExceeded("sparse Fock route limited to 64 modes");
  std::uint64_t idx = 0;
  for (int m : cfg.filling) idx |= std::uint64_t {1} << m;
  const SparseFockState state {{idx, cplx {1.0, 0.0}}};
  const std::array<Vec3, 2> us {cfg.u1, cfg.u2};
  std::array<SparseFockState, 2> e_s, ed_s;
  for (std::size_t i = 0; i < 2; ++i)
    for (const auto& t : detail::pair_terms(cfg, us[i])) {
      // eps = c phi psi, eps^dag = conj(c) psi^dag phi^dag
      accumulate(e_s[i], apply_annihilate(apply_annihilate(state, t.psi), t.phi), t.coef);
      accumulate(ed_s[i], apply_create(apply_create(state, t.phi), t.psi), std::conj(t.coef));
    }
  std::array<std::array<cplx, 2>, 2> comm {};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) comm[i][j] = inner(ed_s[i], ed_s[j]) - inner(e_s[j], e_s[i]);
  FockReport rep;
  rep.deviation = detail::deviation_from(comm);
  rep.max_deviation = rep.deviation.cwiseAbs().maxCoeff();
  rep.dimension = 0;
  return rep;
}

// Explicit matrices when 2M <= 24, the sparse-state route otherwise.
inline FockReport fock_commutator_check(const FockCheckConfig& cfg) {
  return cfg.modes() <= 24 ? fock_commutator_check_explicit(cfg) : fock_commutator_check_sparse(cfg);
}

}  // namespace qwalk
