#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ovmkit/operator_measure.hpp"

namespace ovmkit {

namespace detail {

// Default residual probability measure: uniform on the first interval when
// one exists, otherwise a Dirac mass at the first atom.
inline HybridMeasure default_residual(const SampleSpace& sp) {
  if (!sp.intervals().empty()) {
    const Interval& iv = sp.intervals().front();
    return HybridMeasure::indicator_density(sp, 0, iv.lo, iv.hi, 1.0 / iv.length());
  }
  if (!sp.atoms().empty()) {
    return HybridMeasure::dirac(sp, sp.atoms().front().id, 1.0);
  }
  throw domain_error("sample space is empty; no residual measure exists");
}

inline HybridMeasure dirac_residual(const SampleSpace& sp) {
  if (!sp.atoms().empty()) return HybridMeasure::dirac(sp, sp.atoms().front().id, 1.0);
  return default_residual(sp);
}

inline HybridMeasure uniform_residual(const SampleSpace& sp) {
  if (!sp.intervals().empty()) return default_residual(sp);
  if (!sp.atoms().empty()) return HybridMeasure::dirac(sp, sp.atoms().front().id, 1.0);
  throw domain_error("sample space is empty; no residual measure exists");
}

inline void require_probability(const HybridMeasure& mu, double tol_total = tol::trace) {
  if (!mu.is_positive()) throw not_positive("residual measure is not positive");
  if (std::abs(mu.total() - 1.0) > tol_total) {
    throw domain_error("residual measure total is " + std::to_string(mu.total()));
  }
}

}  // namespace detail

// Normalizing factorization nu(E) = nu(X)^{1/2} omega(E) nu(X)^{1/2} with
// omega a quantum probability measure. On the range of nu(X) the factor is
// the pseudo-inverse conjugation of nu's canonical data; the kernel of nu(X)
// carries the residual probability measure. omega is unique on ran nu(X); the
// residual choice only moves the kernel component.
inline OperatorMeasure douglas_factor(const OperatorMeasure& nu,
                                      std::optional<HybridMeasure> residual = {},
                                      double psd_tol = tol::psd,
                                      double rank_cutoff = tol::rank) {
  require_positive(nu, psd_tol);
  HybridMeasure mu = residual ? *residual : detail::default_residual(nu.space());
  require_same_space(nu.space(), mu.space());
  detail::require_probability(mu);

  Mat total = nu.total();
  Mat root = psd_sqrt(total, tol::herm, psd_tol);
  Mat pinv = pseudo_inverse(root, rank_cutoff);
  Mat ker = kernel_projector(total, rank_cutoff);

  std::vector<OperatorMeasure::Term> terms;
  for (const auto& p : nu.pieces()) {
    Mat m = hermitian_part(pinv * p.value * pinv);
    if (max_abs(m) > 0.0) {
      terms.push_back(
          {HybridMeasure::indicator_density(nu.space(), p.interval, p.lo, p.hi), m});
    }
  }
  for (const auto& [id, t] : nu.atom_effects()) {
    Mat m = hermitian_part(pinv * t * pinv);
    if (max_abs(m) > 0.0) terms.push_back({HybridMeasure::dirac(nu.space(), id), m});
  }
  if (max_abs(ker) > 0.0) terms.push_back({mu, ker});
  return OperatorMeasure(nu.space(), nu.dim(), std::move(terms));
}

// One summand of a C*-convex combination: coefficient S_i = nu_i(X)^{1/2} and
// a quantum probability measure gamma_i, with sum_i S_i gamma_i(E) S_i
// reconstructing the original measure.
struct CStarDecomposition {
  struct Part {
    Mat coefficient;
    OperatorMeasure gamma;
  };
  std::vector<Part> parts;
};

inline CStarDecomposition cstar_convex_decompose(const std::vector<OperatorMeasure>& parts,
                                                 double psd_tol = tol::psd,
                                                 double prob_tol = tol::trace) {
  if (parts.empty()) throw not_summing_to_qpm("no parts given");
  Mat sum = Mat::Zero(parts.front().dim(), parts.front().dim());
  for (const auto& nu : parts) {
    require_same_space(parts.front().space(), nu.space());
    if (nu.dim() != parts.front().dim()) throw dim_mismatch("parts have different dimensions");
    require_positive(nu, psd_tol);
    sum += nu.total();
  }
  if (operator_norm(sum - identity(parts.front().dim())) > prob_tol) {
    throw not_summing_to_qpm("parts do not sum to a quantum probability measure");
  }
  CStarDecomposition out;
  for (const auto& nu : parts) {
    out.parts.push_back({psd_sqrt(nu.total(), tol::herm, psd_tol),
                         douglas_factor(nu, {}, psd_tol)});
  }
  return out;
}

// omega = (restriction of omega to the support of nu) + (rest): the first is
// absolutely continuous with respect to nu, the second singular to it, and
// the split is exact and unique.
inline std::pair<OperatorMeasure, OperatorMeasure> lebesgue_decompose_ovm(
    const OperatorMeasure& omega, const OperatorMeasure& nu,
    double psd_tol = tol::psd, double support_tol = tol::support) {
  require_same_space(omega.space(), nu.space());
  require_positive(omega, psd_tol);
  require_positive(nu, psd_tol);

  CutSet cuts = merge_cut_sets(cuts_of(omega), cuts_of(nu));
  auto om = resample_pieces(omega, cuts);
  auto nn = resample_pieces(nu, cuts);

  Mat zero = Mat::Zero(omega.dim(), omega.dim());
  std::vector<PiecewiseEntry<Mat>> ac = om, sing = om;
  for (std::size_t i = 0; i < om.size(); ++i) {
    if (operator_norm(nn[i].value) > support_tol) {
      sing[i].value = zero;
    } else {
      ac[i].value = zero;
    }
  }
  std::map<std::string, Mat> ac_atoms, sing_atoms;
  for (const auto& atom : omega.space().atoms()) {
    const Mat& t = omega.atom_effect(atom.id);
    if (operator_norm(nu.atom_effect(atom.id)) > support_tol) {
      ac_atoms[atom.id] = t;
    } else {
      sing_atoms[atom.id] = t;
    }
  }
  return {OperatorMeasure::from_canonical(omega.space(), omega.dim(), ac, ac_atoms),
          OperatorMeasure::from_canonical(omega.space(), omega.dim(), sing, sing_atoms)};
}

// Exact split into the atom part and the interval part. Every nonzero set of
// the first contains an atom; the second has none.
inline std::pair<OperatorMeasure, OperatorMeasure> atomic_split_ovm(
    const OperatorMeasure& nu, double psd_tol = tol::psd) {
  require_positive(nu, psd_tol);
  return {OperatorMeasure::from_canonical(nu.space(), nu.dim(), {}, nu.atom_effects()),
          OperatorMeasure::from_canonical(nu.space(), nu.dim(), nu.pieces(), {})};
}

// nu(E) = P^{1/2} gamma_a(E) P^{1/2} + (I-P)^{1/2} gamma_na(E) (I-P)^{1/2}
// with gamma_a atomic (Dirac kernel residual) and gamma_na non-atomic
// (uniform kernel residual), P = nu_a(X).
struct AtomicCStar {
  Mat p;
  OperatorMeasure gamma_atomic;
  OperatorMeasure gamma_nonatomic;
};

inline AtomicCStar atomic_cstar(const OperatorMeasure& nu, double psd_tol = tol::psd,
                                double prob_tol = tol::trace) {
  require_qpm(nu, psd_tol, prob_tol);
  auto [nu_a, nu_na] = atomic_split_ovm(nu, psd_tol);
  return {nu_a.total(),
          douglas_factor(nu_a, detail::dirac_residual(nu.space()), psd_tol),
          douglas_factor(nu_na, detail::uniform_residual(nu.space()), psd_tol)};
}

// Dilation of an atomic measure with m atoms to a projection-valued measure
// on an (n*m)-dimensional space: V is the row block of the effect square
// roots and the k-th atom maps to the k-th diagonal block projection, so that
// nu(E) = V omega(E) V*. For a quantum probability measure V V* = I.
struct NaimarkDilation {
  int big_dim = 0;
  Mat v;                // n x (n*m)
  OperatorMeasure pvm;  // atomic, on the same sample space, dimension n*m
};

inline NaimarkDilation naimark_dilate(const OperatorMeasure& nu,
                                      double psd_tol = tol::psd,
                                      double support_tol = tol::support) {
  require_positive(nu, psd_tol);
  for (const auto& p : nu.pieces()) {
    if (operator_norm(p.value) > support_tol) {
      throw not_atomic("measure has continuous mass on (" + std::to_string(p.lo) + ", " +
                       std::to_string(p.hi) + "]");
    }
  }
  const auto& atoms = nu.space().atoms();
  if (atoms.empty()) throw not_atomic("measure has no atoms");
  int n = nu.dim();
  int m = static_cast<int>(atoms.size());
  int big = n * m;

  Mat v = Mat::Zero(n, big);
  std::map<std::string, Mat> blocks;
  for (int k = 0; k < m; ++k) {
    v.block(0, k * n, n, n) = psd_sqrt(nu.atom_effect(atoms[k].id), tol::herm, psd_tol);
    Mat proj = Mat::Zero(big, big);
    proj.block(k * n, k * n, n, n) = identity(n);
    blocks[atoms[k].id] = proj;
  }
  return {big, v,
          OperatorMeasure::from_canonical(nu.space(), big, {}, blocks)};
}

}  // namespace ovmkit
