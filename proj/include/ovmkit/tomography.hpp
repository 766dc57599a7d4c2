#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ovmkit/operator_measure.hpp"

namespace ovmkit {

namespace detail {

// Gram-Schmidt under the trace inner product. Inputs are Hermitian, and inner
// products of Hermitian matrices are real, so the output stays Hermitian.
// Candidates are normalized first so the drop decision is scale-free.
inline std::vector<Mat> trace_orthonormalize(const std::vector<Mat>& candidates,
                                             double drop_tol = 1e-9) {
  std::vector<Mat> basis;
  for (const Mat& raw : candidates) {
    double scale = frobenius(raw);
    if (scale <= 0.0) continue;
    Mat c = raw / scale;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Mat& b : basis) {
        c -= trace_inner(b, c).real() * b;
      }
    }
    double nrm = frobenius(c);
    if (nrm > drop_tol) basis.push_back(hermitian_part(c / nrm));
  }
  return basis;
}

inline int trace_rank(const std::vector<Mat>& candidates, double drop_tol = 1e-9) {
  return static_cast<int>(trace_orthonormalize(candidates, drop_tol).size());
}

inline Mat project_onto_span(const Mat& z, const std::vector<Mat>& basis) {
  Mat out = Mat::Zero(z.rows(), z.cols());
  for (const Mat& b : basis) out += trace_inner(b, z) * b;
  return out;
}

}  // namespace detail

// Orthonormalized (trace inner product) basis of the span of the measure's
// range. In this model the range is spanned by the canonical piece densities
// and atom effects, since generator sets isolate pieces and atoms.
struct MeasurementSpace {
  int dim = 0;
  std::vector<Mat> basis;
  int rank = 0;
};

inline MeasurementSpace measurement_space(const OperatorMeasure& nu,
                                          double psd_tol = tol::psd,
                                          double drop_tol = 1e-9) {
  require_positive(nu, psd_tol);
  std::vector<Mat> candidates;
  for (const auto& p : nu.pieces()) candidates.push_back(p.value);
  for (const auto& [id, t] : nu.atom_effects()) candidates.push_back(t);
  MeasurementSpace out;
  out.dim = nu.dim();
  out.basis = detail::trace_orthonormalize(candidates, drop_tol);
  out.rank = static_cast<int>(out.basis.size());
  return out;
}

// A quantum probability measure separates the state space exactly when its
// measurement space is everything, i.e. of rank dim^2.
inline bool is_informationally_complete(const OperatorMeasure& nu,
                                        double psd_tol = tol::psd,
                                        double prob_tol = tol::trace) {
  require_qpm(nu, psd_tol, prob_tol);
  MeasurementSpace ms = measurement_space(nu, psd_tol);
  return ms.rank == nu.dim() * nu.dim();
}

// Builds nu(E) = sum_j mu_j(E) A_j from mutually singular probability
// measures and positive effects that sum to the identity and span the full
// matrix space. The result is a validated informationally complete quantum
// probability measure. The failing hypothesis, if any, is named.
inline OperatorMeasure construct_ic(const std::vector<HybridMeasure>& measures,
                                    const std::vector<Mat>& effects,
                                    double psd_tol = tol::psd,
                                    double prob_tol = tol::trace,
                                    double support_tol = tol::support) {
  if (measures.empty() || measures.size() != effects.size()) {
    throw hypothesis_violated("need equally many measures and effects");
  }
  const SampleSpace& sp = measures.front().space();
  int n = static_cast<int>(effects.front().rows());
  Mat sum = Mat::Zero(n, n);
  for (std::size_t j = 0; j < effects.size(); ++j) {
    Mat h;
    try {
      h = require_hermitian(effects[j]);
    } catch (const not_hermitian&) {
      throw hypothesis_violated("effect " + std::to_string(j) + " is not Hermitian");
    }
    PsdReport r = is_psd(h, psd_tol);
    if (!r.psd) {
      throw hypothesis_violated("effect " + std::to_string(j) + " is not positive (eig " +
                                std::to_string(r.min_eigenvalue) + ")");
    }
    sum += h;
  }
  if (operator_norm(sum - identity(n)) > prob_tol) {
    throw hypothesis_violated("effects do not sum to the identity");
  }
  if (detail::trace_rank(effects) != n * n) {
    throw hypothesis_violated("effects do not span the full matrix space");
  }
  for (std::size_t j = 0; j < measures.size(); ++j) {
    require_same_space(sp, measures[j].space());
    if (!measures[j].is_positive()) {
      throw hypothesis_violated("measure " + std::to_string(j) + " is not positive");
    }
    if (std::abs(measures[j].total() - 1.0) > prob_tol) {
      throw hypothesis_violated("measure " + std::to_string(j) +
                                " is not a probability measure");
    }
    for (std::size_t k = j + 1; k < measures.size(); ++k) {
      if (!measures_singular(measures[j], measures[k], support_tol)) {
        throw hypothesis_violated("measures " + std::to_string(j) + " and " +
                                  std::to_string(k) + " are not mutually singular");
      }
    }
  }
  std::vector<OperatorMeasure::Term> terms;
  for (std::size_t j = 0; j < measures.size(); ++j) {
    terms.push_back({measures[j], effects[j]});
  }
  OperatorMeasure nu(sp, n, std::move(terms));
  require_qpm(nu, psd_tol, prob_tol);
  return nu;
}

struct MeasurementBasisReport {
  bool verdict = false;
  bool independent = false;  // the basis effects are linearly independent
  bool spans = false;        // and they span the measurement space
  std::vector<Mat> basis_effects;               // nu(E_j)
  std::vector<HybridMeasure> coefficient_measures;  // mu_j = phi_j(nu(.))
  Mat residual;                                 // nu of the uncovered set
  std::vector<double> necessary_margins;  // min of phi_j over pieces/atoms
  std::vector<double> cone_margins;       // iterative min of phi_j over states in T_nu
};

// Checks whether {nu(E_j)} is a measurement basis: pairwise disjoint family,
// unique expansion on the measurement space (independence + span), and
// positive coefficient functionals. Positivity is verified at two levels: the
// necessary piecewise check phi_j(M_p), phi_j(T_k) >= -tol (this is what the
// verdict uses, and it is exactly positivity of the coefficient measures),
// and an advisory projected-iteration minimization of phi_j over unit-trace
// PSD elements of the measurement space, reported as cone_margins.
inline MeasurementBasisReport verify_measurement_basis(
    const OperatorMeasure& nu, const std::vector<MeasurableSet>& family,
    int max_iter = 200, double margin_tol = 1e-9, double psd_tol = tol::psd,
    double prob_tol = tol::trace) {
  require_qpm(nu, psd_tol, prob_tol);
  if (family.empty()) throw not_disjoint("empty family");
  for (const auto& e : family) require_same_space(nu.space(), e.space());
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      if (!sets_disjoint(family[i], family[j])) {
        throw not_disjoint("family sets " + std::to_string(i) + " and " +
                           std::to_string(j) + " intersect");
      }
    }
  }

  MeasurementBasisReport rep;
  int n = nu.dim();
  const std::size_t m = family.size();
  for (const auto& e : family) rep.basis_effects.push_back(nu.eval(e));

  MeasurementSpace ms = measurement_space(nu, psd_tol);
  int family_rank = detail::trace_rank(rep.basis_effects);
  rep.independent = family_rank == static_cast<int>(m);
  rep.spans = family_rank == ms.rank;

  // Dual basis under the trace pairing restricted to the span of the effects.
  // With a singular Gram matrix (dependent family) the pseudo-inverse gives
  // least-norm coefficients; the verdict is already false in that case.
  Eigen::MatrixXd gram(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      gram(i, j) = trace_inner(rep.basis_effects[i], rep.basis_effects[j]).real();
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> gram_inv(gram);
  std::vector<Mat> duals;
  for (std::size_t j = 0; j < m; ++j) {
    Eigen::VectorXd ej = Eigen::VectorXd::Zero(m);
    ej(j) = 1.0;
    Eigen::VectorXd w = gram_inv.solve(ej);
    Mat d = Mat::Zero(n, n);
    for (std::size_t k = 0; k < m; ++k) d += w(k) * rep.basis_effects[k];
    duals.push_back(hermitian_part(d));
  }

  bool necessary_ok = true;
  for (std::size_t j = 0; j < m; ++j) {
    double margin = 0.0;
    std::vector<PiecewiseEntry<double>> pieces;
    for (const auto& p : nu.pieces()) {
      double v = trace_inner(duals[j], p.value).real();
      margin = std::min(margin, v);
      pieces.push_back({p.interval, p.lo, p.hi, v});
    }
    std::map<std::string, double> atoms;
    for (const auto& [id, t] : nu.atom_effects()) {
      double v = trace_inner(duals[j], t).real();
      margin = std::min(margin, v);
      atoms[id] = v;
    }
    rep.coefficient_measures.emplace_back(nu.space(), std::move(pieces), std::move(atoms));
    rep.necessary_margins.push_back(margin);
    if (margin < -margin_tol) necessary_ok = false;
  }

  // Advisory cone minimization: projected subgradient descent of
  // Z -> tr(Phi_j Z) over {Z in T_nu, Z >= 0, tr Z = 1}.
  for (std::size_t j = 0; j < m; ++j) {
    double grad_norm = std::max(frobenius(duals[j]), 1e-12);
    Mat z = detail::project_onto_span(identity(n) / static_cast<double>(n), ms.basis);
    double best = trace_inner(duals[j], z).real();
    for (int it = 1; it <= max_iter; ++it) {
      z -= (0.5 / (grad_norm * std::sqrt(static_cast<double>(it)))) * duals[j];
      for (int cycle = 0; cycle < 4; ++cycle) {
        z = detail::project_onto_span(z, ms.basis);
        z = psd_clip(z);
        double tr = z.trace().real();
        z = tr > 1e-12 ? Mat(z / tr)
                       : detail::project_onto_span(identity(n) / static_cast<double>(n),
                                                   ms.basis);
      }
      double infeas = frobenius(z - detail::project_onto_span(z, ms.basis));
      if (infeas <= 1e-7) best = std::min(best, trace_inner(duals[j], z).real());
    }
    rep.cone_margins.push_back(best);
  }

  MeasurableSet covered = family.front();
  for (std::size_t i = 1; i < m; ++i) covered = set_union(covered, family[i]);
  rep.residual = nu.eval(set_complement(covered));

  rep.verdict = rep.independent && rep.spans && necessary_ok;
  return rep;
}

}  // namespace ovmkit
