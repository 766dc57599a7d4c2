#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ovmkit/linalg.hpp"
#include "ovmkit/measure.hpp"

namespace ovmkit {

// Operator-valued measure written as a finite sum of scalar measures weighted
// by Hermitian matrices: nu(E) = sum_j mu_j(E) A_j. Construction derives the
// canonical piecewise form (one matrix density per refined piece, one effect
// per atom), which every operation works from.
class OperatorMeasure {
public:
  struct Term {
    HybridMeasure measure;
    Mat weight;
  };

  OperatorMeasure() = default;

  OperatorMeasure(SampleSpace space, int dim, std::vector<Term> terms,
                  double herm_tol = tol::herm)
      : space_(std::move(space)), dim_(dim), terms_(std::move(terms)) {
    if (dim_ < 1) throw domain_error("dimension must be at least 1");
    for (auto& t : terms_) {
      require_same_space(space_, t.measure.space());
      if (t.weight.rows() != dim_ || t.weight.cols() != dim_) {
        throw dim_mismatch("term matrix does not match the measure dimension");
      }
      t.weight = require_hermitian(t.weight, herm_tol);
    }
    rebuild_canonical();
  }

  // Builds a measure directly from canonical data: a matrix density per piece
  // and an effect per atom. Zero pieces/atoms are dropped from the term list.
  static OperatorMeasure from_canonical(const SampleSpace& space, int dim,
                                        const std::vector<PiecewiseEntry<Mat>>& pieces,
                                        const std::map<std::string, Mat>& atom_effects) {
    std::vector<Term> terms;
    for (const auto& p : pieces) {
      if (p.value.size() != 0 && max_abs(p.value) > 0.0) {
        terms.push_back({HybridMeasure::indicator_density(space, p.interval, p.lo, p.hi),
                         p.value});
      }
    }
    for (const auto& [id, t] : atom_effects) {
      if (t.size() != 0 && max_abs(t) > 0.0) {
        terms.push_back({HybridMeasure::dirac(space, id), t});
      }
    }
    return OperatorMeasure(space, dim, std::move(terms));
  }

  static OperatorMeasure zero(const SampleSpace& space, int dim) {
    return OperatorMeasure(space, dim, {});
  }

  const SampleSpace& space() const { return space_; }
  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }

  // Canonical form: pieces tile every interval; atoms cover every space atom.
  const std::vector<PiecewiseEntry<Mat>>& pieces() const { return pieces_; }
  const std::map<std::string, Mat>& atom_effects() const { return atoms_; }

  const Mat& atom_effect(const std::string& id) const {
    auto it = atoms_.find(id);
    if (it == atoms_.end()) throw domain_error("unknown atom id '" + id + "'");
    return it->second;
  }

  Mat eval(const MeasurableSet& e) const {
    require_same_space(space_, e.space());
    Mat out = Mat::Zero(dim_, dim_);
    for (const auto& p : pieces_) {
      double len = e.overlap(p.interval, p.lo, p.hi);
      if (len > 0.0) out += len * p.value;
    }
    for (const auto& id : e.atom_ids()) out += atoms_.at(id);
    return out;
  }

  Mat total() const { return eval(MeasurableSet::whole(space_)); }

private:
  void rebuild_canonical() {
    CutSet cuts = base_cuts(space_);
    for (const auto& t : terms_) cuts = merge_cut_sets(std::move(cuts), cuts_of(t.measure));
    pieces_.clear();
    for (std::size_t i = 0; i < space_.intervals().size(); ++i) {
      const auto& c = cuts[i];
      for (std::size_t j = 0; j + 1 < c.size(); ++j) {
        double mid = 0.5 * (c[j] + c[j + 1]);
        Mat m = Mat::Zero(dim_, dim_);
        for (const auto& t : terms_) {
          double d = t.measure.density_at(static_cast<int>(i), mid);
          if (d != 0.0) m += d * t.weight;
        }
        pieces_.push_back({static_cast<int>(i), c[j], c[j + 1], m});
      }
    }
    atoms_.clear();
    for (const auto& atom : space_.atoms()) {
      Mat m = Mat::Zero(dim_, dim_);
      for (const auto& t : terms_) {
        double w = t.measure.atom_weight(atom.id);
        if (w != 0.0) m += w * t.weight;
      }
      atoms_[atom.id] = m;
    }
  }

  SampleSpace space_;
  int dim_ = 0;
  std::vector<Term> terms_;
  std::vector<PiecewiseEntry<Mat>> pieces_;
  std::map<std::string, Mat> atoms_;
};

inline CutSet cuts_of(const OperatorMeasure& nu) {
  return cuts_of(nu.space(), nu.pieces());
}

// Canonical pieces of nu re-expressed on the given partition.
inline std::vector<PiecewiseEntry<Mat>> resample_pieces(const OperatorMeasure& nu,
                                                        const CutSet& cuts) {
  return resample(nu.space(), nu.pieces(), cuts, Mat(Mat::Zero(nu.dim(), nu.dim())));
}

struct OvmValidation {
  bool positive = false;
  bool probability = false;
  double min_piece_eigenvalue = 0.0;  // over pieces and atoms
  Mat total;
};

inline OvmValidation validate(const OperatorMeasure& nu, double psd_tol = tol::psd,
                              double prob_tol = tol::trace) {
  OvmValidation rep;
  double lo = 0.0;
  for (const auto& p : nu.pieces()) lo = std::min(lo, min_eigenvalue(p.value));
  for (const auto& [id, t] : nu.atom_effects()) lo = std::min(lo, min_eigenvalue(t));
  rep.min_piece_eigenvalue = lo;
  rep.positive = lo >= -psd_tol;
  rep.total = nu.total();
  rep.probability =
      rep.positive && operator_norm(rep.total - identity(nu.dim())) <= prob_tol;
  return rep;
}

inline void require_positive(const OperatorMeasure& nu, double psd_tol = tol::psd) {
  OvmValidation v = validate(nu, psd_tol);
  if (!v.positive) {
    throw not_positive("operator measure has a piece with eigenvalue " +
                       std::to_string(v.min_piece_eigenvalue));
  }
}

inline void require_qpm(const OperatorMeasure& nu, double psd_tol = tol::psd,
                        double prob_tol = tol::trace) {
  OvmValidation v = validate(nu, psd_tol, prob_tol);
  if (!v.probability) {
    throw not_qpm("operator measure is not a quantum probability measure");
  }
}

// Scalar measure E -> tr(rho nu(E)).
inline HybridMeasure induced_measure(const OperatorMeasure& nu, const DensityMatrix& rho) {
  if (rho.dim() != nu.dim()) throw dim_mismatch("state dimension does not match measure");
  std::vector<PiecewiseEntry<double>> pieces;
  for (const auto& p : nu.pieces()) {
    pieces.push_back({p.interval, p.lo, p.hi, (rho.rho * p.value).trace().real()});
  }
  std::map<std::string, double> atoms;
  for (const auto& [id, t] : nu.atom_effects()) {
    atoms[id] = (rho.rho * t).trace().real();
  }
  return HybridMeasure(nu.space(), std::move(pieces), std::move(atoms));
}

// Matrix-valued function that is constant on each piece and defined on each atom.
struct PiecewiseOperator {
  SampleSpace space;
  int dim = 0;
  std::vector<PiecewiseEntry<Mat>> pieces;
  std::map<std::string, Mat> atoms;
};

inline double sup_norm(const PiecewiseOperator& f) {
  double s = 0.0;
  for (const auto& p : f.pieces) s = std::max(s, operator_norm(p.value));
  for (const auto& [id, m] : f.atoms) s = std::max(s, operator_norm(m));
  return s;
}

// Density of nu with respect to its induced measure under rho: per piece
// M_p / tr(rho M_p), per atom T_k / tr(rho T_k), zero where the piece carries
// no mass. Each value is PSD and integrating it against the induced measure
// recovers nu.
inline PiecewiseOperator rn_derivative_state(const OperatorMeasure& nu,
                                             const DensityMatrix& rho,
                                             double psd_tol = tol::psd,
                                             double support_tol = tol::support) {
  if (rho.dim() != nu.dim()) throw dim_mismatch("state dimension does not match measure");
  if (!rho.full_rank) throw not_full_rank("state is not full rank");
  require_positive(nu, psd_tol);
  PiecewiseOperator out{nu.space(), nu.dim(), {}, {}};
  for (const auto& p : nu.pieces()) {
    Mat d = Mat::Zero(nu.dim(), nu.dim());
    if (operator_norm(p.value) > support_tol) {
      d = p.value / (rho.rho * p.value).trace().real();
    }
    out.pieces.push_back({p.interval, p.lo, p.hi, d});
  }
  for (const auto& [id, t] : nu.atom_effects()) {
    Mat d = Mat::Zero(nu.dim(), nu.dim());
    if (operator_norm(t) > support_tol) {
      d = t / (rho.rho * t).trace().real();
    }
    out.atoms[id] = d;
  }
  return out;
}

// Density g of omega with respect to nu, defined by conjugation with the
// pseudo-inverse square roots of nu's piece densities. The range condition is
// verified on every piece and atom:
//   || M_nu^{1/2} g M_nu^{1/2} - M_omega || <= resid_tol,
// otherwise the derivative does not exist and the offending locus is reported.
inline PiecewiseOperator rn_derivative_ovm(const OperatorMeasure& omega,
                                           const OperatorMeasure& nu,
                                           std::optional<DensityMatrix> rho = {},
                                           double resid_tol = 1e-8,
                                           double rank_cutoff = tol::rank,
                                           double psd_tol = tol::psd) {
  require_same_space(omega.space(), nu.space());
  if (omega.dim() != nu.dim()) throw dim_mismatch("operands have different dimensions");
  require_positive(omega, psd_tol);
  require_positive(nu, psd_tol);
  if (rho && !rho->full_rank) throw not_full_rank("state is not full rank");

  CutSet cuts = merge_cut_sets(cuts_of(omega), cuts_of(nu));
  auto om = resample_pieces(omega, cuts);
  auto nn = resample_pieces(nu, cuts);

  PiecewiseOperator out{nu.space(), nu.dim(), {}, {}};
  auto derive = [&](const Mat& mo, const Mat& mn, const std::string& locus) {
    Mat root = psd_sqrt(mn, tol::herm, psd_tol);
    Mat pinv = pseudo_inverse(root, rank_cutoff);
    Mat g = hermitian_part(pinv * mo * pinv);
    double resid = operator_norm(root * g * root - mo);
    if (resid > resid_tol) {
      throw no_derivative("no derivative at " + locus + " (range residual " +
                          std::to_string(resid) + ")");
    }
    return g;
  };
  for (std::size_t i = 0; i < om.size(); ++i) {
    std::string locus = "piece (" + std::to_string(om[i].lo) + ", " +
                        std::to_string(om[i].hi) + "]";
    out.pieces.push_back({om[i].interval, om[i].lo, om[i].hi,
                          derive(om[i].value, nn[i].value, locus)});
  }
  for (const auto& [id, to] : omega.atom_effects()) {
    out.atoms[id] = derive(to, nu.atom_effect(id), "atom '" + id + "'");
  }
  return out;
}

enum class SupportRelation {
  omega_ac_nu,   // omega << nu only
  nu_ac_omega,   // nu << omega only
  mutually_ac,
  singular,
  incomparable,
};

struct SupportReport {
  SupportRelation relation = SupportRelation::incomparable;
  // Generator set where omega lives but nu vanishes (set when omega is not
  // absolutely continuous with respect to nu), and vice versa.
  std::optional<MeasurableSet> omega_witness;
  std::optional<MeasurableSet> nu_witness;
};

// Computed from piece/atom supports of the canonical forms. Dimensions of the
// two measures may differ; only the sample space must be shared.
inline SupportReport support_relation(const OperatorMeasure& omega,
                                      const OperatorMeasure& nu,
                                      double support_tol = tol::support) {
  require_same_space(omega.space(), nu.space());
  CutSet cuts = merge_cut_sets(cuts_of(omega), cuts_of(nu));
  auto om = resample_pieces(omega, cuts);
  auto nn = resample_pieces(nu, cuts);

  SupportReport rep;
  bool omega_ll = true, nu_ll = true, disjoint = true;
  auto piece_set = [&](const PiecewiseEntry<Mat>& p) {
    return MeasurableSet(omega.space(), {{p.lo, p.hi}}, {});
  };
  for (std::size_t i = 0; i < om.size(); ++i) {
    bool o = operator_norm(om[i].value) > support_tol;
    bool n = operator_norm(nn[i].value) > support_tol;
    if (o && !n && omega_ll) {
      omega_ll = false;
      rep.omega_witness = piece_set(om[i]);
    }
    if (n && !o && nu_ll) {
      nu_ll = false;
      rep.nu_witness = piece_set(nn[i]);
    }
    if (o && n) disjoint = false;
  }
  for (const auto& atom : omega.space().atoms()) {
    bool o = operator_norm(omega.atom_effect(atom.id)) > support_tol;
    bool n = operator_norm(nu.atom_effect(atom.id)) > support_tol;
    if (o && !n && omega_ll) {
      omega_ll = false;
      rep.omega_witness = MeasurableSet(omega.space(), {}, {atom.id});
    }
    if (n && !o && nu_ll) {
      nu_ll = false;
      rep.nu_witness = MeasurableSet(omega.space(), {}, {atom.id});
    }
    if (o && n) disjoint = false;
  }
  if (omega_ll && nu_ll) {
    rep.relation = SupportRelation::mutually_ac;
  } else if (omega_ll) {
    rep.relation = SupportRelation::omega_ac_nu;
  } else if (nu_ll) {
    rep.relation = SupportRelation::nu_ac_omega;
  } else if (disjoint) {
    rep.relation = SupportRelation::singular;
  } else {
    rep.relation = SupportRelation::incomparable;
  }
  return rep;
}

// Collapses the continuous part onto a grid of cells: each cell of the
// partition induced by `grid` becomes a fresh atom carrying nu(cell); existing
// atoms are kept. The total is preserved. Cuts must lie within the closure of
// the space intervals; cuts at interval endpoints are no-ops.
inline OperatorMeasure discretize(const OperatorMeasure& nu,
                                  const std::vector<double>& grid) {
  const SampleSpace& sp = nu.space();
  if (sp.intervals().empty()) {
    if (!grid.empty()) throw bad_grid("space has no intervals to cut");
    return nu;
  }
  CutSet cuts = base_cuts(sp);
  for (double x : grid) {
    bool placed = false;
    for (std::size_t i = 0; i < sp.intervals().size(); ++i) {
      const Interval& iv = sp.intervals()[i];
      if (iv.lo <= x && x <= iv.hi) {
        cuts[i].push_back(x);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw bad_grid("cut " + std::to_string(x) + " lies outside every interval");
    }
  }
  for (auto& c : cuts) sort_unique(c);

  std::vector<Atom> atoms = sp.atoms();
  std::map<std::string, Mat> effects = nu.atom_effects();
  int cell = 0;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    for (std::size_t j = 0; j + 1 < cuts[i].size(); ++j) {
      std::string id = "cell_" + std::to_string(cell++);
      if (sp.has_atom(id)) throw bad_grid("cell id '" + id + "' collides with an atom");
      atoms.push_back({id, 0.5 * (cuts[i][j] + cuts[i][j + 1])});
      effects[id] =
          nu.eval(MeasurableSet(sp, {{cuts[i][j], cuts[i][j + 1]}}, {}));
    }
  }
  SampleSpace atomic_space({}, std::move(atoms));
  return OperatorMeasure::from_canonical(atomic_space, nu.dim(), {}, effects);
}

// True when the canonical forms agree entrywise within tol after refinement
// to a common partition.
inline bool ovm_close(const OperatorMeasure& a, const OperatorMeasure& b, double tol) {
  if (a.space() != b.space() || a.dim() != b.dim()) return false;
  CutSet cuts = merge_cut_sets(cuts_of(a), cuts_of(b));
  auto pa = resample_pieces(a, cuts);
  auto pb = resample_pieces(b, cuts);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (max_abs(pa[i].value - pb[i].value) > tol) return false;
  }
  for (const auto& atom : a.space().atoms()) {
    if (max_abs(a.atom_effect(atom.id) - b.atom_effect(atom.id)) > tol) return false;
  }
  return true;
}

}  // namespace ovmkit
