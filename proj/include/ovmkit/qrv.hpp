#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ovmkit/operator_measure.hpp"

namespace ovmkit {

// Value of a quantum random variable on one piece: f(x) = c * x^alpha * F.
// The envelope scalar c * x^alpha keeps a constant sign on a piece (x > 0 on
// half-open pieces), so the sign of c can always be folded into the matrix.
struct QrvPieceData {
  double c = 0.0;
  double alpha = 0.0;
  Mat f;
};

// Matrix-valued function on a hybrid space: a power-law envelope times a
// constant matrix per piece, a plain matrix per atom.
class QuantumRandomVariable {
public:
  QuantumRandomVariable() = default;

  QuantumRandomVariable(SampleSpace space, int dim,
                        std::vector<PiecewiseEntry<QrvPieceData>> pieces,
                        std::map<std::string, Mat> atoms)
      : space_(std::move(space)), dim_(dim) {
    if (dim_ < 1) throw domain_error("dimension must be at least 1");
    QrvPieceData zero{0.0, 0.0, Mat::Zero(dim_, dim_)};
    for (auto& p : pieces) {
      if (p.value.f.rows() != dim_ || p.value.f.cols() != dim_) {
        throw dim_mismatch("piece matrix does not match the variable dimension");
      }
      if (!std::isfinite(p.value.c) || !std::isfinite(p.value.alpha)) {
        throw domain_error("piece envelope is not finite");
      }
      if (!p.value.f.allFinite()) throw domain_error("piece matrix has non-finite entries");
      if (p.value.f.size() == 0) p.value.f = Mat::Zero(dim_, dim_);
    }
    pieces_ = canonicalize_cover(space_, std::move(pieces), zero);
    for (const auto& [id, m] : atoms) {
      if (!space_.has_atom(id)) throw domain_error("unknown atom id '" + id + "'");
      if (m.rows() != dim_ || m.cols() != dim_) {
        throw dim_mismatch("atom matrix does not match the variable dimension");
      }
      if (!m.allFinite()) throw domain_error("atom matrix has non-finite entries");
    }
    atoms_ = std::move(atoms);
  }

  static QuantumRandomVariable constant(const SampleSpace& space, const Mat& value) {
    int n = static_cast<int>(value.rows());
    std::vector<PiecewiseEntry<QrvPieceData>> pieces;
    for (std::size_t i = 0; i < space.intervals().size(); ++i) {
      pieces.push_back({static_cast<int>(i), space.intervals()[i].lo,
                        space.intervals()[i].hi, {1.0, 0.0, value}});
    }
    std::map<std::string, Mat> atoms;
    for (const auto& a : space.atoms()) atoms[a.id] = value;
    return {space, n, std::move(pieces), std::move(atoms)};
  }

  // chi_E * value: the matrix on E, zero elsewhere.
  static QuantumRandomVariable indicator(const MeasurableSet& e, const Mat& value) {
    int n = static_cast<int>(value.rows());
    std::vector<PiecewiseEntry<QrvPieceData>> pieces;
    for (const auto& p : e.parts()) {
      pieces.push_back({p.interval, p.lo, p.hi, {1.0, 0.0, value}});
    }
    std::map<std::string, Mat> atoms;
    for (const auto& id : e.atom_ids()) atoms[id] = value;
    return {e.space(), n, std::move(pieces), std::move(atoms)};
  }

  const SampleSpace& space() const { return space_; }
  int dim() const { return dim_; }
  const std::vector<PiecewiseEntry<QrvPieceData>>& pieces() const { return pieces_; }
  const std::map<std::string, Mat>& atoms() const { return atoms_; }

  Mat atom_value(const std::string& id) const {
    auto it = atoms_.find(id);
    return it == atoms_.end() ? Mat(Mat::Zero(dim_, dim_)) : it->second;
  }

  Mat value_at(int interval, double x) const {
    const QrvPieceData* p = piecewise_lookup(pieces_, interval, x);
    if (!p) return Mat::Zero(dim_, dim_);
    return p->c * std::pow(x, p->alpha) * p->f;
  }

  bool is_self_adjoint(double herm_tol = tol::herm) const {
    for (const auto& p : pieces_) {
      if (p.value.c != 0.0 && !is_hermitian(p.value.f, herm_tol)) return false;
    }
    for (const auto& [id, m] : atoms_) {
      if (!is_hermitian(m, herm_tol)) return false;
    }
    return true;
  }

  bool is_positive(double psd_tol = tol::psd, double herm_tol = tol::herm) const {
    for (const auto& p : pieces_) {
      if (p.value.c == 0.0) continue;
      Mat g = (p.value.c > 0 ? 1.0 : -1.0) * p.value.f;
      if (!is_hermitian(g, herm_tol) || !is_psd(g, psd_tol, herm_tol).psd) return false;
    }
    for (const auto& [id, m] : atoms_) {
      if (!is_hermitian(m, herm_tol) || !is_psd(m, psd_tol, herm_tol).psd) return false;
    }
    return true;
  }

private:
  SampleSpace space_;
  int dim_ = 0;
  std::vector<PiecewiseEntry<QrvPieceData>> pieces_;
  std::map<std::string, Mat> atoms_;
};

enum class QrvFn { re, im, pos_part, neg_part, abs, sqrt };

// Pointwise calculus. re/im act on any variable; pos_part/neg_part/abs need a
// self-adjoint one and sqrt a positive one. The envelope sign folds into the
// matrix before the spectral map; sqrt halves the exponent.
inline QuantumRandomVariable qrv_calculus(const QuantumRandomVariable& f, QrvFn fn,
                                          double herm_tol = tol::herm,
                                          double psd_tol = tol::psd) {
  int n = f.dim();
  Mat zero = Mat::Zero(n, n);

  auto linear_piece = [&](const QrvPieceData& p) -> QrvPieceData {
    Mat m = fn == QrvFn::re ? Mat(hermitian_part(p.f))
                            : Mat(((p.f - p.f.adjoint()) / Complex(0.0, 2.0)).eval());
    return {p.c, p.alpha, m};
  };
  auto spectral_piece = [&](const QrvPieceData& p) -> QrvPieceData {
    double s = p.c > 0 ? 1.0 : (p.c < 0 ? -1.0 : 0.0);
    if (fn == QrvFn::sqrt) {
      if (s == 0.0) return {0.0, p.alpha / 2.0, zero};
      Mat g;
      try {
        g = spectral_apply(s * p.f, SpectralFn::sqrt, herm_tol, psd_tol);
      } catch (const not_hermitian&) {
        throw not_positive("piece value is not self-adjoint");
      } catch (const not_psd&) {
        throw not_positive("piece value is not positive");
      }
      return {std::sqrt(std::abs(p.c)), p.alpha / 2.0, g};
    }
    if (s == 0.0) return {0.0, p.alpha, zero};
    SpectralFn sf = fn == QrvFn::pos_part ? SpectralFn::pos_part
                    : fn == QrvFn::neg_part ? SpectralFn::neg_part
                                            : SpectralFn::abs;
    Mat g;
    try {
      g = spectral_apply(s * p.f, sf, herm_tol, psd_tol);
    } catch (const not_hermitian&) {
      throw not_self_adjoint("piece value is not self-adjoint");
    }
    return {std::abs(p.c), p.alpha, g};
  };
  auto spectral_atom = [&](const Mat& m) -> Mat {
    if (fn == QrvFn::sqrt) {
      try {
        return spectral_apply(m, SpectralFn::sqrt, herm_tol, psd_tol);
      } catch (const not_hermitian&) {
        throw not_positive("atom value is not self-adjoint");
      } catch (const not_psd&) {
        throw not_positive("atom value is not positive");
      }
    }
    SpectralFn sf = fn == QrvFn::pos_part ? SpectralFn::pos_part
                    : fn == QrvFn::neg_part ? SpectralFn::neg_part
                                            : SpectralFn::abs;
    try {
      return spectral_apply(m, sf, herm_tol, psd_tol);
    } catch (const not_hermitian&) {
      throw not_self_adjoint("atom value is not self-adjoint");
    }
  };

  std::vector<PiecewiseEntry<QrvPieceData>> pieces;
  std::map<std::string, Mat> atoms;
  bool linear = fn == QrvFn::re || fn == QrvFn::im;
  for (const auto& p : f.pieces()) {
    pieces.push_back(
        {p.interval, p.lo, p.hi, linear ? linear_piece(p.value) : spectral_piece(p.value)});
  }
  for (const auto& [id, m] : f.atoms()) {
    if (linear) {
      atoms[id] = fn == QrvFn::re ? Mat(hermitian_part(m))
                                  : Mat(((m - m.adjoint()) / Complex(0.0, 2.0)).eval());
    } else {
      atoms[id] = spectral_atom(m);
    }
  }
  return {f.space(), n, std::move(pieces), std::move(atoms)};
}

// Scalar function with a power-law envelope per piece: coeff * x^alpha.
struct EnvelopeTerm {
  Complex coeff{0.0, 0.0};
  double alpha = 0.0;
};

struct ScalarEnvelope {
  SampleSpace space;
  std::vector<PiecewiseEntry<EnvelopeTerm>> pieces;
  std::map<std::string, Complex> atoms;
};

// The state pairing of f against nu: on each piece the scalar
// tr(s D^{1/2} F D^{1/2}) * c with the piece exponent, where D is the
// derivative of nu with respect to its induced measure under rho.
inline ScalarEnvelope pair_function(const QuantumRandomVariable& f,
                                    const OperatorMeasure& nu, const Mat& s,
                                    const DensityMatrix& rho,
                                    double psd_tol = tol::psd,
                                    double support_tol = tol::support) {
  require_same_space(f.space(), nu.space());
  if (f.dim() != nu.dim() || s.rows() != nu.dim() || s.cols() != nu.dim()) {
    throw dim_mismatch("pairing operands have mismatched dimensions");
  }
  PiecewiseOperator d = rn_derivative_state(nu, rho, psd_tol, support_tol);

  CutSet cuts = merge_cut_sets(cuts_of(f.space(), f.pieces()), cuts_of(nu));
  QrvPieceData fzero{0.0, 0.0, Mat::Zero(f.dim(), f.dim())};
  auto fp = resample(f.space(), f.pieces(), cuts, fzero);
  auto dp = resample(d.space, d.pieces, cuts, Mat(Mat::Zero(nu.dim(), nu.dim())));

  ScalarEnvelope out{nu.space(), {}, {}};
  for (std::size_t i = 0; i < fp.size(); ++i) {
    Mat droot = psd_sqrt(dp[i].value, tol::herm, psd_tol);
    Complex coeff = (s * droot * fp[i].value.f * droot).trace() * fp[i].value.c;
    out.pieces.push_back({fp[i].interval, fp[i].lo, fp[i].hi, {coeff, fp[i].value.alpha}});
  }
  for (const auto& atom : nu.space().atoms()) {
    Mat droot = psd_sqrt(d.atoms.at(atom.id), tol::herm, psd_tol);
    out.atoms[atom.id] = (s * droot * f.atom_value(atom.id) * droot).trace();
  }
  return out;
}

// Closed-form integral of x^alpha over (lo, hi]; +infinity when it diverges
// at a left endpoint of zero.
inline double power_integral(double lo, double hi, double alpha) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (alpha == -1.0) {
    return lo > 0.0 ? std::log(hi / lo) : inf;
  }
  double p = alpha + 1.0;
  if (lo <= 0.0 && p < 0.0) return inf;
  double top = std::pow(hi, p);
  double bot = lo > 0.0 ? std::pow(lo, p) : 0.0;
  return (top - bot) / p;
}

// Integral of a scalar envelope function against a hybrid measure, exact per
// piece. Divergent pieces with a nonzero coefficient raise not_integrable.
inline Complex integrate_envelope(const ScalarEnvelope& fs, const HybridMeasure& mu,
                                  double coeff_tol = 1e-14) {
  require_same_space(fs.space, mu.space());
  CutSet cuts = merge_cut_sets(cuts_of(fs.space, fs.pieces), cuts_of(mu));
  auto fp = resample(fs.space, fs.pieces, cuts, EnvelopeTerm{});
  auto mp = resample(mu.space(), mu.pieces(), cuts, 0.0);
  Complex total{0.0, 0.0};
  for (std::size_t i = 0; i < fp.size(); ++i) {
    Complex w = fp[i].value.coeff * mp[i].value;
    if (std::abs(w) <= coeff_tol) continue;
    double integral = power_integral(fp[i].lo, fp[i].hi, fp[i].value.alpha);
    if (!std::isfinite(integral)) {
      throw not_integrable("scalar integral diverges on (" + std::to_string(fp[i].lo) +
                           ", " + std::to_string(fp[i].hi) + "]");
    }
    total += w * integral;
  }
  for (const auto& [id, c] : fs.atoms) total += c * mu.atom_weight(id);
  return total;
}

enum class QrvPart { re_pos, re_neg, im_pos, im_neg };

inline const char* part_name(QrvPart p) {
  switch (p) {
    case QrvPart::re_pos: return "re+";
    case QrvPart::re_neg: return "re-";
    case QrvPart::im_pos: return "im+";
    case QrvPart::im_neg: return "im-";
  }
  return "?";
}

struct DivergentPiece {
  QrvPart part = QrvPart::re_pos;
  int interval = 0;
  double lo = 0.0;
  double hi = 0.0;
  double alpha = 0.0;
  double coefficient = 0.0;  // |c| * tr(G M_p)
};

struct IntegrabilityReport {
  bool integrable = false;         // all four positive parts integrate
  bool weakly_integrable = false;  // every state pairing of f itself integrates
  std::vector<DivergentPiece> divergences;
};

// Finite-dimensional integrability test. A positive part g with piece data
// (|c|, alpha, G) diverges exactly on pieces with left endpoint zero,
// alpha <= -1 and a nonzero trace coefficient |c| * tr(G M_p); the trace
// coefficient dominates every state pairing up to a constant, which makes the
// all-states quantifier decidable. The weak flag applies the same test to f
// itself (pairings of f rather than of its positive parts).
inline IntegrabilityReport is_integrable(const QuantumRandomVariable& f,
                                         const OperatorMeasure& nu,
                                         double div_tol = 1e-12,
                                         double psd_tol = tol::psd) {
  require_same_space(f.space(), nu.space());
  if (f.dim() != nu.dim()) throw dim_mismatch("variable and measure dimensions differ");
  require_positive(nu, psd_tol);

  QuantumRandomVariable re = qrv_calculus(f, QrvFn::re);
  QuantumRandomVariable im = qrv_calculus(f, QrvFn::im);
  std::vector<std::pair<QrvPart, QuantumRandomVariable>> parts;
  parts.emplace_back(QrvPart::re_pos, qrv_calculus(re, QrvFn::pos_part));
  parts.emplace_back(QrvPart::re_neg, qrv_calculus(re, QrvFn::neg_part));
  parts.emplace_back(QrvPart::im_pos, qrv_calculus(im, QrvFn::pos_part));
  parts.emplace_back(QrvPart::im_neg, qrv_calculus(im, QrvFn::neg_part));

  IntegrabilityReport rep;
  rep.integrable = true;
  QrvPieceData fzero{0.0, 0.0, Mat::Zero(f.dim(), f.dim())};
  Mat mzero = Mat::Zero(nu.dim(), nu.dim());
  for (const auto& [tag, g] : parts) {
    CutSet cuts = merge_cut_sets(cuts_of(g.space(), g.pieces()), cuts_of(nu));
    auto gp = resample(g.space(), g.pieces(), cuts, fzero);
    auto np = resample_pieces(nu, cuts);
    for (std::size_t i = 0; i < gp.size(); ++i) {
      if (!(gp[i].lo <= 0.0) || gp[i].value.alpha > -1.0) continue;
      double coeff =
          std::abs(gp[i].value.c) * (gp[i].value.f * np[i].value).trace().real();
      if (coeff > div_tol) {
        rep.integrable = false;
        rep.divergences.push_back({tag, gp[i].interval, gp[i].lo, gp[i].hi,
                                   gp[i].value.alpha, coeff});
      }
    }
  }

  rep.weakly_integrable = true;
  {
    CutSet cuts = merge_cut_sets(cuts_of(f.space(), f.pieces()), cuts_of(nu));
    auto fp = resample(f.space(), f.pieces(), cuts, fzero);
    auto np = resample_pieces(nu, cuts);
    for (std::size_t i = 0; i < fp.size(); ++i) {
      if (!(fp[i].lo <= 0.0) || fp[i].value.alpha > -1.0) continue;
      Mat root = psd_sqrt(np[i].value, tol::herm, psd_tol);
      double coeff = std::abs(fp[i].value.c) * operator_norm(root * fp[i].value.f * root);
      if (coeff > div_tol) rep.weakly_integrable = false;
    }
  }
  return rep;
}

// The integral of f against nu in its state-free form:
//   sum_p c_p (int_p x^alpha dx) M_p^{1/2} F_p M_p^{1/2} + sum_k T_k^{1/2} F_k T_k^{1/2}.
// Linear in f; positive variables integrate to PSD operators; pairing with
// any trace-class s matches the scalar integral of the paired function.
inline Mat integrate(const QuantumRandomVariable& f, const OperatorMeasure& nu,
                     double psd_tol = tol::psd, double div_tol = 1e-12) {
  IntegrabilityReport rep = is_integrable(f, nu, div_tol, psd_tol);
  if (!rep.integrable) {
    std::string msg = "variable is not integrable:";
    for (const auto& d : rep.divergences) {
      msg += " [" + std::string(part_name(d.part)) + " on (" + std::to_string(d.lo) +
             ", " + std::to_string(d.hi) + "], alpha " + std::to_string(d.alpha) + "]";
    }
    throw not_integrable(msg);
  }

  CutSet cuts = merge_cut_sets(cuts_of(f.space(), f.pieces()), cuts_of(nu));
  QrvPieceData fzero{0.0, 0.0, Mat::Zero(f.dim(), f.dim())};
  auto fp = resample(f.space(), f.pieces(), cuts, fzero);
  auto np = resample_pieces(nu, cuts);

  Mat out = Mat::Zero(nu.dim(), nu.dim());
  for (std::size_t i = 0; i < fp.size(); ++i) {
    if (fp[i].value.c == 0.0) continue;
    Mat root = psd_sqrt(np[i].value, tol::herm, psd_tol);
    Mat core = root * fp[i].value.f * root;
    double integral = power_integral(fp[i].lo, fp[i].hi, fp[i].value.alpha);
    if (!std::isfinite(integral)) {
      // The integrability gate guarantees the matrix coefficient vanishes here.
      if (max_abs(core) * std::abs(fp[i].value.c) > 100.0 * div_tol) {
        throw not_integrable("divergent piece with nonzero coefficient");
      }
      continue;
    }
    out += fp[i].value.c * integral * core;
  }
  for (const auto& atom : nu.space().atoms()) {
    Mat root = psd_sqrt(nu.atom_effect(atom.id), tol::herm, psd_tol);
    out += root * f.atom_value(atom.id) * root;
  }
  return out;
}

}  // namespace ovmkit
