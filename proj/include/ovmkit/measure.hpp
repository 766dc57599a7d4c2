#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ovmkit/piecewise.hpp"
#include "ovmkit/tolerances.hpp"

namespace ovmkit {

// Scalar (possibly signed) measure on a hybrid sample space: one weight per
// atom plus a piecewise-constant density (with respect to length) on each
// interval. The piece list always tiles the intervals exactly.
class HybridMeasure {
public:
  HybridMeasure() = default;

  HybridMeasure(SampleSpace space, std::vector<PiecewiseEntry<double>> pieces,
                std::map<std::string, double> atom_weights)
      : space_(std::move(space)),
        pieces_(canonicalize_cover(space_, std::move(pieces), 0.0)),
        atom_weights_(std::move(atom_weights)) {
    for (const auto& [id, w] : atom_weights_) {
      if (!space_.has_atom(id)) throw domain_error("unknown atom id '" + id + "'");
      if (!std::isfinite(w)) throw domain_error("atom weight is not finite");
    }
    for (const auto& p : pieces_) {
      if (!std::isfinite(p.value)) throw domain_error("density value is not finite");
    }
  }

  static HybridMeasure zero(const SampleSpace& space) { return {space, {}, {}}; }

  // Density 1 on every interval, weight 0 on every atom.
  static HybridMeasure lebesgue(const SampleSpace& space) {
    std::vector<PiecewiseEntry<double>> pieces;
    for (std::size_t i = 0; i < space.intervals().size(); ++i) {
      pieces.push_back({static_cast<int>(i), space.intervals()[i].lo,
                        space.intervals()[i].hi, 1.0});
    }
    return {space, std::move(pieces), {}};
  }

  static HybridMeasure indicator_density(const SampleSpace& space, int interval,
                                         double lo, double hi, double value = 1.0) {
    return {space, {{interval, lo, hi, value}}, {}};
  }

  static HybridMeasure dirac(const SampleSpace& space, const std::string& atom_id,
                             double weight = 1.0) {
    return {space, {}, {{atom_id, weight}}};
  }

  const SampleSpace& space() const { return space_; }
  const std::vector<PiecewiseEntry<double>>& pieces() const { return pieces_; }
  const std::map<std::string, double>& atom_weights() const { return atom_weights_; }

  double atom_weight(const std::string& id) const {
    auto it = atom_weights_.find(id);
    return it == atom_weights_.end() ? 0.0 : it->second;
  }

  double density_at(int interval, double x) const {
    const double* v = piecewise_lookup(pieces_, interval, x);
    return v ? *v : 0.0;
  }

  bool is_positive(double weight_tol = tol::weight) const {
    for (const auto& p : pieces_) {
      if (p.value < -weight_tol) return false;
    }
    for (const auto& [id, w] : atom_weights_) {
      if (w < -weight_tol) return false;
    }
    return true;
  }

  double total() const {
    double s = 0.0;
    for (const auto& p : pieces_) s += (p.hi - p.lo) * p.value;
    for (const auto& [id, w] : atom_weights_) s += w;
    return s;
  }

private:
  SampleSpace space_;
  std::vector<PiecewiseEntry<double>> pieces_;
  std::map<std::string, double> atom_weights_;
};

inline double measure_eval(const HybridMeasure& mu, const MeasurableSet& e) {
  require_same_space(mu.space(), e.space());
  double s = 0.0;
  for (const auto& p : mu.pieces()) {
    s += e.overlap(p.interval, p.lo, p.hi) * p.value;
  }
  for (const auto& id : e.atom_ids()) s += mu.atom_weight(id);
  return s;
}

inline CutSet cuts_of(const HybridMeasure& mu) {
  return cuts_of(mu.space(), mu.pieces());
}

inline HybridMeasure refine_to(const HybridMeasure& mu, const CutSet& cuts) {
  return HybridMeasure(mu.space(), resample(mu.space(), mu.pieces(), cuts, 0.0),
                       mu.atom_weights());
}

// Value-equal copies of the inputs carrying the common partition refinement.
inline std::vector<HybridMeasure> refine_common(const std::vector<HybridMeasure>& ms) {
  if (ms.empty()) return {};
  CutSet cuts = cuts_of(ms.front());
  for (std::size_t i = 1; i < ms.size(); ++i) {
    require_same_space(ms.front().space(), ms[i].space());
    cuts = merge_cut_sets(std::move(cuts), cuts_of(ms[i]));
  }
  std::vector<HybridMeasure> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(refine_to(m, cuts));
  return out;
}

inline HybridMeasure scale(const HybridMeasure& mu, double c) {
  std::vector<PiecewiseEntry<double>> pieces = mu.pieces();
  for (auto& p : pieces) p.value *= c;
  std::map<std::string, double> atoms = mu.atom_weights();
  for (auto& [id, w] : atoms) w *= c;
  return HybridMeasure(mu.space(), std::move(pieces), std::move(atoms));
}

inline HybridMeasure add(const HybridMeasure& a, const HybridMeasure& b) {
  auto refined = refine_common({a, b});
  std::vector<PiecewiseEntry<double>> pieces = refined[0].pieces();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    pieces[i].value += refined[1].pieces()[i].value;
  }
  std::map<std::string, double> atoms = a.atom_weights();
  for (const auto& [id, w] : b.atom_weights()) atoms[id] += w;
  return HybridMeasure(a.space(), std::move(pieces), std::move(atoms));
}

inline bool measures_close(const HybridMeasure& a, const HybridMeasure& b, double tol) {
  if (a.space() != b.space()) return false;
  auto refined = refine_common({a, b});
  for (std::size_t i = 0; i < refined[0].pieces().size(); ++i) {
    if (std::abs(refined[0].pieces()[i].value - refined[1].pieces()[i].value) > tol) {
      return false;
    }
  }
  for (const auto& atom : a.space().atoms()) {
    if (std::abs(a.atom_weight(atom.id) - b.atom_weight(atom.id)) > tol) return false;
  }
  return true;
}

// Supports intersect nowhere: no piece and no atom carries mass under both.
inline bool measures_singular(const HybridMeasure& a, const HybridMeasure& b,
                              double support_tol = tol::support) {
  auto refined = refine_common({a, b});
  for (std::size_t i = 0; i < refined[0].pieces().size(); ++i) {
    if (std::abs(refined[0].pieces()[i].value) > support_tol &&
        std::abs(refined[1].pieces()[i].value) > support_tol) {
      return false;
    }
  }
  for (const auto& atom : a.space().atoms()) {
    if (std::abs(a.atom_weight(atom.id)) > support_tol &&
        std::abs(b.atom_weight(atom.id)) > support_tol) {
      return false;
    }
  }
  return true;
}

// Scalar function that is constant on each piece and defined on each atom.
struct PiecewiseScalar {
  SampleSpace space;
  std::vector<PiecewiseEntry<double>> pieces;
  std::map<std::string, double> atoms;
};

// Density of mu2 with respect to mu1 on the common refinement: density ratio
// per piece, weight ratio per atom, zero where both vanish. Fails on any
// locus where mu2 lives but mu1 vanishes.
inline PiecewiseScalar classical_rn(const HybridMeasure& mu2, const HybridMeasure& mu1,
                                    double weight_tol = tol::weight) {
  require_same_space(mu2.space(), mu1.space());
  if (!mu1.is_positive(weight_tol)) {
    throw not_positive("reference measure is not positive");
  }
  auto refined = refine_common({mu2, mu1});
  PiecewiseScalar out{mu1.space(), {}, {}};
  for (std::size_t i = 0; i < refined[0].pieces().size(); ++i) {
    const auto& top = refined[0].pieces()[i];
    double d2 = top.value;
    double d1 = refined[1].pieces()[i].value;
    double v = 0.0;
    if (d1 > weight_tol) {
      v = d2 / d1;
    } else if (std::abs(d2) > weight_tol) {
      throw not_absolutely_continuous("piece (" + std::to_string(top.lo) + ", " +
                                      std::to_string(top.hi) +
                                      "] carries mass but the reference vanishes there");
    }
    out.pieces.push_back({top.interval, top.lo, top.hi, v});
  }
  for (const auto& atom : mu1.space().atoms()) {
    double w2 = mu2.atom_weight(atom.id);
    double w1 = mu1.atom_weight(atom.id);
    double v = 0.0;
    if (w1 > weight_tol) {
      v = w2 / w1;
    } else if (std::abs(w2) > weight_tol) {
      throw not_absolutely_continuous("atom '" + atom.id +
                                      "' carries mass but the reference vanishes there");
    }
    out.atoms[atom.id] = v;
  }
  return out;
}

// omega = absolutely-continuous part (supported where nu lives) + singular
// part (supported where nu vanishes). The split is exact.
inline std::pair<HybridMeasure, HybridMeasure> classical_lebesgue(
    const HybridMeasure& omega, const HybridMeasure& nu,
    double weight_tol = tol::weight) {
  require_same_space(omega.space(), nu.space());
  if (!omega.is_positive(weight_tol) || !nu.is_positive(weight_tol)) {
    throw not_positive("lebesgue decomposition requires positive measures");
  }
  auto refined = refine_common({omega, nu});
  std::vector<PiecewiseEntry<double>> ac = refined[0].pieces();
  std::vector<PiecewiseEntry<double>> sing = ac;
  for (std::size_t i = 0; i < ac.size(); ++i) {
    if (refined[1].pieces()[i].value > weight_tol) {
      sing[i].value = 0.0;
    } else {
      ac[i].value = 0.0;
    }
  }
  std::map<std::string, double> ac_atoms, sing_atoms;
  for (const auto& [id, w] : omega.atom_weights()) {
    if (nu.atom_weight(id) > weight_tol) {
      ac_atoms[id] = w;
    } else {
      sing_atoms[id] = w;
    }
  }
  return {HybridMeasure(omega.space(), std::move(ac), std::move(ac_atoms)),
          HybridMeasure(omega.space(), std::move(sing), std::move(sing_atoms))};
}

// Exact split into the atom part and the interval-density part.
inline std::pair<HybridMeasure, HybridMeasure> classical_atomic_split(
    const HybridMeasure& mu, double weight_tol = tol::weight) {
  if (!mu.is_positive(weight_tol)) {
    throw not_positive("atomic split requires a positive measure");
  }
  return {HybridMeasure(mu.space(), {}, mu.atom_weights()),
          HybridMeasure(mu.space(), mu.pieces(), {})};
}

}  // namespace ovmkit
