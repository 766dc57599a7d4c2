#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ovmkit/errors.hpp"

namespace ovmkit {

// Half-open interval (lo, hi]. All interval endpoints in a sample space are
// finite and nonnegative; single points inside an interval carry no mass.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

// Labeled point. Membership is decided by id, never by coordinate.
struct Atom {
  std::string id;
  double x = 0.0;

  bool operator==(const Atom& o) const { return id == o.id && x == o.x; }
};

// Hybrid domain: a finite union of disjoint half-open intervals plus a finite
// set of labeled atoms. Intervals are kept sorted; atoms are kept sorted by id.
class SampleSpace {
public:
  SampleSpace() = default;

  SampleSpace(std::vector<Interval> intervals, std::vector<Atom> atoms)
      : intervals_(std::move(intervals)), atoms_(std::move(atoms)) {
    for (const auto& iv : intervals_) {
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
        throw domain_error("interval endpoint is not finite");
      }
      if (iv.lo < 0.0) throw domain_error("interval starts below zero");
      if (!(iv.lo < iv.hi)) throw domain_error("interval has lo >= hi");
    }
    std::sort(intervals_.begin(), intervals_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < intervals_.size(); ++i) {
      if (intervals_[i].lo < intervals_[i - 1].hi) {
        throw domain_error("intervals overlap");
      }
    }
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!std::isfinite(atoms_[i].x)) throw domain_error("atom coordinate is not finite");
      if (i > 0 && atoms_[i].id == atoms_[i - 1].id) {
        throw domain_error("duplicate atom id '" + atoms_[i].id + "'");
      }
    }
  }

  const std::vector<Interval>& intervals() const { return intervals_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  bool operator==(const SampleSpace& o) const {
    return intervals_ == o.intervals_ && atoms_ == o.atoms_;
  }
  bool operator!=(const SampleSpace& o) const { return !(*this == o); }

  int atom_index(const std::string& id) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].id == id) return static_cast<int>(i);
    }
    return -1;
  }

  bool has_atom(const std::string& id) const { return atom_index(id) >= 0; }

  // Index of the interval whose closure contains [lo, hi], or -1.
  int covering_interval(double lo, double hi) const {
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
      if (intervals_[i].lo <= lo && hi <= intervals_[i].hi) return static_cast<int>(i);
    }
    return -1;
  }

  double total_length() const {
    double s = 0.0;
    for (const auto& iv : intervals_) s += iv.length();
    return s;
  }

private:
  std::vector<Interval> intervals_;
  std::vector<Atom> atoms_;
};

inline void require_same_space(const SampleSpace& a, const SampleSpace& b) {
  if (a != b) throw space_mismatch("operands live on different sample spaces");
}

// One sub-interval of a measurable set, tagged with the space interval it
// sits inside. Canonical sets never merge across distinct space intervals.
struct SetPart {
  int interval = 0;
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const SetPart& o) const {
    return interval == o.interval && lo == o.lo && hi == o.hi;
  }
};

// Element of the algebra generated by the sample space: a canonical list of
// disjoint sub-intervals (sorted, merged, clipped to the space) plus a sorted
// subset of atom ids.
class MeasurableSet {
public:
  MeasurableSet() = default;

  MeasurableSet(SampleSpace space, const std::vector<std::pair<double, double>>& raw,
                std::vector<std::string> atom_ids)
      : space_(std::move(space)) {
    std::vector<SetPart> clipped;
    for (const auto& [lo, hi] : raw) {
      if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw domain_error("set interval endpoint is not finite");
      }
      if (lo > hi) throw domain_error("set interval has lo > hi");
      if (lo == hi) continue;  // (a, a] is empty
      for (std::size_t i = 0; i < space_.intervals().size(); ++i) {
        double l = std::max(lo, space_.intervals()[i].lo);
        double h = std::min(hi, space_.intervals()[i].hi);
        if (l < h) clipped.push_back({static_cast<int>(i), l, h});
      }
    }
    std::sort(clipped.begin(), clipped.end(), [](const SetPart& a, const SetPart& b) {
      return a.interval != b.interval ? a.interval < b.interval : a.lo < b.lo;
    });
    for (const auto& p : clipped) {
      if (!parts_.empty() && parts_.back().interval == p.interval &&
          p.lo <= parts_.back().hi) {
        parts_.back().hi = std::max(parts_.back().hi, p.hi);
      } else {
        parts_.push_back(p);
      }
    }
    std::sort(atom_ids.begin(), atom_ids.end());
    atom_ids.erase(std::unique(atom_ids.begin(), atom_ids.end()), atom_ids.end());
    for (const auto& id : atom_ids) {
      if (!space_.has_atom(id)) throw domain_error("unknown atom id '" + id + "'");
    }
    atom_ids_ = std::move(atom_ids);
  }

  static MeasurableSet whole(const SampleSpace& space) {
    std::vector<std::pair<double, double>> raw;
    for (const auto& iv : space.intervals()) raw.emplace_back(iv.lo, iv.hi);
    std::vector<std::string> ids;
    for (const auto& a : space.atoms()) ids.push_back(a.id);
    return MeasurableSet(space, raw, ids);
  }

  static MeasurableSet nothing(const SampleSpace& space) {
    return MeasurableSet(space, {}, {});
  }

  const SampleSpace& space() const { return space_; }
  const std::vector<SetPart>& parts() const { return parts_; }
  const std::vector<std::string>& atom_ids() const { return atom_ids_; }

  bool contains_atom(const std::string& id) const {
    return std::binary_search(atom_ids_.begin(), atom_ids_.end(), id);
  }

  bool is_empty() const { return parts_.empty() && atom_ids_.empty(); }

  bool operator==(const MeasurableSet& o) const {
    return space_ == o.space_ && parts_ == o.parts_ && atom_ids_ == o.atom_ids_;
  }

  // Total overlap length with (lo, hi] inside space interval `interval`.
  double overlap(int interval, double lo, double hi) const {
    double s = 0.0;
    for (const auto& p : parts_) {
      if (p.interval != interval) continue;
      double l = std::max(lo, p.lo);
      double h = std::min(hi, p.hi);
      if (l < h) s += h - l;
    }
    return s;
  }

private:
  SampleSpace space_;
  std::vector<SetPart> parts_;
  std::vector<std::string> atom_ids_;
};

inline MeasurableSet set_union(const MeasurableSet& a, const MeasurableSet& b) {
  require_same_space(a.space(), b.space());
  std::vector<std::pair<double, double>> raw;
  for (const auto& p : a.parts()) raw.emplace_back(p.lo, p.hi);
  for (const auto& p : b.parts()) raw.emplace_back(p.lo, p.hi);
  std::vector<std::string> ids = a.atom_ids();
  ids.insert(ids.end(), b.atom_ids().begin(), b.atom_ids().end());
  return MeasurableSet(a.space(), raw, ids);
}

inline MeasurableSet set_intersect(const MeasurableSet& a, const MeasurableSet& b) {
  require_same_space(a.space(), b.space());
  std::vector<std::pair<double, double>> raw;
  for (const auto& p : a.parts()) {
    for (const auto& q : b.parts()) {
      if (p.interval != q.interval) continue;
      double lo = std::max(p.lo, q.lo);
      double hi = std::min(p.hi, q.hi);
      if (lo < hi) raw.emplace_back(lo, hi);
    }
  }
  std::vector<std::string> ids;
  for (const auto& id : a.atom_ids()) {
    if (b.contains_atom(id)) ids.push_back(id);
  }
  return MeasurableSet(a.space(), raw, ids);
}

inline MeasurableSet set_complement(const MeasurableSet& a) {
  const SampleSpace& sp = a.space();
  std::vector<std::pair<double, double>> raw;
  for (std::size_t i = 0; i < sp.intervals().size(); ++i) {
    double cursor = sp.intervals()[i].lo;
    for (const auto& p : a.parts()) {
      if (p.interval != static_cast<int>(i)) continue;
      if (cursor < p.lo) raw.emplace_back(cursor, p.lo);
      cursor = p.hi;
    }
    if (cursor < sp.intervals()[i].hi) raw.emplace_back(cursor, sp.intervals()[i].hi);
  }
  std::vector<std::string> ids;
  for (const auto& atom : sp.atoms()) {
    if (!a.contains_atom(atom.id)) ids.push_back(atom.id);
  }
  return MeasurableSet(sp, raw, ids);
}

inline bool sets_disjoint(const MeasurableSet& a, const MeasurableSet& b) {
  return set_intersect(a, b).is_empty();
}

}  // namespace ovmkit
