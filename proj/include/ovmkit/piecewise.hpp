#pragma once

#include <algorithm>
#include <vector>

#include "ovmkit/sample_space.hpp"

namespace ovmkit {

// Constant value on the half-open sub-interval (lo, hi] of a space interval.
template <typename T>
struct PiecewiseEntry {
  int interval = 0;
  double lo = 0.0;
  double hi = 0.0;
  T value{};
};

// Per space interval, the full sorted boundary list (endpoints included).
using CutSet = std::vector<std::vector<double>>;

inline CutSet base_cuts(const SampleSpace& sp) {
  CutSet cuts;
  cuts.reserve(sp.intervals().size());
  for (const auto& iv : sp.intervals()) cuts.push_back({iv.lo, iv.hi});
  return cuts;
}

inline void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

inline CutSet merge_cut_sets(CutSet a, const CutSet& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    a[i].insert(a[i].end(), b[i].begin(), b[i].end());
    sort_unique(a[i]);
  }
  return a;
}

template <typename T>
CutSet cuts_of(const SampleSpace& sp, const std::vector<PiecewiseEntry<T>>& entries) {
  CutSet cuts = base_cuts(sp);
  for (const auto& e : entries) {
    cuts[e.interval].push_back(e.lo);
    cuts[e.interval].push_back(e.hi);
  }
  for (auto& c : cuts) sort_unique(c);
  return cuts;
}

// Entry covering the point x of space interval `interval`, or nullptr.
template <typename T>
const T* piecewise_lookup(const std::vector<PiecewiseEntry<T>>& entries, int interval,
                          double x) {
  for (const auto& e : entries) {
    if (e.interval == interval && e.lo < x && x <= e.hi) return &e.value;
  }
  return nullptr;
}

// Re-expresses `entries` on the partition given by `cuts`. Values are sampled
// at cell midpoints, which is exact for piecewise-constant data whose own
// boundaries are contained in `cuts`.
template <typename T>
std::vector<PiecewiseEntry<T>> resample(const SampleSpace& sp,
                                        const std::vector<PiecewiseEntry<T>>& entries,
                                        const CutSet& cuts, const T& zero) {
  std::vector<PiecewiseEntry<T>> out;
  for (std::size_t i = 0; i < sp.intervals().size(); ++i) {
    const auto& c = cuts[i];
    for (std::size_t j = 0; j + 1 < c.size(); ++j) {
      double mid = 0.5 * (c[j] + c[j + 1]);
      const T* v = piecewise_lookup(entries, static_cast<int>(i), mid);
      out.push_back({static_cast<int>(i), c[j], c[j + 1], v ? *v : zero});
    }
  }
  return out;
}

// Validates sparse user entries (containment in a space interval, pairwise
// disjointness) and fills uncovered gaps with `zero` so every interval is
// exactly tiled.
template <typename T>
std::vector<PiecewiseEntry<T>> canonicalize_cover(const SampleSpace& sp,
                                                  std::vector<PiecewiseEntry<T>> entries,
                                                  const T& zero) {
  for (const auto& e : entries) {
    if (e.interval < 0 || e.interval >= static_cast<int>(sp.intervals().size())) {
      throw domain_error("piece references an interval outside the space");
    }
    const Interval& iv = sp.intervals()[e.interval];
    if (!(iv.lo <= e.lo && e.lo < e.hi && e.hi <= iv.hi)) {
      throw domain_error("piece is not contained in its space interval");
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const PiecewiseEntry<T>& a, const PiecewiseEntry<T>& b) {
              return a.interval != b.interval ? a.interval < b.interval : a.lo < b.lo;
            });
  std::vector<PiecewiseEntry<T>> out;
  std::size_t k = 0;
  for (std::size_t i = 0; i < sp.intervals().size(); ++i) {
    const Interval& iv = sp.intervals()[i];
    double cursor = iv.lo;
    while (k < entries.size() && entries[k].interval == static_cast<int>(i)) {
      if (entries[k].lo < cursor) throw domain_error("pieces overlap");
      if (entries[k].lo > cursor) {
        out.push_back({static_cast<int>(i), cursor, entries[k].lo, zero});
      }
      out.push_back(entries[k]);
      cursor = entries[k].hi;
      ++k;
    }
    if (cursor < iv.hi) out.push_back({static_cast<int>(i), cursor, iv.hi, zero});
  }
  return out;
}

}  // namespace ovmkit
