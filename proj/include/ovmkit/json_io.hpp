#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ovmkit/channel.hpp"
#include "ovmkit/measure.hpp"
#include "ovmkit/operator_measure.hpp"
#include "ovmkit/qrv.hpp"

namespace ovmkit {

using Json = nlohmann::json;

namespace jsondetail {

inline const Json& expect(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw schema_error(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw schema_error(path + ": missing field '" + key + "'");
  return *it;
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw schema_error(path + ": expected a number");
  return j.get<double>();
}

inline int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw schema_error(path + ": expected an integer");
  return j.get<int>();
}

inline std::string text(const Json& j, const std::string& path) {
  if (!j.is_string()) throw schema_error(path + ": expected a string");
  return j.get<std::string>();
}

inline const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) throw schema_error(path + ": expected an array");
  return j;
}

template <typename F>
auto rewrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const io_error&) {
    throw;
  } catch (const error& e) {
    throw schema_error(path + ": " + e.what());
  }
}

}  // namespace jsondetail

// ---- matrices: row-major arrays of [re, im] pairs ----

inline Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat matrix_from_json(const Json& j, const std::string& path) {
  using jsondetail::array;
  using jsondetail::number;
  const Json& rows = array(j, path);
  if (rows.empty()) throw schema_error(path + ": matrix has no rows");
  const std::size_t n = rows.size();
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Json& row = array(rows[i], path + "[" + std::to_string(i) + "]");
    if (row.size() != n) {
      throw schema_error(path + ": matrix is not square (row " + std::to_string(i) +
                         " has " + std::to_string(row.size()) + " of " +
                         std::to_string(n) + " entries)");
    }
    for (std::size_t k = 0; k < n; ++k) {
      std::string epath = path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
      const Json& entry = array(row[k], epath);
      if (entry.size() != 2) throw schema_error(epath + ": expected [re, im]");
      m(i, k) = Complex(number(entry[0], epath), number(entry[1], epath));
    }
  }
  return m;
}

// ---- sample spaces ----

inline Json to_json(const SampleSpace& sp) {
  Json j;
  j["intervals"] = Json::array();
  for (const auto& iv : sp.intervals()) j["intervals"].push_back({iv.lo, iv.hi});
  j["atoms"] = Json::array();
  for (const auto& a : sp.atoms()) j["atoms"].push_back({{"id", a.id}, {"x", a.x}});
  return j;
}

inline SampleSpace space_from_json(const Json& j, const std::string& path) {
  using namespace jsondetail;
  std::vector<Interval> intervals;
  std::vector<Atom> atoms;
  if (j.contains("intervals")) {
    const Json& arr = array(j["intervals"], path + ".intervals");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string p = path + ".intervals[" + std::to_string(i) + "]";
      const Json& pair = array(arr[i], p);
      if (pair.size() != 2) throw schema_error(p + ": expected [lo, hi]");
      intervals.push_back({number(pair[0], p), number(pair[1], p)});
    }
  }
  if (j.contains("atoms")) {
    const Json& arr = array(j["atoms"], path + ".atoms");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string p = path + ".atoms[" + std::to_string(i) + "]";
      atoms.push_back({text(expect(arr[i], "id", p), p + ".id"),
                       number(expect(arr[i], "x", p), p + ".x")});
    }
  }
  return rewrap(path, [&] { return SampleSpace(std::move(intervals), std::move(atoms)); });
}

// ---- measurable sets ----

inline Json to_json(const MeasurableSet& e) {
  Json j;
  j["intervals"] = Json::array();
  for (const auto& p : e.parts()) j["intervals"].push_back({p.lo, p.hi});
  j["atoms"] = e.atom_ids();
  return j;
}

inline MeasurableSet set_from_json(const Json& j, const SampleSpace& sp,
                                   const std::string& path) {
  using namespace jsondetail;
  std::vector<std::pair<double, double>> raw;
  std::vector<std::string> ids;
  if (j.contains("intervals")) {
    const Json& arr = array(j["intervals"], path + ".intervals");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string p = path + ".intervals[" + std::to_string(i) + "]";
      const Json& pair = array(arr[i], p);
      if (pair.size() != 2) throw schema_error(p + ": expected [lo, hi]");
      raw.emplace_back(number(pair[0], p), number(pair[1], p));
    }
  }
  if (j.contains("atoms")) {
    const Json& arr = array(j["atoms"], path + ".atoms");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ids.push_back(text(arr[i], path + ".atoms[" + std::to_string(i) + "]"));
    }
  }
  return rewrap(path, [&] { return MeasurableSet(sp, raw, std::move(ids)); });
}

// ---- hybrid measures ----

inline Json to_json(const HybridMeasure& mu, bool with_space = false) {
  Json j;
  if (with_space) j["space"] = to_json(mu.space());
  j["atoms"] = Json::object();
  for (const auto& [id, w] : mu.atom_weights()) j["atoms"][id] = w;
  j["densities"] = Json::array();
  for (const auto& p : mu.pieces()) {
    j["densities"].push_back({{"piece", {p.lo, p.hi}}, {"value", p.value}});
  }
  return j;
}

inline HybridMeasure measure_from_json(const Json& j, const SampleSpace& sp,
                                       const std::string& path) {
  using namespace jsondetail;
  std::vector<PiecewiseEntry<double>> pieces;
  std::map<std::string, double> atom_weights;
  if (j.contains("densities")) {
    const Json& arr = array(j["densities"], path + ".densities");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string p = path + ".densities[" + std::to_string(i) + "]";
      const Json& pair = array(expect(arr[i], "piece", p), p + ".piece");
      if (pair.size() != 2) throw schema_error(p + ".piece: expected [lo, hi]");
      double lo = number(pair[0], p + ".piece");
      double hi = number(pair[1], p + ".piece");
      int interval = sp.covering_interval(lo, hi);
      if (interval < 0) {
        throw schema_error(p + ".piece: not contained in any space interval");
      }
      pieces.push_back({interval, lo, hi, number(expect(arr[i], "value", p), p + ".value")});
    }
  }
  if (j.contains("atoms")) {
    const Json& obj = j["atoms"];
    if (!obj.is_object()) throw schema_error(path + ".atoms: expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      atom_weights[it.key()] = number(it.value(), path + ".atoms." + it.key());
    }
  }
  return rewrap(path, [&] {
    return HybridMeasure(sp, std::move(pieces), std::move(atom_weights));
  });
}

// Standalone measure file: the space rides along.
inline HybridMeasure measure_from_json_standalone(const Json& j, const std::string& path) {
  SampleSpace sp = space_from_json(jsondetail::expect(j, "space", path), path + ".space");
  return measure_from_json(j, sp, path);
}

// ---- operator measures ----

inline Json to_json(const OperatorMeasure& nu) {
  Json j;
  j["space"] = to_json(nu.space());
  j["dim"] = nu.dim();
  j["terms"] = Json::array();
  for (const auto& t : nu.terms()) {
    j["terms"].push_back({{"measure", to_json(t.measure)}, {"matrix", to_json(t.weight)}});
  }
  OvmValidation v = validate(nu);
  j["flags"] = {{"positive", v.positive}, {"probability", v.probability}};
  return j;
}

inline OperatorMeasure ovm_from_json(const Json& j, const std::string& path) {
  using namespace jsondetail;
  SampleSpace sp = space_from_json(expect(j, "space", path), path + ".space");
  int dim = integer(expect(j, "dim", path), path + ".dim");
  std::vector<OperatorMeasure::Term> terms;
  if (j.contains("terms")) {
    const Json& arr = array(j["terms"], path + ".terms");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string p = path + ".terms[" + std::to_string(i) + "]";
      HybridMeasure mu = measure_from_json(expect(arr[i], "measure", p), sp, p + ".measure");
      Mat a = matrix_from_json(expect(arr[i], "matrix", p), p + ".matrix");
      terms.push_back({std::move(mu), std::move(a)});
    }
  }
  OperatorMeasure nu = rewrap(path, [&] {
    return OperatorMeasure(sp, dim, std::move(terms));
  });
  if (j.contains("flags") && j["flags"].is_object()) {
    OvmValidation v = validate(nu);
    const Json& flags = j["flags"];
    if (flags.contains("positive") && flags["positive"].is_boolean() &&
        flags["positive"].get<bool>() != v.positive) {
      throw schema_error(path + ".flags.positive: inconsistent with the terms");
    }
    if (flags.contains("probability") && flags["probability"].is_boolean() &&
        flags["probability"].get<bool>() != v.probability) {
      throw schema_error(path + ".flags.probability: inconsistent with the terms");
    }
  }
  return nu;
}

// ---- quantum random variables ----

inline Json to_json(const QuantumRandomVariable& f) {
  Json j;
  j["space"] = to_json(f.space());
  j["dim"] = f.dim();
  j["pieces"] = Json::array();
  for (const auto& p : f.pieces()) {
    j["pieces"].push_back({{"piece", {p.lo, p.hi}},
                           {"c", p.value.c},
                           {"alpha", p.value.alpha},
                           {"matrix", to_json(p.value.f)}});
  }
  j["atoms"] = Json::object();
  for (const auto& [id, m] : f.atoms()) j["atoms"][id] = to_json(m);
  return j;
}

inline QuantumRandomVariable qrv_from_json(const Json& j, const std::string& path) {
  using namespace jsondetail;
  SampleSpace sp = space_from_json(expect(j, "space", path), path + ".space");
  int dim = integer(expect(j, "dim", path), path + ".dim");
  std::vector<PiecewiseEntry<QrvPieceData>> pieces;
  if (j.contains("pieces")) {
    const Json& arr = array(j["pieces"], path + ".pieces");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string p = path + ".pieces[" + std::to_string(i) + "]";
      const Json& pair = array(expect(arr[i], "piece", p), p + ".piece");
      if (pair.size() != 2) throw schema_error(p + ".piece: expected [lo, hi]");
      double lo = number(pair[0], p + ".piece");
      double hi = number(pair[1], p + ".piece");
      int interval = sp.covering_interval(lo, hi);
      if (interval < 0) {
        throw schema_error(p + ".piece: not contained in any space interval");
      }
      QrvPieceData data;
      data.c = number(expect(arr[i], "c", p), p + ".c");
      data.alpha = number(expect(arr[i], "alpha", p), p + ".alpha");
      data.f = matrix_from_json(expect(arr[i], "matrix", p), p + ".matrix");
      pieces.push_back({interval, lo, hi, std::move(data)});
    }
  }
  std::map<std::string, Mat> atoms;
  if (j.contains("atoms")) {
    const Json& obj = j["atoms"];
    if (!obj.is_object()) throw schema_error(path + ".atoms: expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      atoms[it.key()] = matrix_from_json(it.value(), path + ".atoms." + it.key());
    }
  }
  return rewrap(path, [&] {
    return QuantumRandomVariable(sp, dim, std::move(pieces), std::move(atoms));
  });
}

// ---- channels ----

inline Json to_json(const Channel& ch) {
  Json j;
  j["in_dim"] = ch.in_dim();
  j["out_dim"] = ch.out_dim();
  j["kraus"] = Json::array();
  for (const auto& k : ch.kraus()) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < k.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < k.cols(); ++c) {
        row.push_back(Json::array({k(r, c).real(), k(r, c).imag()}));
      }
      rows.push_back(std::move(row));
    }
    j["kraus"].push_back(std::move(rows));
  }
  return j;
}

inline Channel channel_from_json(const Json& j, const std::string& path,
                                 double unital_tol = 1e-7) {
  using namespace jsondetail;
  int in_dim = integer(expect(j, "in_dim", path), path + ".in_dim");
  int out_dim = integer(expect(j, "out_dim", path), path + ".out_dim");
  std::vector<Mat> kraus;
  const Json& arr = array(expect(j, "kraus", path), path + ".kraus");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string p = path + ".kraus[" + std::to_string(i) + "]";
    const Json& rows = array(arr[i], p);
    Mat k(rows.size(), rows.empty() ? 0 : array(rows[0], p).size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Json& row = array(rows[r], p + "[" + std::to_string(r) + "]");
      if (static_cast<Eigen::Index>(row.size()) != k.cols()) {
        throw schema_error(p + ": ragged Kraus matrix");
      }
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::string epath = p + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
        const Json& entry = array(row[c], epath);
        if (entry.size() != 2) throw schema_error(epath + ": expected [re, im]");
        k(r, c) = Complex(number(entry[0], epath), number(entry[1], epath));
      }
    }
    kraus.push_back(std::move(k));
  }
  return rewrap(path, [&] {
    return Channel(in_dim, out_dim, std::move(kraus), unital_tol);
  });
}

// ---- density matrices ----

inline DensityMatrix density_from_json(const Json& j, const std::string& path) {
  const Json& m = j.is_object() && j.contains("matrix") ? j["matrix"] : j;
  Mat raw = matrix_from_json(m, path);
  return jsondetail::rewrap(path, [&] { return make_density(raw); });
}

// ---- files ----

inline Json read_json_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw parse_error("cannot open '" + filename + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(filename + ": " + e.what());
  }
  return j;
}

inline void write_json_file(const std::string& filename, const Json& j) {
  std::ofstream out(filename);
  if (!out) throw parse_error("cannot open '" + filename + "' for writing");
  out << j.dump(2) << "\n";
}

}  // namespace ovmkit
