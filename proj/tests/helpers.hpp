#pragma once

// Shared generators and oracles for the test suites. Everything here is
// deliberately independent of the code paths under test where it serves as an
// oracle (rank via pivoted LU, eigenvalues via closed forms, and so on).

#include <map>
#include <random>
#include <vector>

#include "ovmkit/ovmkit.hpp"

namespace testutil {

using namespace ovmkit;

inline Mat random_matrix(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return a;
}

inline Mat random_hermitian(int n, std::mt19937& rng) {
  return hermitian_part(random_matrix(n, rng));
}

inline Mat random_psd(int n, std::mt19937& rng) {
  Mat a = random_matrix(n, rng);
  return a * a.adjoint();
}

// PSD of rank at most r.
inline Mat random_psd_rank(int n, int r, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Mat a(n, r);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < r; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return a * a.adjoint();
}

inline Mat random_unitary(int n, std::mt19937& rng) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(n, rng));
  return qr.householderQ();
}

inline DensityMatrix random_state(int n, std::mt19937& rng, bool full_rank = true) {
  Mat a = random_psd(n, rng);
  if (full_rank) a += 0.05 * identity(n);
  return make_density(a / a.trace().real());
}

// Small hybrid space: one or two intervals starting at zero plus atoms.
inline SampleSpace random_space(std::mt19937& rng, int max_intervals = 2,
                                int max_atoms = 2) {
  std::uniform_int_distribution<int> ni(1, max_intervals);
  std::uniform_int_distribution<int> na(0, max_atoms);
  std::vector<Interval> ivs;
  double cursor = 0.0;
  int k = ni(rng);
  std::uniform_real_distribution<double> len(0.25, 1.5);
  for (int i = 0; i < k; ++i) {
    double l = len(rng);
    ivs.push_back({cursor, cursor + l});
    cursor += l;
  }
  std::vector<Atom> atoms;
  int m = na(rng);
  for (int i = 0; i < m; ++i) atoms.push_back({"a" + std::to_string(i), cursor + i});
  return SampleSpace(ivs, atoms);
}

// Random positive operator measure with a 2-3 piece partition per interval.
inline OperatorMeasure random_positive_ovm(const SampleSpace& sp, int dim,
                                           std::mt19937& rng,
                                           bool allow_rank_deficient = false) {
  std::uniform_int_distribution<int> npieces(1, 3);
  std::uniform_int_distribution<int> rank(1, dim);
  std::vector<PiecewiseEntry<Mat>> pieces;
  for (std::size_t i = 0; i < sp.intervals().size(); ++i) {
    const Interval& iv = sp.intervals()[i];
    int k = npieces(rng);
    for (int j = 0; j < k; ++j) {
      double lo = iv.lo + iv.length() * j / k;
      double hi = iv.lo + iv.length() * (j + 1) / k;
      Mat m = allow_rank_deficient ? random_psd_rank(dim, rank(rng), rng)
                                   : random_psd(dim, rng);
      pieces.push_back({static_cast<int>(i), lo, hi, m});
    }
  }
  std::map<std::string, Mat> atoms;
  for (const auto& a : sp.atoms()) {
    atoms[a.id] = allow_rank_deficient ? random_psd_rank(dim, rank(rng), rng)
                                       : random_psd(dim, rng);
  }
  return OperatorMeasure::from_canonical(sp, dim, pieces, atoms);
}

// Random quantum probability measure: a random positive measure conjugated by
// total^{-1/2} so the total becomes the identity.
inline OperatorMeasure random_qpm(const SampleSpace& sp, int dim, std::mt19937& rng) {
  OperatorMeasure nu = random_positive_ovm(sp, dim, rng);
  Mat w = pseudo_inverse(psd_sqrt(nu.total()), 1e-12);
  std::vector<PiecewiseEntry<Mat>> pieces;
  for (const auto& p : nu.pieces()) {
    pieces.push_back({p.interval, p.lo, p.hi, hermitian_part(w * p.value * w)});
  }
  std::map<std::string, Mat> atoms;
  for (const auto& [id, t] : nu.atom_effects()) atoms[id] = hermitian_part(w * t * w);
  return OperatorMeasure::from_canonical(sp, dim, pieces, atoms);
}

// Random integrable variable on the space: exponents above -1, random
// envelopes, Hermitian or general matrices.
inline QuantumRandomVariable random_qrv(const SampleSpace& sp, int dim, std::mt19937& rng,
                                        bool hermitian = true) {
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_int_distribution<int> alpha_pick(0, 3);
  const double alphas[4] = {0.0, 1.0, 0.5, -0.5};
  std::uniform_int_distribution<int> npieces(1, 2);
  std::vector<PiecewiseEntry<QrvPieceData>> pieces;
  for (std::size_t i = 0; i < sp.intervals().size(); ++i) {
    const Interval& iv = sp.intervals()[i];
    int k = npieces(rng);
    for (int j = 0; j < k; ++j) {
      double lo = iv.lo + iv.length() * j / k;
      double hi = iv.lo + iv.length() * (j + 1) / k;
      Mat f = hermitian ? random_hermitian(dim, rng) : random_matrix(dim, rng);
      pieces.push_back({static_cast<int>(i), lo, hi, {coeff(rng), alphas[alpha_pick(rng)], f}});
    }
  }
  std::map<std::string, Mat> atoms;
  for (const auto& a : sp.atoms()) {
    atoms[a.id] = hermitian ? random_hermitian(dim, rng) : random_matrix(dim, rng);
  }
  return QuantumRandomVariable(sp, dim, std::move(pieces), std::move(atoms));
}

// Rank over the reals of a family of Hermitian matrices, via pivoted LU on
// the real coordinate vectors. Independent of the library's Gram-Schmidt.
inline int lu_rank(const std::vector<Mat>& mats, double threshold = 1e-9) {
  if (mats.empty()) return 0;
  const int n = static_cast<int>(mats.front().rows());
  Eigen::MatrixXd coords(mats.size(), n * n);
  for (std::size_t k = 0; k < mats.size(); ++k) {
    int c = 0;
    for (int i = 0; i < n; ++i) coords(k, c++) = mats[k](i, i).real();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        coords(k, c++) = mats[k](i, j).real();
        coords(k, c++) = mats[k](i, j).imag();
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(coords);
  lu.setThreshold(threshold);
  return static_cast<int>(lu.rank());
}

// The integral entry oracle: the (i,j) entry of the integral is the scalar
// integral of the pairing against the unit s = e_{ji}, evaluated against the
// induced measure of the given state. Exercises the state-dependent route.
inline Mat integral_via_state(const QuantumRandomVariable& f, const OperatorMeasure& nu,
                              const DensityMatrix& rho) {
  const int n = nu.dim();
  HybridMeasure nurho = induced_measure(nu, rho);
  Mat out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Mat s = Mat::Zero(n, n);
      s(j, i) = 1.0;  // tr(s A) = A(i, j)
      out(i, j) = integrate_envelope(pair_function(f, nu, s, rho), nurho);
    }
  }
  return out;
}

inline Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Mat pauli_y() {
  Mat m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// The running two-interval diagonal example: nu(E) = diag(mu(E cap (0,1]),
// mu(E cap (1,2])).
inline OperatorMeasure m2_example() {
  SampleSpace sp({{0.0, 1.0}, {1.0, 2.0}}, {});
  Mat e11 = Mat::Zero(2, 2);
  e11(0, 0) = 1.0;
  Mat e22 = Mat::Zero(2, 2);
  e22(1, 1) = 1.0;
  return OperatorMeasure(sp, 2,
                         {{HybridMeasure::indicator_density(sp, 0, 0.0, 1.0), e11},
                          {HybridMeasure::indicator_density(sp, 1, 1.0, 2.0), e22}});
}

// f = (chi_(0,1]/x) sigma_x on the space of m2_example.
inline QuantumRandomVariable m2_offdiag_variable() {
  SampleSpace sp({{0.0, 1.0}, {1.0, 2.0}}, {});
  return QuantumRandomVariable(sp, 2, {{0, 0.0, 1.0, {1.0, -1.0, pauli_x()}}}, {});
}

}  // namespace testutil
