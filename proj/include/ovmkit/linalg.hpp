#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "ovmkit/errors.hpp"
#include "ovmkit/tolerances.hpp"

namespace ovmkit {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline Mat identity(int n) { return Mat::Identity(n, n); }

inline double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double frobenius(const Mat& m) { return m.norm(); }

inline bool is_hermitian(const Mat& m, double herm_tol = tol::herm) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= herm_tol;
}

inline Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

// Symmetrizes to (M + M*)/2 after checking the deviation is within herm_tol.
inline Mat require_hermitian(const Mat& m, double herm_tol = tol::herm) {
  if (m.rows() != m.cols()) throw not_hermitian("matrix is not square");
  if (!m.allFinite()) throw not_hermitian("matrix has non-finite entries");
  double dev = max_abs(m - m.adjoint());
  if (dev > herm_tol) {
    throw not_hermitian("matrix deviates from self-adjointness by " + std::to_string(dev));
  }
  return hermitian_part(m);
}

struct EigenSystem {
  RVec values;   // ascending
  Mat vectors;   // columns
};

inline EigenSystem hermitian_eig(const Mat& m, double herm_tol = tol::herm) {
  Mat h = require_hermitian(m, herm_tol);
  Eigen::SelfAdjointEigenSolver<Mat> solver(h);
  if (solver.info() != Eigen::Success) throw domain_error("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const Mat& m, double herm_tol = tol::herm) {
  return hermitian_eig(m, herm_tol).values.minCoeff();
}

// Spectral norm. Hermitian inputs take the cheap eigenvalue route.
inline double operator_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (is_hermitian(m, 1e-12)) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian_part(m));
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

enum class SpectralFn { sqrt, pos_part, neg_part, abs };

// Functional calculus on a Hermitian matrix: eigenvectors are preserved and
// eigenvalues are mapped by the scalar function. For sqrt, eigenvalues in
// [-psd_tol, 0] are clipped to zero; anything below -psd_tol is rejected.
inline Mat spectral_apply(const Mat& m, SpectralFn fn, double herm_tol = tol::herm,
                          double psd_tol = tol::psd) {
  EigenSystem es = hermitian_eig(m, herm_tol);
  RVec mapped = es.values;
  for (Eigen::Index i = 0; i < mapped.size(); ++i) {
    double v = es.values(i);
    switch (fn) {
      case SpectralFn::sqrt:
        if (v < -psd_tol) {
          throw not_psd("sqrt requested with eigenvalue " + std::to_string(v));
        }
        mapped(i) = v <= 0.0 ? 0.0 : std::sqrt(v);
        break;
      case SpectralFn::pos_part:
        mapped(i) = std::max(v, 0.0);
        break;
      case SpectralFn::neg_part:
        mapped(i) = std::max(-v, 0.0);
        break;
      case SpectralFn::abs:
        mapped(i) = std::abs(v);
        break;
    }
  }
  return hermitian_part(es.vectors * mapped.asDiagonal() * es.vectors.adjoint());
}

inline Mat psd_sqrt(const Mat& m, double herm_tol = tol::herm, double psd_tol = tol::psd) {
  return spectral_apply(m, SpectralFn::sqrt, herm_tol, psd_tol);
}

// Moore-Penrose inverse of a Hermitian matrix: eigenvalues with |v| <= cutoff
// go to zero, the rest to 1/v.
inline Mat pseudo_inverse(const Mat& m, double cutoff = tol::rank,
                          double herm_tol = tol::herm) {
  EigenSystem es = hermitian_eig(m, herm_tol);
  RVec inv = es.values;
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv(i) = std::abs(es.values(i)) <= cutoff ? 0.0 : 1.0 / es.values(i);
  }
  return hermitian_part(es.vectors * inv.asDiagonal() * es.vectors.adjoint());
}

// Projector onto the span of eigenvectors with eigenvalue <= cutoff in modulus.
inline Mat kernel_projector(const Mat& m, double cutoff = tol::rank,
                            double herm_tol = tol::herm) {
  EigenSystem es = hermitian_eig(m, herm_tol);
  RVec sel = es.values;
  for (Eigen::Index i = 0; i < sel.size(); ++i) {
    sel(i) = std::abs(es.values(i)) <= cutoff ? 1.0 : 0.0;
  }
  return hermitian_part(es.vectors * sel.asDiagonal() * es.vectors.adjoint());
}

// Clips negative eigenvalues of the Hermitian part to zero.
inline Mat psd_clip(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian_part(m));
  RVec clipped = solver.eigenvalues().cwiseMax(0.0);
  return hermitian_part(solver.eigenvectors() * clipped.asDiagonal() *
                        solver.eigenvectors().adjoint());
}

struct PsdReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

inline PsdReport is_psd(const Mat& m, double psd_tol = tol::psd,
                        double herm_tol = tol::herm) {
  double lo = min_eigenvalue(m, herm_tol);
  return {lo >= -psd_tol, lo};
}

// Positive unit-trace operator. Construction symmetrizes, clips eigenvalue
// round-off in [-psd_tol, 0] to zero and records whether the state is
// strictly positive definite.
struct DensityMatrix {
  Mat rho;
  bool full_rank = false;

  int dim() const { return static_cast<int>(rho.rows()); }
};

inline DensityMatrix make_density(const Mat& m, double herm_tol = tol::herm,
                                  double psd_tol = tol::psd,
                                  double trace_tol = tol::trace,
                                  double rank_tol = tol::rank) {
  EigenSystem es = hermitian_eig(m, herm_tol);
  if (es.values.minCoeff() < -psd_tol) {
    throw not_density("state has eigenvalue " + std::to_string(es.values.minCoeff()));
  }
  RVec clipped = es.values.cwiseMax(0.0);
  Mat rho = hermitian_part(es.vectors * clipped.asDiagonal() * es.vectors.adjoint());
  double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > trace_tol) {
    throw not_density("state trace is " + std::to_string(tr));
  }
  return {rho, es.values.minCoeff() > rank_tol};
}

inline DensityMatrix maximally_mixed(int n) {
  return {Mat::Identity(n, n) / static_cast<double>(n), true};
}

inline Complex trace_inner(const Mat& a, const Mat& b) {
  return (a.adjoint() * b).trace();
}

}  // namespace ovmkit
