#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ovmkit/operator_measure.hpp"

namespace ovmkit {

// Completely positive trace-preserving map in Kraus form, acting on trace
// class operators of the output space; its dual takes B(H_in) to B(H_out) via
// A -> sum_i K_i* A K_i with Kraus blocks of shape in_dim x out_dim. The Choi
// matrix of the dual is cached at construction.
class Channel {
public:
  Channel(int in_dim, int out_dim, std::vector<Mat> kraus, double unital_tol = 1e-7)
      : in_dim_(in_dim), out_dim_(out_dim), kraus_(std::move(kraus)) {
    if (in_dim_ < 1 || out_dim_ < 1) throw invalid_channel("dimensions must be positive");
    if (kraus_.empty()) throw invalid_channel("channel needs at least one Kraus operator");
    Mat sum = Mat::Zero(out_dim_, out_dim_);
    for (const auto& k : kraus_) {
      if (k.rows() != in_dim_ || k.cols() != out_dim_) {
        throw invalid_channel("Kraus operator has the wrong shape");
      }
      if (!k.allFinite()) throw invalid_channel("Kraus operator has non-finite entries");
      sum += k.adjoint() * k;
    }
    if (max_abs(sum - identity(out_dim_)) > unital_tol) {
      throw invalid_channel("dual is not unital: ||sum K*K - I|| = " +
                            std::to_string(max_abs(sum - identity(out_dim_))));
    }
    choi_ = Mat::Zero(in_dim_ * out_dim_, in_dim_ * out_dim_);
    for (const auto& k : kraus_) {
      // J[(i,a),(j,b)] += conj(K(i,a)) K(j,b)
      Eigen::VectorXcd w(in_dim_ * out_dim_);
      for (int i = 0; i < in_dim_; ++i) {
        for (int a = 0; a < out_dim_; ++a) w(i * out_dim_ + a) = std::conj(k(i, a));
      }
      choi_ += w * w.adjoint();
    }
    choi_ = hermitian_part(choi_);
  }

  static Channel identity_channel(int n) {
    return Channel(n, n, {identity(n)});
  }

  // Dual acts by A -> U* A U.
  static Channel unitary(const Mat& u, double unital_tol = 1e-9) {
    return Channel(static_cast<int>(u.rows()), static_cast<int>(u.cols()), {u}, unital_tol);
  }

  // Dual acts by A -> tr(A)/in_dim * I.
  static Channel depolarizing(int in_dim, int out_dim) {
    std::vector<Mat> kraus;
    double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
    for (int i = 0; i < in_dim; ++i) {
      for (int j = 0; j < out_dim; ++j) {
        Mat k = Mat::Zero(in_dim, out_dim);
        k(i, j) = scale;
        kraus.push_back(k);
      }
    }
    return Channel(in_dim, out_dim, std::move(kraus));
  }

  // Eigendecomposes a PSD Choi matrix into Kraus operators.
  static Channel from_choi(int in_dim, int out_dim, const Mat& choi,
                           double kraus_cutoff = 1e-12, double unital_tol = 1e-7) {
    if (choi.rows() != in_dim * out_dim || choi.cols() != in_dim * out_dim) {
      throw invalid_channel("Choi matrix has the wrong shape");
    }
    EigenSystem es = hermitian_eig(choi, 1e-7);
    double top = es.values.cwiseAbs().maxCoeff();
    double cut = kraus_cutoff * std::max(top, 1.0);
    std::vector<Mat> kraus;
    for (Eigen::Index m = 0; m < es.values.size(); ++m) {
      if (es.values(m) <= cut) continue;
      double root = std::sqrt(es.values(m));
      Mat k(in_dim, out_dim);
      for (int i = 0; i < in_dim; ++i) {
        for (int a = 0; a < out_dim; ++a) {
          k(i, a) = root * std::conj(es.vectors(i * out_dim + a, m));
        }
      }
      kraus.push_back(k);
    }
    if (kraus.empty()) throw invalid_channel("Choi matrix has no positive spectrum");
    return Channel(in_dim, out_dim, std::move(kraus), unital_tol);
  }

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const std::vector<Mat>& kraus() const { return kraus_; }
  const Mat& choi() const { return choi_; }

  Mat apply_dual(const Mat& a) const {
    if (a.rows() != in_dim_ || a.cols() != in_dim_) {
      throw dim_mismatch("dual argument has the wrong shape");
    }
    Mat out = Mat::Zero(out_dim_, out_dim_);
    for (const auto& k : kraus_) out += k.adjoint() * a * k;
    return out;
  }

private:
  int in_dim_ = 0;
  int out_dim_ = 0;
  std::vector<Mat> kraus_;
  Mat choi_;
};

// Linear dual action read off a Choi matrix (used by the feasibility search
// before Kraus extraction).
inline Mat choi_dual_apply(const Mat& choi, const Mat& a, int in_dim, int out_dim) {
  Mat out = Mat::Zero(out_dim, out_dim);
  for (int i = 0; i < in_dim; ++i) {
    for (int j = 0; j < in_dim; ++j) {
      if (a(i, j) == Complex(0.0, 0.0)) continue;
      out += a(i, j) * choi.block(i * out_dim, j * out_dim, out_dim, out_dim);
    }
  }
  return out;
}

// Pushes a measure through the channel dual, term by term. Positive measures
// stay positive; quantum probability measures stay quantum probability
// measures (the dual is unital).
inline OperatorMeasure apply_dual(const Channel& ch, const OperatorMeasure& nu) {
  if (nu.dim() != ch.in_dim()) throw dim_mismatch("measure dimension does not match channel");
  std::vector<OperatorMeasure::Term> terms;
  for (const auto& t : nu.terms()) {
    terms.push_back({t.measure, ch.apply_dual(t.weight)});
  }
  return OperatorMeasure(nu.space(), ch.out_dim(), std::move(terms));
}

struct CleanVerifyReport {
  bool cleaner = false;
  double max_residual = 0.0;
  std::string locus;  // worst piece/atom
};

// Checks nu2 = dual(ch) o nu1 on every canonical piece and atom (sufficient
// for all generator sets, since the dual is linear).
inline CleanVerifyReport verify_cleaner(const OperatorMeasure& nu2,
                                        const OperatorMeasure& nu1, const Channel& ch,
                                        double tolerance = 1e-7) {
  require_same_space(nu2.space(), nu1.space());
  if (nu1.dim() != ch.in_dim() || nu2.dim() != ch.out_dim()) {
    throw dim_mismatch("channel shape does not match the measures");
  }
  OperatorMeasure pushed = apply_dual(ch, nu1);
  CutSet cuts = merge_cut_sets(cuts_of(nu2), cuts_of(pushed));
  auto p2 = resample_pieces(nu2, cuts);
  auto pp = resample_pieces(pushed, cuts);
  CleanVerifyReport rep;
  for (std::size_t i = 0; i < p2.size(); ++i) {
    double len = p2[i].hi - p2[i].lo;
    double r = operator_norm((p2[i].value - pp[i].value) * len);
    if (r > rep.max_residual) {
      rep.max_residual = r;
      rep.locus = "piece (" + std::to_string(p2[i].lo) + ", " + std::to_string(p2[i].hi) + "]";
    }
  }
  for (const auto& atom : nu2.space().atoms()) {
    double r = operator_norm(nu2.atom_effect(atom.id) - pushed.atom_effect(atom.id));
    if (r > rep.max_residual) {
      rep.max_residual = r;
      rep.locus = "atom '" + atom.id + "'";
    }
  }
  rep.cleaner = rep.max_residual <= tolerance;
  return rep;
}

namespace detail {

// Isometry between Hermitian d x d matrices (Frobenius) and R^{d^2}.
inline Eigen::VectorXd herm_to_vec(const Mat& h) {
  const int d = static_cast<int>(h.rows());
  Eigen::VectorXd v(d * d);
  int k = 0;
  for (int i = 0; i < d; ++i) v(k++) = h(i, i).real();
  const double rt2 = std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      v(k++) = rt2 * h(i, j).real();
      v(k++) = rt2 * h(i, j).imag();
    }
  }
  return v;
}

inline Mat vec_to_herm(const Eigen::VectorXd& v, int d) {
  Mat h = Mat::Zero(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) h(i, i) = v(k++);
  const double rt2 = std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      double re = v(k++) / rt2;
      double im = v(k++) / rt2;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  }
  return h;
}

}  // namespace detail

namespace detail {

// Keeps the top r eigenvalues (clipped at zero), zeroing the rest.
inline Mat rank_clip(const Mat& h, int r) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian_part(h));
  RVec vals = solver.eigenvalues();  // ascending
  const int d = static_cast<int>(vals.size());
  RVec kept = RVec::Zero(d);
  for (int i = 0; i < d; ++i) {
    if (i >= d - r) kept(i) = std::max(vals(i), 0.0);
  }
  return hermitian_part(solver.eigenvectors() * kept.asDiagonal() *
                        solver.eigenvectors().adjoint());
}

// Rescales a Kraus family so the dual becomes exactly unital.
inline std::vector<Mat> polish_unital(const std::vector<Mat>& kraus, int out_dim) {
  Mat s = Mat::Zero(out_dim, out_dim);
  for (const auto& k : kraus) s += k.adjoint() * k;
  Mat fix = pseudo_inverse(psd_sqrt(s, 1e-6, 1e-6), 1e-9);
  std::vector<Mat> out;
  out.reserve(kraus.size());
  for (const auto& k : kraus) out.push_back(k * fix);
  return out;
}

}  // namespace detail

struct ChannelSearch {
  std::optional<Channel> channel;
  double residual = 0.0;  // verify residual on success, best feasibility defect otherwise
  int iterations = 0;
};

// Feasibility search for a channel with nu2 = dual o nu1: alternating
// projections (Dykstra corrections) between the PSD cone and the affine set
// of Choi matrices matching all generators plus unitality. When the plain
// iteration stalls (which happens when every feasible Choi matrix is rank
// deficient and the affine set meets the cone tangentially), a second phase
// alternates with fixed-rank truncations, which restores transversality at
// low-rank solutions. A failure after max_iter is inconclusive, never a
// disproof.
inline ChannelSearch find_channel(const OperatorMeasure& nu1, const OperatorMeasure& nu2,
                                  int max_iter = 5000, double tolerance = 1e-7) {
  require_same_space(nu1.space(), nu2.space());
  const int n1 = nu1.dim();
  const int n2 = nu2.dim();
  const int d = n1 * n2;
  const int dim_h = d * d;

  // Generator pairs (A, C) demanding dual(A) = C.
  std::vector<std::pair<Mat, Mat>> pairs;
  pairs.emplace_back(identity(n1), identity(n2));
  {
    CutSet cuts = merge_cut_sets(cuts_of(nu1), cuts_of(nu2));
    auto p1 = resample_pieces(nu1, cuts);
    auto p2 = resample_pieces(nu2, cuts);
    for (std::size_t i = 0; i < p1.size(); ++i) {
      double len = p1[i].hi - p1[i].lo;
      Mat a = p1[i].value * len;
      Mat c = p2[i].value * len;
      if (max_abs(a) == 0.0 && max_abs(c) == 0.0) continue;
      pairs.emplace_back(a, c);
    }
    for (const auto& atom : nu1.space().atoms()) {
      Mat a = nu1.atom_effect(atom.id);
      Mat c = nu2.atom_effect(atom.id);
      if (max_abs(a) == 0.0 && max_abs(c) == 0.0) continue;
      pairs.emplace_back(a, c);
    }
  }

  const int out_h = n2 * n2;
  Eigen::MatrixXd constraints(static_cast<int>(pairs.size()) * out_h, dim_h);
  Eigen::VectorXd rhs(constraints.rows());
  for (int col = 0; col < dim_h; ++col) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_h);
    e(col) = 1.0;
    Mat basis = detail::vec_to_herm(e, d);
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      constraints.block(static_cast<int>(c) * out_h, col, out_h, 1) =
          detail::herm_to_vec(choi_dual_apply(basis, pairs[c].first, n1, n2));
    }
  }
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    rhs.segment(static_cast<int>(c) * out_h, out_h) = detail::herm_to_vec(pairs[c].second);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver(constraints);

  auto project_affine = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x - solver.solve(constraints * x - rhs);
  };
  auto psd_defect = [&](const Eigen::VectorXd& x) {
    return std::max(0.0, -min_eigenvalue(detail::vec_to_herm(x, d), 1e-6));
  };

  const double inner_tol = std::min(tolerance * 1e-2, 1e-9);
  Eigen::VectorXd x = detail::herm_to_vec(identity(d) / static_cast<double>(n1));
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dim_h);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(dim_h);
  x = project_affine(x);

  ChannelSearch result;
  auto try_extract = [&](const Mat& candidate) -> bool {
    try {
      std::vector<Mat> kraus =
          Channel::from_choi(n1, n2, psd_clip(candidate), 1e-12, 1.0).kraus();
      Channel ch(n1, n2, detail::polish_unital(kraus, n2), 1e-6);
      CleanVerifyReport rep = verify_cleaner(nu2, nu1, ch, tolerance);
      if (rep.cleaner) {
        result.channel = std::move(ch);
        result.residual = rep.max_residual;
        return true;
      }
    } catch (const domain_error&) {
    }
    return false;
  };

  // Phase 1: Dykstra between the cone and the affine set. This finishes fast
  // when the feasible set has interior; low-rank solutions stall and are
  // handed to the rank phase.
  const int phase1_budget = std::min(max_iter, 300);
  double defect = psd_defect(x);
  int it = 0;
  while (it < phase1_budget && defect > inner_tol) {
    ++it;
    Eigen::VectorXd y = detail::herm_to_vec(psd_clip(detail::vec_to_herm(x + p, d)));
    p = x + p - y;
    Eigen::VectorXd z = project_affine(y + q);
    q = y + q - z;
    x = z;
    defect = psd_defect(x);
  }
  result.iterations = it;
  result.residual = defect;
  if (defect <= inner_tol && try_extract(detail::vec_to_herm(x, d))) return result;

  // Phase 2: overrelaxed alternating projections between the affine set and
  // the fixed-rank PSD truncation, for ascending rank. A plateau (defect not
  // decaying) means the rank is wrong and the next one is tried.
  for (int r = 1; r <= std::min(d, 8) && it < max_iter; ++r) {
    Eigen::VectorXd xr = x;
    double dfx = std::numeric_limits<double>::infinity();
    double window_mark = dfx;
    int local = 0;
    while (it < max_iter) {
      ++it;
      ++local;
      Mat jr = detail::rank_clip(detail::vec_to_herm(xr, d), r);
      Eigen::VectorXd tx = project_affine(detail::herm_to_vec(jr));
      xr += 1.7 * (tx - xr);
      Mat jx = detail::vec_to_herm(xr, d);
      dfx = frobenius(jx - detail::rank_clip(jx, r));
      if (dfx <= inner_tol) break;
      if (local % 100 == 0) {
        if (dfx > 0.8 * window_mark) break;  // plateau
        window_mark = dfx;
      }
    }
    result.iterations = it;
    Mat jx = detail::vec_to_herm(xr, d);
    dfx = frobenius(jx - detail::rank_clip(jx, r));
    result.residual = std::min(result.residual, dfx);
    if (dfx <= 100.0 * inner_tol && try_extract(detail::rank_clip(jx, r))) return result;
  }

  // Last attempt from the phase-1 iterate.
  try_extract(detail::vec_to_herm(x, d));
  return result;
}

struct CleanEquivalence {
  ChannelSearch forward;   // witnesses nu2 << nu1
  ChannelSearch backward;  // witnesses nu1 << nu2
  bool equivalent = false;
};

inline CleanEquivalence clean_equivalent(const OperatorMeasure& nu1,
                                         const OperatorMeasure& nu2, int max_iter = 5000,
                                         double tolerance = 1e-7) {
  CleanEquivalence rep;
  rep.forward = find_channel(nu1, nu2, max_iter, tolerance);
  rep.backward = find_channel(nu2, nu1, max_iter, tolerance);
  rep.equivalent = rep.forward.channel.has_value() && rep.backward.channel.has_value();
  return rep;
}

}  // namespace ovmkit
