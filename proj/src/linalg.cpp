#include "lgkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lgkit {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CaptureRadiusExceeded: return "CaptureRadiusExceeded";
    case ErrorCode::ChartEscape: return "ChartEscape";
    case ErrorCode::StepCountInvalid: return "StepCountInvalid";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::RankDeficientSubmersion: return "RankDeficientSubmersion";
    case ErrorCode::NotComposable: return "NotComposable";
    case ErrorCode::SamplingFailure: return "SamplingFailure";
    case ErrorCode::NotSaturated: return "NotSaturated";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnsupportedLevel: return "UnsupportedLevel";
    case ErrorCode::NotCommonSource: return "NotCommonSource";
    case ErrorCode::NotRiemannianSubmersion: return "NotRiemannianSubmersion";
    case ErrorCode::QuadratureInvalid: return "QuadratureInvalid";
    case ErrorCode::NotCompactGroup: return "NotCompactGroup";
    case ErrorCode::PushforwardInconsistent: return "PushforwardInconsistent";
    case ErrorCode::FaceNotSubmersive: return "FaceNotSubmersive";
    case ErrorCode::LiftFailure: return "LiftFailure";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::NotSProper: return "NotSProper";
    case ErrorCode::NotLeafwise: return "NotLeafwise";
    case ErrorCode::ConfigParseError: return "ConfigParseError";
    case ErrorCode::UnknownBuilder: return "UnknownBuilder";
  }
  return "Unknown";
}

namespace linalg {

namespace {

struct Svd {
  Vec sigma;
  Mat u;
  Mat v;
};

Svd full_svd(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

int rank_of(const Vec& sigma, double rel_tol) {
  if (sigma.size() == 0) return 0;
  const double cutoff = rel_tol * std::max(1.0, sigma(0));
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) ++r;
  return r;
}

}  // namespace

int numerical_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  return rank_of(svd.singularValues(), rel_tol);
}

Mat null_space(const Mat& a, double rel_tol) {
  const auto n = a.cols();
  if (n == 0) return Mat(0, 0);
  if (a.rows() == 0) return Mat::Identity(n, n);
  auto svd = full_svd(a);
  const int r = rank_of(svd.sigma, rel_tol);
  return svd.v.rightCols(n - r);
}

Mat range_basis(const Mat& a, double rel_tol) {
  if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
  auto svd = full_svd(a);
  const int r = rank_of(svd.sigma, rel_tol);
  return svd.u.leftCols(r);
}

Mat orthonormal_complement(const Mat& b, double rel_tol) {
  const auto n = b.rows();
  if (b.cols() == 0) return Mat::Identity(n, n);
  auto svd = full_svd(b);
  const int r = rank_of(svd.sigma, rel_tol);
  return svd.u.rightCols(n - r);
}

Mat pinv(const Mat& a) {
  if (a.size() == 0) return Mat::Zero(a.cols(), a.rows());
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
  return cod.pseudoInverse();
}

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

Mat inv_sqrt_spd(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(s));
  Vec d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = 1.0 / std::sqrt(d(i));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const Mat& s) {
  if (s.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(s), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double form_defect(const Mat& a, const Mat& b) {
  if (a.rows() == 0) return 0.0;
  const Mat w = inv_sqrt_spd(b);
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(w * a * w), Eigen::EigenvaluesOnly);
  return (es.eigenvalues().array() - 1.0).abs().maxCoeff();
}

double isometry_defect(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  Vec sigma = svd.singularValues();
  double worst = (sigma.array() - 1.0).abs().maxCoeff();
  // A non-square map cannot be an isometry; missing directions count as sigma = 0.
  if (m.rows() != m.cols()) worst = std::max(worst, 1.0);
  return worst;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace linalg
}  // namespace lgkit
