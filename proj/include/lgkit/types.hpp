#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lgkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Global tolerances. Membership is checked against kGeometryTol, sampled
/// verifications default to kVerifyTol, and anything that goes through a
/// finite-difference differential is compared at kFdTol.
inline constexpr double kGeometryTol = 1e-9;
inline constexpr double kVerifyTol = 1e-6;
inline constexpr double kFdTol = 1e-4;
inline constexpr double kFdStep = 1e-5;
inline constexpr double kComposeTol = 1e-9;
inline constexpr double kDefaultCaptureRadius = 0.5;
inline constexpr int kDefaultBudget = 500;

enum class ErrorCode {
  CaptureRadiusExceeded,
  ChartEscape,
  StepCountInvalid,
  RankDeficient,
  InvalidParams,
  RankDeficientSubmersion,
  NotComposable,
  SamplingFailure,
  NotSaturated,
  IndexOutOfRange,
  UnsupportedLevel,
  NotCommonSource,
  NotRiemannianSubmersion,
  QuadratureInvalid,
  NotCompactGroup,
  PushforwardInconsistent,
  FaceNotSubmersive,
  LiftFailure,
  RadiusTooLarge,
  NotSProper,
  NotLeafwise,
  ConfigParseError,
  UnknownBuilder,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lgkit
