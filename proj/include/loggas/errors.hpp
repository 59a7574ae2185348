#pragma once

#include <stdexcept>
#include <string>

namespace loggas {

struct NonConfining : std::runtime_error {
  explicit NonConfining(const std::string& what) : std::runtime_error(what) {}
};
struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};
struct MultiCutDetected : std::runtime_error {
  explicit MultiCutDetected(const std::string& what) : std::runtime_error(what) {}
};
struct NotAProbability : std::runtime_error {
  explicit NotAProbability(const std::string& what) : std::runtime_error(what) {}
};
struct CoincidentPoints : std::runtime_error {
  explicit CoincidentPoints(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidBeta : std::runtime_error {
  explicit InvalidBeta(const std::string& what) : std::runtime_error(what) {}
};
struct EigensolverFailure : std::runtime_error {
  explicit EigensolverFailure(const std::string& what) : std::runtime_error(what) {}
};
struct NotBurnedIn : std::runtime_error {
  explicit NotBurnedIn(const std::string& what) : std::runtime_error(what) {}
};
struct MassMismatch : std::runtime_error {
  explicit MassMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct SingularEvaluation : std::runtime_error {
  explicit SingularEvaluation(const std::string& what) : std::runtime_error(what) {}
};
struct TruncationTooLarge : std::runtime_error {
  explicit TruncationTooLarge(const std::string& what) : std::runtime_error(what) {}
};
struct WindowTooThin : std::runtime_error {
  explicit WindowTooThin(const std::string& what) : std::runtime_error(what) {}
};
struct ResidualTooLarge : std::runtime_error {
  explicit ResidualTooLarge(const std::string& what) : std::runtime_error(what) {}
};
struct UnsupportedMeasure : std::runtime_error {
  explicit UnsupportedMeasure(const std::string& what) : std::runtime_error(what) {}
};
struct TooLargeT : std::runtime_error {
  explicit TooLargeT(const std::string& what) : std::runtime_error(what) {}
};
struct InsufficientRange : std::runtime_error {
  explicit InsufficientRange(const std::string& what) : std::runtime_error(what) {}
};
struct NonDecayingSpectrum : std::runtime_error {
  explicit NonDecayingSpectrum(const std::string& what) : std::runtime_error(what) {}
};
struct WindowOutsideBulk : std::runtime_error {
  explicit WindowOutsideBulk(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidArgument : std::invalid_argument {
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace loggas
