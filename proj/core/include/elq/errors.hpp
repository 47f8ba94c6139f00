#pragma once

#include <stdexcept>
#include <string>

namespace elq {

// Every failure the library raises carries one of these codes.  The CLI and
// the cohort runner key off the code (per-frame recoverable vs fatal), the
// message is for humans.
enum class Err {
  InvalidArgument,
  InvalidFrame,
  RoiOutOfBounds,
  DegenerateColorbar,
  NoSkinLineFound,
  NoStandoffFound,
  EmptyField,
  NoAggregableData,
  InsufficientData,
  ZeroVariance,
  DegenerateScene,
  ClippingRejected,
  EmptyManifest,
  AllFramesFailed,
  SegmentationFailed,
  ConfigError,
  ManifestError,
  IoError,
};

const char* err_name(Err code);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& message);
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] void fail(Err code, const std::string& message);

}  // namespace elq
