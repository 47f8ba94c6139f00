#include "elq/errors.hpp"

namespace elq {

const char* err_name(Err code) {
  switch (code) {
    case Err::InvalidArgument:    return "InvalidArgument";
    case Err::InvalidFrame:       return "InvalidFrame";
    case Err::RoiOutOfBounds:     return "RoiOutOfBounds";
    case Err::DegenerateColorbar: return "DegenerateColorbar";
    case Err::NoSkinLineFound:    return "NoSkinLineFound";
    case Err::NoStandoffFound:    return "NoStandoffFound";
    case Err::EmptyField:         return "EmptyField";
    case Err::NoAggregableData:   return "NoAggregableData";
    case Err::InsufficientData:   return "InsufficientData";
    case Err::ZeroVariance:       return "ZeroVariance";
    case Err::DegenerateScene:    return "DegenerateScene";
    case Err::ClippingRejected:   return "ClippingRejected";
    case Err::EmptyManifest:      return "EmptyManifest";
    case Err::AllFramesFailed:    return "AllFramesFailed";
    case Err::SegmentationFailed: return "SegmentationFailed";
    case Err::ConfigError:        return "ConfigError";
    case Err::ManifestError:      return "ManifestError";
    case Err::IoError:            return "IoError";
  }
  return "UnknownError";
}

Error::Error(Err code, const std::string& message)
    : std::runtime_error(std::string(err_name(code)) + ": " + message), code_(code) {}

void fail(Err code, const std::string& message) { throw Error(code, message); }

}  // namespace elq
