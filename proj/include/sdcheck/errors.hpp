#pragma once

#include <stdexcept>
#include <string>

namespace sdcheck {

enum class Errc {
  kInvalidMatrix,
  kInvalidDimension,
  kInfeasibleAffine,
  kOracleUnavailable,
  kEmptyFace,
  kInvalidSample,
  kMaxIterations,
  kLineSearchStall,
  kInsufficientTrace,
  kUndecided,
  kNoExposingVectorFound,
  kFRDiverged,
  kSdUndecided,
  kInvalidSeries,
  kInvalidSpec,
  kGenFailed,
  kOutOfDomain,
  kIo,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

}  // namespace sdcheck
