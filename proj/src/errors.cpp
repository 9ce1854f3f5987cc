#include "sdcheck/errors.hpp"

namespace sdcheck {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidMatrix: return "InvalidMatrix";
    case Errc::kInvalidDimension: return "InvalidDimension";
    case Errc::kInfeasibleAffine: return "InfeasibleAffine";
    case Errc::kOracleUnavailable: return "OracleUnavailable";
    case Errc::kEmptyFace: return "EmptyFace";
    case Errc::kInvalidSample: return "InvalidSample";
    case Errc::kMaxIterations: return "MaxIterations";
    case Errc::kLineSearchStall: return "LineSearchStall";
    case Errc::kInsufficientTrace: return "InsufficientTrace";
    case Errc::kUndecided: return "Undecided";
    case Errc::kNoExposingVectorFound: return "NoExposingVectorFound";
    case Errc::kFRDiverged: return "FRDiverged";
    case Errc::kSdUndecided: return "SdUndecided";
    case Errc::kInvalidSeries: return "InvalidSeries";
    case Errc::kInvalidSpec: return "InvalidSpec";
    case Errc::kGenFailed: return "GenFailed";
    case Errc::kOutOfDomain: return "OutOfDomain";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace sdcheck
