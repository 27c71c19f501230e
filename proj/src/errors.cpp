#include "nirenberg/errors.hpp"

namespace nirenberg {

const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::AntipodalSingularity: return "AntipodalSingularity";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::NotMorse: return "NotMorse";
    case ErrorKind::UnknownConstant: return "UnknownConstant";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::Divergent: return "Divergent";
    case ErrorKind::NonpositiveLambda: return "NonpositiveLambda";
    case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NotBlowupCandidate: return "NotBlowupCandidate";
    case ErrorKind::LeftRegime: return "LeftRegime";
    case ErrorKind::IllConditioned: return "IllConditioned";
    }
    return "Unknown";
}

void require_dimension(int n, int lo, int hi)
{
    if (n < lo || n > hi)
        throw Error(ErrorKind::UnsupportedDimension,
                    "n=" + std::to_string(n) + " outside " + std::to_string(lo) + ".." + std::to_string(hi));
}

} // namespace nirenberg
