#pragma once

#include <stdexcept>
#include <string>

namespace nirenberg {

enum class ErrorKind {
    InvalidInput,
    UnsupportedDimension,
    AntipodalSingularity,
    CoincidentPoints,
    NotMorse,
    UnknownConstant,
    NonConvergent,
    Divergent,
    NonpositiveLambda,
    ResolutionTooCoarse,
    Overflow,
    DimensionMismatch,
    NoSolution,
    NonConvergence,
    NotBlowupCandidate,
    LeftRegime,
    IllConditioned,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& what)
        : std::runtime_error(std::string(kind_name(k)) + ": " + what), kind_(k) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

void require_dimension(int n, int lo, int hi);

} // namespace nirenberg
