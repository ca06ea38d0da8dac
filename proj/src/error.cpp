#include "fwgames/error.hpp"

namespace fwg {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidAction: return "InvalidAction";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::EnumerationTooLarge: return "EnumerationTooLarge";
    case Errc::NotCoverable: return "NotCoverable";
    case Errc::DecompositionUnstable: return "DecompositionUnstable";
    case Errc::InvalidGradient: return "InvalidGradient";
    case Errc::DivisionByZeroProb: return "DivisionByZeroProb";
    case Errc::DegenerateDistribution: return "DegenerateDistribution";
    case Errc::EstimatorInconsistent: return "EstimatorInconsistent";
    case Errc::NumericalDivergence: return "NumericalDivergence";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace fwg
