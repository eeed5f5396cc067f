#include "kirchdelay/errors.hpp"

#include <sstream>

namespace kirchdelay {

namespace {
std::string format_evaluation(const std::string& function, double point) {
  std::ostringstream os;
  os << "non-finite value of " << function << " at " << point;
  return os.str();
}

std::string format_coverage(double requested, double from, double to) {
  std::ostringstream os;
  os.precision(17);
  os << "history lookup at t = " << requested << " outside retained span [" << from << ", "
     << to << "]";
  return os.str();
}
}  // namespace

EvaluationError::EvaluationError(const std::string& function, double point)
    : Error(format_evaluation(function, point)), function_(function), point_(point) {}

RootFindingError::RootFindingError(int index, const std::string& what)
    : Error("characteristic root " + std::to_string(index) + ": " + what), index_(index) {}

CoverageError::CoverageError(double requested, double covered_from, double covered_to)
    : Error(format_coverage(requested, covered_from, covered_to)), requested_(requested) {}

}  // namespace kirchdelay
