#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace navstyle {

// Root of every error thrown by the toolkit. The CLI maps these to exit
// code 1; anything else escaping to main() is an internal error (exit 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NAVSTYLE_DEFINE_ERROR(Name)       \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

// course_model
NAVSTYLE_DEFINE_ERROR(ParseError);
NAVSTYLE_DEFINE_ERROR(ValidationError);
NAVSTYLE_DEFINE_ERROR(UnknownWeek);
NAVSTYLE_DEFINE_ERROR(UnknownStep);
NAVSTYLE_DEFINE_ERROR(NoMainSteps);

// ingest
NAVSTYLE_DEFINE_ERROR(SchemaError);

// classify
NAVSTYLE_DEFINE_ERROR(InvalidKind);

// stats
NAVSTYLE_DEFINE_ERROR(EmptySample);
NAVSTYLE_DEFINE_ERROR(DegenerateSample);
NAVSTYLE_DEFINE_ERROR(TooSmall);
NAVSTYLE_DEFINE_ERROR(TooFewGroups);
NAVSTYLE_DEFINE_ERROR(EmptyGroup);
NAVSTYLE_DEFINE_ERROR(TooLarge);
NAVSTYLE_DEFINE_ERROR(TiesPresent);

// temporal
NAVSTYLE_DEFINE_ERROR(EmptyTrace);

// simgen
NAVSTYLE_DEFINE_ERROR(ConfigError);
NAVSTYLE_DEFINE_ERROR(Unconstructible);

#undef NAVSTYLE_DEFINE_ERROR

// A malformed data row. Carries the 1-based line number within the file
// (the header is line 1).
class RowError : public Error {
 public:
  RowError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

}  // namespace navstyle
