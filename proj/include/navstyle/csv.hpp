#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace navstyle::csv {

// Line-oriented reader for comma-separated files. Quoted fields may contain
// commas and doubled quotes but not line breaks. A UTF-8 BOM and trailing CR
// are stripped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-empty record, or nullopt at end of input. Throws RowError on an
  // unterminated quote.
  std::optional<std::vector<std::string>> next();

  // Line number of the record last returned by next() (header is line 1).
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::vector<std::string> split_line(std::string_view line, std::size_t line_number);

// Quotes a field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);

}  // namespace navstyle::csv
