#ifndef EFFIARA_ERRORS_H_
#define EFFIARA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace effiara {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data or parameters violate a documented constraint. The CLI maps this
// (and every other Error) to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A CSV/JSON row could not be ingested. `row()` is the 1-based record number
// in the file, counting the header as row 1.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : ValidationError("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

}  // namespace effiara

#endif  // EFFIARA_ERRORS_H_
