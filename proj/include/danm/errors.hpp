#ifndef DANM_ERRORS_HPP
#define DANM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace danm {

// Errors caused by bad input data (files, samples, tables). The CLI maps
// these to exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CsvError : DataError {
    CsvError(const std::string& msg, std::size_t row, std::size_t col)
        : DataError(msg + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")"),
          row(row),
          col(col) {}
    std::size_t row;
    std::size_t col;
};

struct FetchError : DataError {
    explicit FetchError(const std::string& msg) : DataError(msg) {}
};

// Thrown when an exhaustive search would exceed its configured cap; callers
// must widen the cap explicitly rather than get a silently truncated answer.
struct EnumerationTooLarge : std::runtime_error {
    explicit EnumerationTooLarge(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace danm

#endif
