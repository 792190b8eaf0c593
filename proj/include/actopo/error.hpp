#pragma once

#include <stdexcept>
#include <string>

namespace actopo {

// Base for every error raised on bad data or parameters. The CLI maps these
// to exit status 2; usage errors are handled separately.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IngestError : public Error {
  public:
    using Error::Error;
};

class ParameterError : public Error {
  public:
    using Error::Error;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

class ConditioningError : public Error {
  public:
    using Error::Error;
};

class ConstructionError : public Error {
  public:
    using Error::Error;
};

class ComparisonError : public Error {
  public:
    using Error::Error;
};

class RenderError : public Error {
  public:
    using Error::Error;
};

// Builds "<file>: row R, column 'C': message" style locations for ingestion errors.
std::string ingest_location(const std::string& path, std::size_t row, const std::string& column);

}  // namespace actopo
