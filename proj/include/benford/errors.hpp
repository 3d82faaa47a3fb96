#pragma once

#include <stdexcept>
#include <string>

namespace benford {

/// Input outside an operation's mathematical domain (bad parameters, non-finite values).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configured size budget (big-integer bits, sample counts, sequence length) was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or insufficient input data (ingestion).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace benford
