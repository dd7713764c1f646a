#pragma once

#include <stdexcept>
#include <string>

namespace skyshare {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument, out-of-range value, dimension or width mismatch.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Correlated randomness ran out before the online phase finished.
class RandomnessExhausted : public Error {
 public:
  using Error::Error;
};

// The two parties disagree on what the next protocol step is.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Transport failure: peer gone, socket error, malformed frame.
class ChannelError : public Error {
 public:
  using Error::Error;
};

// Input file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace skyshare
