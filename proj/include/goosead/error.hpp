#pragma once

#include <stdexcept>
#include <string>

namespace goosead {

// Failure categories. The CLI maps these onto its exit-code contract.
enum class ErrorKind {
  kConfig,          // bad arguments, malformed scenario/config files
  kIo,              // cannot open/read/write a file
  kFormat,          // BadMagic, BadLinkType, corrupt CSV/JSON content
  kSchema,          // column/dimension mismatch between artifacts
  kPurity,          // attack-labelled rows offered for training
  kUnsorted,        // frames out of timestamp order
  kFieldOverflow,   // GooseFrame field outside encodable range
  kNumeric,         // Diverged training, TooFewExceedances, EmptyInput
  kOverlap,         // overlapping attack intervals of one kind
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace goosead
