//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_ERROR_HPP_
#define MOLFORGE_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace molforge {

enum class ErrorCode {
  kUnknownElement,
  kEmptyGraph,
  kIncompleteMolecule,
  kNoOpenSites,
  kGenerationExhausted,
  kInvalidLead,
  kPopulationTooSmall,
  kStrategyParamTooLarge,
  kUnknownChromosomeId,
  kScoreOffScale,
  kDuplicateId,
  kMalformedQuery,
  kIOFailure,
  kConfigError,
  kConflictingRun,
  kBindFailure,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code; callers
// that need to branch (CLI exit codes, HTTP status) switch on code().
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

enum class ParseErrorKind {
  kUnexpectedChar,
  kUnknownElement,
  kUnmatchedRing,
  kRingBondMismatch,
  kOversaturated,
  kEmptyInput,
};

std::string_view to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
public:
  ParseError(ParseErrorKind kind, std::size_t position,
             const std::string &message);

  ParseErrorKind kind() const noexcept { return kind_; }
  // Byte offset into the input; equals the input length for EOF errors.
  std::size_t position() const noexcept { return position_; }

private:
  ParseErrorKind kind_;
  std::size_t position_;
};

} // namespace molforge

#endif // MOLFORGE_ERROR_HPP_
