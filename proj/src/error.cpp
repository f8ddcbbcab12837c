//
// MolForge - Copyright 2026 The MolForge Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/error.hpp"

namespace molforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::kUnknownElement: return "UnknownElement";
  case ErrorCode::kEmptyGraph: return "EmptyGraph";
  case ErrorCode::kIncompleteMolecule: return "IncompleteMolecule";
  case ErrorCode::kNoOpenSites: return "NoOpenSites";
  case ErrorCode::kGenerationExhausted: return "GenerationExhausted";
  case ErrorCode::kInvalidLead: return "InvalidLead";
  case ErrorCode::kPopulationTooSmall: return "PopulationTooSmall";
  case ErrorCode::kStrategyParamTooLarge: return "StrategyParamTooLarge";
  case ErrorCode::kUnknownChromosomeId: return "UnknownChromosomeId";
  case ErrorCode::kScoreOffScale: return "ScoreOffScale";
  case ErrorCode::kDuplicateId: return "DuplicateId";
  case ErrorCode::kMalformedQuery: return "MalformedQuery";
  case ErrorCode::kIOFailure: return "IOFailure";
  case ErrorCode::kConfigError: return "ConfigError";
  case ErrorCode::kConflictingRun: return "ConflictingRun";
  case ErrorCode::kBindFailure: return "BindFailure";
  case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
  case ParseErrorKind::kUnexpectedChar: return "UnexpectedChar";
  case ParseErrorKind::kUnknownElement: return "UnknownElement";
  case ParseErrorKind::kUnmatchedRing: return "UnmatchedRing";
  case ParseErrorKind::kRingBondMismatch: return "RingBondMismatch";
  case ParseErrorKind::kOversaturated: return "Oversaturated";
  case ParseErrorKind::kEmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t position,
                       const std::string &message)
    : std::runtime_error(std::string(to_string(kind)) + " at " +
                         std::to_string(position) + ": " + message),
      kind_(kind), position_(position) {}

} // namespace molforge
