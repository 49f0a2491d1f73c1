// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/error.hpp"

namespace tvelim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::UnknownDim: return "UnknownDim";
    case ErrorCode::PlusOnPlateDim: return "PlusOnPlateDim";
    case ErrorCode::ProductOnVariableDim: return "ProductOnVariableDim";
    case ErrorCode::UnknownPlate: return "UnknownPlate";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::Intractable: return "Intractable";
    case ErrorCode::DivisionUnsupported: return "DivisionUnsupported";
    case ErrorCode::ZeroPartition: return "ZeroPartition";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::DuplicateSymbolInOperand: return "DuplicateSymbolInOperand";
    case ErrorCode::OutputSymbolNotInInputs: return "OutputSymbolNotInInputs";
    case ErrorCode::InconsistentKind: return "InconsistentKind";
    case ErrorCode::PlateInOutput: return "PlateInOutput";
    case ErrorCode::Io: return "Io";
  }
  return "Error";
}

}  // namespace tvelim
