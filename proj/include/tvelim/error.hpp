// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tvelim {

enum class ErrorCode {
  SizeMismatch,
  KindMismatch,
  UnknownDim,
  PlusOnPlateDim,
  ProductOnVariableDim,
  UnknownPlate,
  Validation,
  Intractable,
  DivisionUnsupported,
  ZeroPartition,
  TooLarge,
  Syntax,
  DuplicateSymbolInOperand,
  OutputSymbolNotInInputs,
  InconsistentKind,
  PlateInOutput,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure in an einsum expression; position is a 0-based character offset.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error(ErrorCode::Syntax,
              message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace tvelim
