// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The dimfac Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dimfac {

enum class Errc {
  invalid_argument,
  io,
  config,
  syntax,
  unknown_variable,
  domain,
  degenerate_shape,
  unsupported_shape,
  infeasible,
  unsuitable,
  size_limit,
  construction_failure,
  monotonicity,
  negativity,
  mismatch,
};

const char* errc_name(Errc code);

// Every failure raised by the library carries one of the codes above so the C
// layer can map it to a status without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Parse failures report the byte offset into the source text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& what)
      : Error(Errc::syntax, what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace dimfac
