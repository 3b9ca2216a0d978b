// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Caller-supplied scalar parameter out of range (k, T, temperature, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Data violates a domain invariant (non-finite entries, wrong library mode, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UndefinedSimilarityError : public Error {
 public:
  using Error::Error;
};

// Two-step merge was handed experts of different ranks.
class RankMismatchError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, std::vector<double> loss_trace)
      : Error(what), loss_trace_(std::move(loss_trace)) {}

  const std::vector<double>& loss_trace() const noexcept { return loss_trace_; }

 private:
  std::vector<double> loss_trace_;
};

// Input could not be read or parsed. Every subclass maps to CLI exit code 2.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public ParseError {
 public:
  using ParseError::ParseError;
};

class MagicError : public ParseError {
 public:
  using ParseError::ParseError;
};

class VersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

class TruncatedError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Header JSON is malformed or contradicts itself or the payload.
class MetadataError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace sr
