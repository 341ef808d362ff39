// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aht {

/// Base of every exception thrown by the core library. The C API maps the
/// concrete subclasses onto status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation
/// (observation outside the support, zero normalizer, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition of a stateful API.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Quadrature or summation could not reach the requested accuracy.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected during validation. Each issue carries the dotted
/// field path it refers to.
class ConfigError : public Error {
 public:
  struct Issue {
    std::string path;
    std::string message;
  };

  explicit ConfigError(std::vector<Issue> issues);
  ConfigError(std::string path, std::string message);

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  std::vector<Issue> issues_;
};

}  // namespace aht
