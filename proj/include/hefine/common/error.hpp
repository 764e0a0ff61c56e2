/*
 * Copyright 2026 The hefine Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace hefine {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes, domains or ranges that violate an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Arithmetic between values living in different rings, levels or domains.
class DomainMismatch : public Error {
 public:
  using Error::Error;
};

/// A ciphertext has too few primes left for the requested operation.
class LevelExhausted : public Error {
 public:
  using Error::Error;
};

/// Two ciphertexts (or a ciphertext and a plaintext) carry different scales.
class ScaleMismatch : public Error {
 public:
  using Error::Error;
};

/// Objects produced under different parameter sets were combined.
class ParamsMismatch : public Error {
 public:
  using Error::Error;
};

/// A key required by the operation was not provisioned.
class MissingKey : public Error {
 public:
  using Error::Error;
};

/// Malformed bytes while decoding one of the binary formats.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Files that cannot be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Violations of the hospital/cloud wire protocol.
class ProtocolError : public Error {
 public:
  ProtocolError(int code, const std::string& what)
      : Error(what), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

}  // namespace hefine
