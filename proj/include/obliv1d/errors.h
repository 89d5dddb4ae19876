// Copyright 2026 The Obliv1D Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace obliv1d {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed something outside an operation's contract.
class UsageError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class DescriptorMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed frame, handshake disagreement, unexpected message type.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Peer disconnected, connect timeout, socket failure.
class TransportError : public Error {
 public:
  using Error::Error;
};

// An active-security check failed. Outputs must be withheld.
class AbortError : public Error {
 public:
  using Error::Error;
};

// Preprocessed material ran out or was requested twice.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Model/input/test-vector file rejected by the loader.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace obliv1d
