// Copyright 2026 The qsdc-ghz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qsdc {

/// Argument outside an operation's domain (wrong dimension, bad index, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Register would exceed the configured amplitude limit.
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A state handed to a family measurement is not inside the family's span.
class SpanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Protocol step invoked out of order or on an already consumed position.
class ProtocolStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A construction that must hold by algebra did not (indicates a bug).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace qsdc
