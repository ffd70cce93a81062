// Copyright 2026 The SeaaS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seaas {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SEAAS_DECLARE_ERROR(Name, Base) \
  class Name : public Base {            \
   public:                              \
    using Base::Base;                   \
  }

// resource_model
SEAAS_DECLARE_ERROR(UnknownResource, Error);
SEAAS_DECLARE_ERROR(InventoryMismatch, Error);
SEAAS_DECLARE_ERROR(MalformedEvent, Error);

// Policy documents. Every policy error carries the 1-based line and column it
// was detected at (0 when the location could not be recovered).
class PolicyError : public Error {
 public:
  PolicyError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};
SEAAS_DECLARE_ERROR(ParseError, PolicyError);
SEAAS_DECLARE_ERROR(DuplicateRule, PolicyError);
SEAAS_DECLARE_ERROR(InvalidRule, PolicyError);

// offload_protocol
SEAAS_DECLARE_ERROR(ProtocolError, Error);
SEAAS_DECLARE_ERROR(FrameTooLarge, ProtocolError);
SEAAS_DECLARE_ERROR(FramingError, ProtocolError);
SEAAS_DECLARE_ERROR(MalformedMessage, ProtocolError);

// device_agent
SEAAS_DECLARE_ERROR(ScenarioError, Error);
SEAAS_DECLARE_ERROR(LedgerError, Error);
SEAAS_DECLARE_ERROR(TransportError, Error);

// cloud_service
SEAAS_DECLARE_ERROR(StorageError, Error);

// evaluation_harness
SEAAS_DECLARE_ERROR(MetricError, Error);
SEAAS_DECLARE_ERROR(ComparisonError, Error);
SEAAS_DECLARE_ERROR(ExportError, Error);
SEAAS_DECLARE_ERROR(TrialAborted, Error);
SEAAS_DECLARE_ERROR(TrialInvalid, Error);

#undef SEAAS_DECLARE_ERROR

}  // namespace seaas
