// Copyright 2026 The samuel-oco Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace samuel {

// Every failure raised by the library derives from Error so callers can
// catch the whole family at a CLI boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SAMUEL_DEFINE_ERROR(Name)             \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

// linear algebra
SAMUEL_DEFINE_ERROR(InvalidMatrix);
SAMUEL_DEFINE_ERROR(NotPSD);
SAMUEL_DEFINE_ERROR(ProjectionFailure);

// problem definition
SAMUEL_DEFINE_ERROR(InvalidParams);
SAMUEL_DEFINE_ERROR(BadInterval);
SAMUEL_DEFINE_ERROR(BadHorizon);
SAMUEL_DEFINE_ERROR(BadTime);

// runs
SAMUEL_DEFINE_ERROR(AssumptionViolation);
SAMUEL_DEFINE_ERROR(CorruptedState);
SAMUEL_DEFINE_ERROR(NonFiniteGradient);
SAMUEL_DEFINE_ERROR(TraceError);
SAMUEL_DEFINE_ERROR(BadScenario);

// harness
SAMUEL_DEFINE_ERROR(ConfigError);
SAMUEL_DEFINE_ERROR(CompareError);

#undef SAMUEL_DEFINE_ERROR

}  // namespace samuel
