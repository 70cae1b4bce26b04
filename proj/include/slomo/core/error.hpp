// Copyright 2026 The Slomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace slomo {

// Error classes map one-to-one onto CLI exit codes.
enum class ErrorCategory : int {
  kContract = 3,
  kIo = 4,
  kInitialization = 5,
  kEstimation = 6,
  kAlignment = 7,
  kJob = 8,
  kDivergence = 9,
  kConfig = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

#define SLOMO_DEFINE_ERROR(Name, Category)                                \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(Category, what) {}     \
  };

SLOMO_DEFINE_ERROR(ContractViolation, ErrorCategory::kContract)
SLOMO_DEFINE_ERROR(IoError, ErrorCategory::kIo)
SLOMO_DEFINE_ERROR(InitializationError, ErrorCategory::kInitialization)
SLOMO_DEFINE_ERROR(EstimationError, ErrorCategory::kEstimation)
SLOMO_DEFINE_ERROR(AlignmentError, ErrorCategory::kAlignment)
SLOMO_DEFINE_ERROR(JobError, ErrorCategory::kJob)
SLOMO_DEFINE_ERROR(DivergenceError, ErrorCategory::kDivergence)
SLOMO_DEFINE_ERROR(ConfigError, ErrorCategory::kConfig)

#undef SLOMO_DEFINE_ERROR

}  // namespace slomo
