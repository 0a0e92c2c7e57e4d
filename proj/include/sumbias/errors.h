// Copyright 2026 The sumbias Authors.
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

#ifndef SUMBIAS_ERRORS_H_
#define SUMBIAS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace sumbias {

// Base class for every error raised by the toolkit. The CLI maps
// DataError subclasses to exit code 2 and everything else to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (wrong column count, bad number, bad JSON).
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, int line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed input whose annotations violate a structural invariant.
class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

class LoadError : public DataError {
 public:
  using DataError::DataError;
};

class JoinError : public DataError {
 public:
  using DataError::DataError;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed; carries the stage name and, when known, the
// record being processed.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string record, const std::string& what)
      : Error(stage + (record.empty() ? "" : " [" + record + "]") + ": " + what),
        stage_(std::move(stage)),
        record_(std::move(record)) {}
  const std::string& stage() const { return stage_; }
  const std::string& record() const { return record_; }

 private:
  std::string stage_;
  std::string record_;
};

}  // namespace sumbias

#endif  // SUMBIAS_ERRORS_H_
