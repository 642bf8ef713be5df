// Copyright 2026 The dbmmd Authors
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

#include <stdexcept>
#include <string>

namespace dbmmd {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument value (k > n, nonpositive bandwidth, bad config key).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed (matrix not positive definite, singular system).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on an object that is not in the required state.
class StateError : public Error {
 public:
  using Error::Error;
};

/// The requested model combination does not exist (MEDA+DB).
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// Degenerate data for the median bandwidth heuristic.
class BandwidthError : public Error {
 public:
  using Error::Error;
};

/// Source domain lacks samples of some class.
class EmptyClassError : public Error {
 public:
  using Error::Error;
};

/// A stage of the adaptation loop failed; the message carries the model and
/// iteration number.
class IterationError : public Error {
 public:
  using Error::Error;
};

}  // namespace dbmmd
