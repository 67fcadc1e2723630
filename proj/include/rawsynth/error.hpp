// Copyright (c) 2026 The rawsynth Authors
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

namespace rawsynth {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameter or argument value (non-positive gain, non-finite matrix, ...).
class ParamError : public Error {
public:
    using Error::Error;
};

/// Image dimension or size mismatch.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed file header or contents.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Filesystem read/write failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient design in a least-squares solve.
class RankError : public Error {
public:
    using Error::Error;
};

/// Optimization produced a non-finite loss.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, int epoch) : Error(msg), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

}  // namespace rawsynth
