/*
 * Copyright (c) 2026 The FGMP Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FGMP_ERROR_HPP
#define FGMP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fgmp {

/// Raised for invalid arguments, shape mismatches and malformed input data.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent file content (bad magic, truncated payload, ...).
class FormatError : public Error
{
public:
  using Error::Error;
};

} // namespace fgmp

#endif // FGMP_ERROR_HPP
