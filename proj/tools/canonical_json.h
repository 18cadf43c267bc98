// Copyright 2026 The PATE Accounting Authors
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

#ifndef PATE_TOOLS_CANONICAL_JSON_H_
#define PATE_TOOLS_CANONICAL_JSON_H_

#include <string>

#include "json.hpp"

namespace pate::tools {

// Serializes with object keys in byte order, two-space indentation and every
// floating-point number printed with 17 significant digits. Non-finite
// numbers become null.
std::string CanonicalJson(const nlohmann::json& value);

}  // namespace pate::tools

#endif  // PATE_TOOLS_CANONICAL_JSON_H_
