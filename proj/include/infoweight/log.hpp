//
// Copyright 2026 The infoweight Authors
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
//

#ifndef INFOWEIGHT_LOG_HPP_
#define INFOWEIGHT_LOG_HPP_

#include <string>

namespace infoweight {

// Warnings go to stderr unless silenced.
void warn(const std::string& msg);
void set_warnings_enabled(bool on);

}  // namespace infoweight

#endif  // INFOWEIGHT_LOG_HPP_
