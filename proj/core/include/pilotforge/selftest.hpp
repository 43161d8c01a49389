// SPDX-License-Identifier: Apache-2.0
//
// pilotforge: joint pilot and analog combiner design for multi-cell massive MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pilotforge::selftest {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Small-instance oracle and invariant checks. Deterministic.
std::vector<CheckResult> run_all();

/// Prints one PASS/FAIL line per check and a summary line. Returns the
/// process exit status: 0 when every check passed, 1 otherwise.
int summarize(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace pilotforge::selftest
