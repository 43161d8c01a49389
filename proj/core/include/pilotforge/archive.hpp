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

// Plain-text matrix archive.
//
//   # pilotforge-matrix-archive 1
//   attr <key> <value>
//   matrix <name> <rows> <cols>
//   <re> <im> <re> <im> ...      one line per row, row-major
//
// Blank lines and lines starting with '#' (other than the first) are ignored.
#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pilotforge/channel.hpp"
#include "pilotforge/estimator.hpp"
#include "pilotforge/matlin.hpp"

namespace pilotforge::archive {

using matlin::CMatrix;

inline constexpr const char* kMagic = "# pilotforge-matrix-archive 1";

struct Archive {
    std::map<std::string, std::string> attrs;
    std::vector<std::pair<std::string, CMatrix>> matrices;  // insertion order is kept

    void put(const std::string& name, const CMatrix& m);
    bool has(const std::string& name) const;
    const CMatrix& get(const std::string& name) const;
    const std::string& attr(const std::string& key) const;
    int attr_int(const std::string& key) const;
};

void write(const Archive& ar, std::ostream& os);
Archive read(std::istream& is);

void save(const Archive& ar, const std::string& path);
Archive load(const std::string& path);

Archive to_archive(const channel::CorrelationProfile& profile);
channel::CorrelationProfile profile_from_archive(const Archive& ar);

Archive to_archive(const estimator::PilotSet& pilots);
estimator::PilotSet pilots_from_archive(const Archive& ar);

}  // namespace pilotforge::archive
