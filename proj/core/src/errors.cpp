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

#include "pilotforge/errors.hpp"

namespace pilotforge {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::Singular: return "Singular";
        case ErrorCode::SingularGram: return "SingularGram";
        case ErrorCode::SingularReducedGram: return "SingularReducedGram";
        case ErrorCode::SingularB: return "SingularB";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::DictionaryExhausted: return "DictionaryExhausted";
        case ErrorCode::RowDependent: return "RowDependent";
        case ErrorCode::NoFeasibleRow: return "NoFeasibleRow";
        case ErrorCode::UnknownPreset: return "UnknownPreset";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace pilotforge
