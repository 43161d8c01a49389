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

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace pilotforge {

using Rng = std::mt19937_64;

/// Purpose tags keep independent random streams apart. Two methods evaluated
/// on the same (seed, draw) see the same channel stream.
enum class StreamTag : std::uint64_t {
    Profile = 0x70726f66,
    Geometry = 0x67656f6d,
    Shadowing = 0x73686164,
    Channel = 0x6368616e,
    Pilots = 0x70696c6f,
    PilotDictionary = 0x70646963,
    CombinerDictionary = 0x63646963,
    SpaBase = 0x73706162,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b, StreamTag tag) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    return Rng(h);
}

/// Circularly-symmetric CN(0,1): variance 1/2 on each of the real and imaginary parts.
inline std::complex<double> complex_normal(Rng& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace pilotforge
