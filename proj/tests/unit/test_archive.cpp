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

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "pilotforge/archive.hpp"
#include "pilotforge/errors.hpp"
#include "pilotforge/harness.hpp"
#include "test_util.hpp"

namespace pilotforge {
namespace {

using namespace archive;
using channel::CorrelationProfile;
using matlin::CMatrix;

Archive round_trip(const Archive& ar) {
    std::stringstream ss;
    write(ar, ss);
    return read(ss);
}

void expect_same_profile(const CorrelationProfile& a, const CorrelationProfile& b) {
    ASSERT_EQ(a.kind(), b.kind());
    ASSERT_EQ(a.cells(), b.cells());
    ASSERT_EQ(a.users(), b.users());
    ASSERT_EQ(a.antennas(), b.antennas());
    for (int i = 0; i < a.cells(); ++i) {
        for (int j = 0; j < a.cells(); ++j) {
            EXPECT_EQ(a.q(i, j), b.q(i, j));
            EXPECT_EQ(a.p(i, j), b.p(i, j));
        }
    }
}

TEST(Archive, MatricesAreBitExact) {
    Rng rng = testing::seeded(500);
    Archive ar;
    ar.attrs["note"] = "two words";
    ar.put("a", testing::gaussian(3, 2, rng));
    ar.put("b/1", testing::gaussian(1, 4, rng) * 1e-300);
    ar.put("empty", CMatrix(0, 3));
    const Archive back = round_trip(ar);
    EXPECT_EQ(back.attr("note"), "two words");
    ASSERT_EQ(back.matrices.size(), 3u);
    EXPECT_EQ(back.matrices[0].first, "a");
    EXPECT_EQ(back.get("a"), ar.get("a"));
    EXPECT_EQ(back.get("b/1"), ar.get("b/1"));
    EXPECT_EQ(back.get("empty").rows(), 0);
    EXPECT_EQ(back.get("empty").cols(), 3);
}

TEST(Archive, Lookups) {
    Archive ar;
    ar.attrs["n"] = "12";
    ar.attrs["x"] = "1.5";
    ar.put("m", CMatrix::Identity(2, 2));
    ar.put("m", CMatrix::Zero(2, 2));
    EXPECT_EQ(ar.matrices.size(), 1u);
    EXPECT_EQ(ar.get("m"), CMatrix::Zero(2, 2));
    EXPECT_TRUE(ar.has("m"));
    EXPECT_FALSE(ar.has("q"));
    EXPECT_EQ(ar.attr_int("n"), 12);
    EXPECT_THROW(ar.attr_int("x"), Error);
    EXPECT_THROW(ar.attr("missing"), Error);
    EXPECT_THROW(ar.get("q"), Error);
}

TEST(Archive, MalformedInput) {
    const char* bad[] = {
        "",
        "not an archive\n",
        "# pilotforge-matrix-archive 1\nmatrix a 2 2\n1 0 0 0\n",
        "# pilotforge-matrix-archive 1\nmatrix a 1 2\n1 0 0\n",
        "# pilotforge-matrix-archive 1\nmatrix a 1 1\n1 0 0 0\n",
        "# pilotforge-matrix-archive 1\nmatrix a -1 1\n",
        "# pilotforge-matrix-archive 1\nvector a 1\n",
    };
    for (const char* text : bad) {
        std::istringstream is(text);
        try {
            read(is);
            ADD_FAILURE() << "accepted: " << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::IoError);
        }
    }
}

TEST(Archive, CommentsAndBlankLines) {
    std::istringstream is("# pilotforge-matrix-archive 1\n\n# note\nattr k v\nmatrix a 1 1\n2.5 -1\n");
    const Archive ar = read(is);
    EXPECT_EQ(ar.attr("k"), "v");
    EXPECT_EQ(ar.get("a")(0, 0), matlin::Complex(2.5, -1.0));
}

TEST(Archive, FileIo) {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = (dir / "pilotforge_archive_test.txt").string();
    Archive ar;
    ar.put("x", CMatrix::Identity(2, 3));
    save(ar, path);
    EXPECT_EQ(load(path).get("x"), ar.get("x"));
    std::filesystem::remove(path);
    EXPECT_THROW(load(path), Error);
    EXPECT_THROW(save(ar, (dir / "no_such_dir" / "x.txt").string()), Error);
}

TEST(ProfileArchive, FullySeparable) {
    Rng rng = testing::seeded(501);
    const auto prof = testing::random_full(testing::config(3, 2, 4, 2, 3), rng);
    const Archive ar = to_archive(prof);
    EXPECT_EQ(ar.attr("type"), "profile");
    EXPECT_EQ(ar.attr_int("cells"), 3);
    expect_same_profile(profile_from_archive(round_trip(ar)), prof);
}

TEST(ProfileArchive, PartiallySeparable) {
    Rng rng = testing::seeded(502);
    const auto prof = testing::random_partial(testing::config(2, 3, 2, 2, 3), rng);
    expect_same_profile(profile_from_archive(round_trip(to_archive(prof))), prof);
}

TEST(ProfileArchive, MuMimo) {
    const harness::Scenario s = harness::preset("fig5");
    const auto prof = harness::draw_profile(s, 0);
    ASSERT_EQ(prof.kind(), channel::ProfileKind::MuMimo);
    const auto back = profile_from_archive(round_trip(to_archive(prof)));
    expect_same_profile(back, prof);
    for (int i = 0; i < 7; ++i) {
        for (int k = 0; k < 4; ++k) {
            for (int j = 0; j < 7; ++j) EXPECT_EQ(back.transmit_gain(i, k, j), prof.transmit_gain(i, k, j));
        }
    }
}

TEST(ProfileArchive, RejectsOtherContent) {
    Archive ar;
    ar.attrs["type"] = "pilots";
    EXPECT_THROW(profile_from_archive(ar), Error);
    ar.attrs["type"] = "profile";
    ar.attrs["kind"] = "mystery";
    ar.attrs["cells"] = "1";
    ar.attrs["users"] = "1";
    ar.attrs["antennas"] = "1";
    EXPECT_THROW(profile_from_archive(ar), Error);
}

TEST(PilotArchive, RoundTrip) {
    Rng rng = testing::seeded(503);
    const auto s = estimator::PilotSet::from_stacked(testing::gaussian(4, 6, rng), 3, 2);
    const Archive ar = to_archive(s);
    EXPECT_EQ(ar.attr("type"), "pilots");
    const auto back = pilots_from_archive(round_trip(ar));
    EXPECT_EQ(back.stacked(), s.stacked());
    EXPECT_THROW(pilots_from_archive(to_archive(testing::random_full(testing::config(1, 1, 1, 1, 1), rng))),
                 Error);
}

}  // namespace
}  // namespace pilotforge
