// Copyright 2026 The gossipsim Authors.
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

#include <cmath>

#include <gtest/gtest.h>

#include "gossip/schedule.hpp"

namespace gossip {
namespace {

TEST(EventProbabilities, MustSumToOne)
{
    EXPECT_NO_THROW(EventProbabilities::make(1.0 / 3, 1.0 / 3, 1.0 / 3));
    EXPECT_THROW(EventProbabilities::make(0.5, 0.5, 0.5), Error);
    EXPECT_THROW(EventProbabilities::make(-0.1, 0.6, 0.5), Error);
}

TEST(Schedule, ClosedForms)
{
    EXPECT_EQ(Schedule::constant(0.25)(17), 0.25);
    EXPECT_DOUBLE_EQ(Schedule::power(0.5, 1.0)(3), 0.125);
    EXPECT_DOUBLE_EQ(Schedule::geometric(0.25, 0.5)(2), 0.0625);
    EXPECT_DOUBLE_EQ(Schedule::geometric(0.25, 0.5, true)(0), 0.75);
    const auto e = Schedule::explicit_list({0.1, 0.2}, 0.3);
    EXPECT_EQ(e(0), 0.1);
    EXPECT_EQ(e(1), 0.2);
    EXPECT_EQ(e(99), 0.3);
}

TEST(Schedule, ClippingIntoLegalRange)
{
    auto t = attraction_clip(Schedule::constant(1.5));
    EXPECT_EQ(t(0), 1.0);
    EXPECT_TRUE(t.clipped(0));
    auto g = attraction_clip(Schedule::geometric(1.0, 0.01));
    EXPECT_EQ(g(100), kScheduleFloor);
    auto s = repulsion_clip(Schedule::geometric(1.0, 2.0));
    EXPECT_EQ(s(10), 1024.0);
}

TEST(Schedule, Monotonicity)
{
    EXPECT_TRUE(Schedule::constant(0.3).nondecreasing());
    EXPECT_TRUE(Schedule::constant(0.3).nonincreasing());
    EXPECT_TRUE(Schedule::power(1.0, 0.5).nonincreasing());
    EXPECT_FALSE(Schedule::power(1.0, 0.5).nondecreasing());
    EXPECT_TRUE(Schedule::geometric(0.25, 0.5, true).nondecreasing());
    EXPECT_FALSE(Schedule::explicit_list({0.1, 0.3, 0.2}, 0.2).nondecreasing());
    EXPECT_TRUE(Schedule::explicit_list({0.1, 0.2, 0.3}, 0.4).nondecreasing());
}

TEST(Schedule, CheckRejectsMalformed)
{
    EXPECT_THROW(Schedule::power(-1.0, 1.0).check("T"), Error);
    EXPECT_THROW(Schedule::geometric(1.0, 0.0).check("T"), Error);
    EXPECT_THROW(Schedule::explicit_list({0.1, NAN}, 0.1).check("T"), Error);
    EXPECT_THROW(Schedule::constant(0.5).clip(0.0, 1.0).check("T"), Error);
}

}  // namespace
}  // namespace gossip
