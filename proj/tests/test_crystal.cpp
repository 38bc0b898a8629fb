#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace crystal_charge;

namespace {

Crystal square5() {
    const std::vector<Box> boxes{{0, 0, 0, 0, 0}, {1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {1, 1, 0, 0, 0}};
    return Crystal::from_boxes(5, boxes);
}

Crystal origin5() {
    Crystal c(5);
    c.add(Box(5));
    return c;
}

} // namespace

TEST(IsCrystal, Examples) {
    EXPECT_TRUE(is_crystal({}, 5));
    EXPECT_TRUE(is_crystal({Box{0, 0, 0, 0, 0}, Box{1, 0, 0, 0, 0}}, 5));
    EXPECT_FALSE(is_crystal({Box{1, 0, 0, 0, 0}}, 5));
}

TEST(IsCrystal, RejectsMixedDimensions) {
    EXPECT_THROW(is_crystal({Box{0, 0, 0}, Box{0, 0, 0, 0, 0}}, 5), DimensionMismatch);
}

TEST(Crystal, FromBoxesNamesViolation) {
    try {
        (void)Crystal::from_boxes(3, std::vector<Box>{{0, 0, 0}, {0, 2, 0}});
        FAIL() << "expected InvalidPartition";
    } catch (const InvalidPartition& e) {
        EXPECT_NE(std::string(e.what()).find("(0,2,0)"), std::string::npos);
    }
}

TEST(Crystal, CheckedMutation) {
    Crystal c(3);
    EXPECT_THROW(c.add(Box{1, 0, 0}), InvalidPartition);
    c.add(Box{0, 0, 0});
    c.add(Box{1, 0, 0});
    EXPECT_THROW(c.remove(Box{0, 0, 0}), InvalidPartition);
    c.remove(Box{1, 0, 0});
    EXPECT_EQ(c.size(), 1u);
}

TEST(Addable, Examples) {
    EXPECT_EQ(addable(Crystal(5)), std::vector<Box>{Box(5)});
    EXPECT_EQ(addable(origin5()).size(), 5u);
    const auto a = addable(square5());
    for (const Box& b : {Box{2, 0, 0, 0, 0}, Box{0, 2, 0, 0, 0}, Box{0, 0, 1, 0, 0}, Box{0, 0, 0, 1, 0},
                         Box{0, 0, 0, 0, 1}})
        EXPECT_NE(std::find(a.begin(), a.end(), b), a.end()) << b.str();
    EXPECT_EQ(a, oracle::addable(square5()));
}

TEST(Removable, Examples) {
    EXPECT_TRUE(removable(Crystal(5)).empty());
    EXPECT_EQ(removable(origin5()), std::vector<Box>{Box(5)});
    EXPECT_EQ(removable(square5()), (std::vector<Box>{{1, 1, 0, 0, 0}}));
}

TEST(AddableRemovable, MatchBruteForceScan) {
    for (int n = 2; n <= 5; ++n)
        for (std::uint64_t seed = 0; seed < 15; ++seed) {
            const Crystal c = oracle::random_crystal(n, 5 + seed * 2, seed * 31 + n);
            EXPECT_EQ(addable(c), oracle::addable(c)) << "n=" << n << " seed=" << seed;
            EXPECT_EQ(removable(c), oracle::removable(c)) << "n=" << n << " seed=" << seed;
        }
}

TEST(Targets, Examples) {
    EXPECT_EQ(targets(Crystal(5)), std::vector<Charge>{Charge::zero(5)});
    const auto t = targets(origin5());
    EXPECT_EQ(t.size(), 6u);
    for (int k = 0; k < 5; ++k)
        EXPECT_TRUE(std::binary_search(t.begin(), t.end(), charge_of_box(Box::unit(5, k))));
}

TEST(Targets, SizeMatchesPositions) {
    const Crystal c = grow_random(Crystal(5), 50, 2024);
    EXPECT_EQ(targets(c).size(), oracle::addable(c).size() + oracle::removable(c).size());
}

TEST(Targets, DistinctOnRandomCrystals) {
    for (int n : {2, 3, 4, 5, 7})
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const Crystal c = grow_random(Crystal(n), 10 + seed, seed);
            EXPECT_NO_THROW((void)targets(c)) << "n=" << n << " seed=" << seed;
        }
}

TEST(Bisect, Examples) {
    const Crystal sq = square5();
    EXPECT_EQ(bisect(sq, Box{1, 1, 0, 0, 0}), (BoxSet{Box{1, 1, 0, 0, 0}}));
    EXPECT_EQ(bisect(sq, Box(5)), sq.boxes());
    EXPECT_EQ(bisect(sq, Box{0, 1, 0, 0, 0}), (BoxSet{Box{0, 1, 0, 0, 0}, Box{1, 1, 0, 0, 0}}));
}

TEST(Hypercube, Examples) {
    EXPECT_EQ(hypercube(Box(5), std::vector<int>{0, 1}).size(), 4u);
    EXPECT_EQ(hypercube(Box(5), full_mask(5)).size(), 32u);
    EXPECT_EQ(hypercube(Box{1, 0, 0, 0, 0}, std::vector<int>{1}),
              (std::vector<Box>{{1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}}));
    EXPECT_THROW(hypercube(Box(5), std::vector<int>{2, 2}), InvalidArgument);
}

TEST(Hypercube, IsACrystalAtOrigin) {
    for (DirMask m = 0; m < 32; ++m) {
        const auto boxes = hypercube(Box(5), m);
        EXPECT_TRUE(oracle::is_downset(BoxSet(boxes.begin(), boxes.end())));
    }
}

TEST(SurfaceMembership, Examples) {
    EXPECT_EQ(surface_membership(Crystal(5), Box{0, 2, 0, 0, 0}), (SurfacePoint{1, 0b10}));
    EXPECT_EQ(surface_membership(origin5(), Box{1, 1, 1, 1, 1}), (SurfacePoint{5, 0b11111}));
    EXPECT_FALSE(surface_membership(Crystal(5), Box{1, 1, 1, 1, 1}).has_value());
    EXPECT_FALSE(surface_membership(origin5(), Box(5)).has_value());
}

TEST(SurfacePoints, AllAcceptedAndIncludeAddable) {
    const Crystal c = grow_random(Crystal(5), 30, 8);
    const auto pts = surface_points(c);
    for (const auto& b : pts) EXPECT_TRUE(surface_membership(c, b).has_value());
    for (const auto& b : addable(c)) EXPECT_TRUE(std::binary_search(pts.begin(), pts.end(), b));
}

TEST(GrowRandom, Examples) {
    EXPECT_TRUE(grow_random(Crystal(5), 0, 1).empty());
    const Crystal one = grow_random(Crystal(5), 1, 1);
    EXPECT_EQ(one.sorted_boxes(), std::vector<Box>{Box(5)});
}

TEST(GrowRandom, DeterministicAndValid) {
    for (int n : {3, 5, 7}) {
        const Crystal a = grow_random(Crystal(n), 60, 77);
        EXPECT_EQ(a, grow_random(Crystal(n), 60, 77));
        EXPECT_EQ(a.size(), 60u);
        EXPECT_TRUE(oracle::is_downset(a.boxes()));
        EXPECT_EQ(digest(a), digest(grow_random(Crystal(n), 60, 77)));
    }
    EXPECT_NE(grow_random(Crystal(5), 40, 1), grow_random(Crystal(5), 40, 2));
}
