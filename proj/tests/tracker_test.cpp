#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fizi/synthetic.hpp"
#include "fizi/tracker.hpp"

using namespace fizi;

namespace {

BinaryMask block(int w, int h, int x0, int y0, int side) {
    BinaryMask m(w, h);
    for (int y = y0; y < y0 + side; ++y)
        for (int x = x0; x < x0 + side; ++x) m.set(x, y, true);
    return m;
}

int clicks_for(int frames) {
    const BinaryMask m = block(64, 48, 20, 20, 5);
    CursorState c;
    int clicks = 0;
    for (int i = 0; i < frames; ++i) {
        c = update(c, m, static_cast<Millis>(i) * 33);
        clicks += c.clicked;
    }
    return clicks;
}

}  // namespace

TEST(Tracker, SnapsOnAcquisition) {
    const BinaryMask m = synthetic::disc_mask(200, 100, {100, 50}, 6);
    const CursorState c = update({}, m, 0);
    EXPECT_TRUE(c.visible);
    EXPECT_DOUBLE_EQ(c.position.x, 100.0);
    EXPECT_DOUBLE_EQ(c.position.y, 50.0);
    EXPECT_FALSE(c.clicked);
}

TEST(Tracker, SmoothsTowardNewCentroid) {
    CursorState c = update({}, block(64, 48, 9, 9, 3), 0);  // centroid (10,10)
    c = update(c, block(64, 48, 29, 9, 3), 33);              // centroid (30,10)
    EXPECT_DOUBLE_EQ(c.position.x, 20.0);
    TrackerParams p;
    p.smoothing = 1.0;
    c = update(c, block(64, 48, 39, 19, 3), 66, p);
    EXPECT_DOUBLE_EQ(c.position.x, 40.0);
    EXPECT_DOUBLE_EQ(c.position.y, 20.0);
}

TEST(Tracker, LargestComponentIsTheHand) {
    BinaryMask m = block(64, 48, 2, 2, 2);
    const BinaryMask big = block(64, 48, 40, 30, 4);
    for (std::size_t i = 0; i < m.size(); ++i) m.bits()[i] |= big.bits()[i];
    const CursorState c = update({}, m, 0);
    EXPECT_DOUBLE_EQ(c.position.x, 41.5);
    EXPECT_DOUBLE_EQ(c.position.y, 31.5);
}

TEST(Tracker, DwellClicksExactlyOnce) {
    EXPECT_EQ(clicks_for(30), 1);
    EXPECT_EQ(clicks_for(90), 1);
    EXPECT_EQ(clicks_for(14), 0);
}

TEST(Tracker, ClickFiresWhenDwellCrossesThreshold) {
    const BinaryMask m = block(64, 48, 20, 20, 5);
    CursorState c;
    for (int i = 0; i < 30; ++i) {
        c = update(c, m, static_cast<Millis>(i) * 33);
        if (c.clicked) {
            EXPECT_GE(c.dwell_ms, 800);
            EXPECT_LT(c.dwell_ms - 33, 800);
            EXPECT_TRUE(c.visible);
        }
    }
}

TEST(Tracker, LeavingDwellRadiusResetsAndAllowsNewClick) {
    CursorState c;
    int clicks = 0;
    Millis t = 0;
    for (int i = 0; i < 30; ++i, t += 33) clicks += (c = update(c, block(64, 48, 5, 5, 5), t)).clicked;
    for (int i = 0; i < 5; ++i, t += 33) c = update(c, block(64, 48, 50, 35, 5), t);
    EXPECT_LT(c.dwell_ms, 800);
    for (int i = 0; i < 30; ++i, t += 33) clicks += (c = update(c, block(64, 48, 50, 35, 5), t)).clicked;
    EXPECT_EQ(clicks, 2);
}

TEST(Tracker, LostAfterTimeout) {
    CursorState c = update({}, block(32, 32, 4, 4, 4), 0);
    const BinaryMask empty(32, 32);
    c = update(c, empty, 300);
    EXPECT_TRUE(c.visible);
    c = update(c, empty, 500);
    EXPECT_TRUE(c.visible);
    c = update(c, empty, 501);
    EXPECT_FALSE(c.visible);
    EXPECT_FALSE(c.clicked);
    EXPECT_EQ(c.dwell_ms, 0);
}

TEST(Tracker, PositionStaysInsideObservedHull) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> pos(0, 56);
    CursorState c;
    double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
    for (int i = 0; i < 200; ++i) {
        const int x = pos(rng), y = pos(rng);
        c = update(c, block(64, 64, x, y, 3), i * 33);
        xmin = std::min(xmin, x + 1.0), xmax = std::max(xmax, x + 1.0);
        ymin = std::min(ymin, y + 1.0), ymax = std::max(ymax, y + 1.0);
        ASSERT_GE(c.position.x, xmin - 1e-9);
        ASSERT_LE(c.position.x, xmax + 1e-9);
        ASSERT_GE(c.position.y, ymin - 1e-9);
        ASSERT_LE(c.position.y, ymax + 1e-9);
        ASSERT_TRUE(!c.clicked || c.visible);
    }
}

TEST(Tracker, Deterministic) {
    const BinaryMask m = block(32, 32, 10, 12, 4);
    CursorState prev = update({}, block(32, 32, 3, 3, 4), 0);
    EXPECT_EQ(update(prev, m, 40), update(prev, m, 40));
}

TEST(TrackerParams, Validation) {
    TrackerParams p;
    EXPECT_NO_THROW(p.validate());
    p.smoothing = 1.5;
    EXPECT_THROW(p.validate(), ConfigError);
}
