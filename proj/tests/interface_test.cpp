#include <gtest/gtest.h>

#include <random>
#include <string>

#include "fizi/interface.hpp"

using namespace fizi;

namespace {

CursorState cursor_at(double x, double y, bool clicked = false) {
    CursorState c;
    c.visible = true;
    c.position = {x, y};
    c.clicked = clicked;
    return c;
}

std::string layout_error(const std::string& xml) {
    try {
        load_layout(xml);
    } catch (const LayoutError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Layout, MinimalButton) {
    const Layout l = load_layout(R"(<interface><zone id="go" type="button" x="1" y="2" w="30" h="40"/></interface>)");
    ASSERT_EQ(l.zones.size(), 1u);
    EXPECT_EQ(l.zones[0].id, "go");
    EXPECT_EQ(l.zones[0].kind, ZoneKind::button);
    EXPECT_EQ(l.zones[0].rect, (Rect{1, 2, 30, 40}));
    EXPECT_FALSE(l.background_image);
}

TEST(Layout, WheelFidelity) {
    const Layout l = load_layout(
        "<interface>\n<background image=\"wheel.png\"/>\n"
        "<zone id=\"w\" type=\"wheel\" cx=\"320\" cy=\"260\" r=\"140\" theta_max=\"90\" on_change=\"log\"/>\n"
        "</interface>");
    ASSERT_EQ(l.zones.size(), 1u);
    const Zone& z = l.zones[0];
    EXPECT_EQ(z.kind, ZoneKind::wheel);
    EXPECT_EQ(z.circle, (Circle{320, 260, 140}));
    EXPECT_EQ(z.theta_max, 90);
    EXPECT_EQ(z.line, 3);
    EXPECT_EQ(*z.action_for(EventKind::value_changed), "log");
    EXPECT_EQ(l.background_image, "wheel.png");
}

TEST(Layout, DuplicateIdNamesIdAndLine) {
    const std::string err = layout_error(
        "<interface>\n"
        "  <zone id=\"a\" type=\"button\" x=\"0\" y=\"0\" w=\"1\" h=\"1\"/>\n"
        "  <zone id=\"a\" type=\"slider\" x=\"0\" y=\"0\" w=\"1\" h=\"1\"/>\n"
        "</interface>");
    EXPECT_NE(err.find("\"a\""), std::string::npos) << err;
    EXPECT_NE(err.find("line 3"), std::string::npos) << err;
}

TEST(Layout, Errors) {
    EXPECT_NE(layout_error(R"(<interface><zone id="k" type="knob" x="0" y="0" w="1" h="1"/></interface>)")
                  .find("unknown zone type"),
              std::string::npos);
    EXPECT_NE(layout_error(R"(<interface><zone id="k" type="button" x="0" y="0" w="1"/></interface>)").find("'h'"),
              std::string::npos);
    EXPECT_NE(layout_error("<interface>\n<zone id=\"k\" type=\"button\"").find("malformed"), std::string::npos);
    EXPECT_NE(layout_error(R"(<interface><zone id="k" type="button" x="0" y="0" w="0" h="1"/></interface>)")
                  .find("positive"),
              std::string::npos);
    EXPECT_NE(layout_error(R"(<interface><zone id="w" type="wheel" cx="0" cy="0" r="5" theta_max="200"/></interface>)")
                  .find("theta_max"),
              std::string::npos);
    EXPECT_NE(layout_error(R"(<layout/>)").find("<interface>"), std::string::npos);
    EXPECT_NE(layout_error(R"(<interface><panel/></interface>)").find("unknown element"), std::string::npos);
    EXPECT_NE(layout_error(R"(<interface><zone id="k" type="button" x="a" y="0" w="1" h="1"/></interface>)")
                  .find("not a number"),
              std::string::npos);
}

TEST(Layout, SerializeRoundTrip) {
    const std::string xml =
        "<interface>\n"
        "  <background image=\"a&amp;b.png\"/>\n"
        "  <zone id=\"q\" type=\"button\" x=\"10.5\" y=\"20\" w=\"30\" h=\"40\" on_click=\"action:quit\" on_enter=\"log\"/>\n"
        "  <zone id=\"t\" type=\"slider\" x=\"0.1\" y=\"0.2\" w=\"0.30000000000000004\" h=\"80\"/>\n"
        "  <zone id=\"w\" type=\"wheel\" cx=\"320\" cy=\"260\" r=\"140\" theta_max=\"67.5\" on_change=\"emit_command\"/>\n"
        "</interface>\n";
    const Layout a = load_layout(xml);
    const Layout b = load_layout(serialize_layout(a));
    EXPECT_EQ(a.zones, b.zones);
    EXPECT_EQ(a.background_image, b.background_image);
    EXPECT_EQ(serialize_layout(b), serialize_layout(a));
}

namespace {

const char* kPanel =
    "<interface>"
    "<zone id=\"q\" type=\"button\" x=\"10\" y=\"10\" w=\"20\" h=\"20\" on_click=\"action:quit\"/>"
    "<zone id=\"s\" type=\"slider\" x=\"100\" y=\"0\" w=\"20\" h=\"100\"/>"
    "<zone id=\"w\" type=\"wheel\" cx=\"300\" cy=\"100\" r=\"50\" theta_max=\"90\"/>"
    "</interface>";

}  // namespace

TEST(HitTest, EnterOnCrossingIntoButton) {
    const Layout l = load_layout(kPanel);
    HitResult r = hit_test(l, cursor_at(0, 0), {}, 0);
    EXPECT_TRUE(r.events.empty());
    r = hit_test(l, cursor_at(15, 15), r.state, 33);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(r.events[0], (InterfaceEvent{"q", EventKind::enter, 0.0, 33}));
    r = hit_test(l, cursor_at(16, 15), r.state, 66);
    EXPECT_TRUE(r.events.empty());
}

TEST(HitTest, EdgesAreInclusive) {
    const Layout l = load_layout(kPanel);
    EXPECT_EQ(hit_test(l, cursor_at(30, 30), {}, 0).events.size(), 1u);
    EXPECT_EQ(hit_test(l, cursor_at(10, 10), {}, 0).events.size(), 1u);
    EXPECT_EQ(hit_test(l, cursor_at(30.01, 30), {}, 0).events.size(), 0u);
}

TEST(HitTest, SliderMidpoint) {
    const Layout l = load_layout(kPanel);
    const HitResult r = hit_test(l, cursor_at(110, 50), {}, 0);
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(r.events[0].kind, EventKind::enter);
    EXPECT_EQ(r.events[1].kind, EventKind::value_changed);
    EXPECT_DOUBLE_EQ(r.events[1].value, 0.5);
    EXPECT_DOUBLE_EQ(*r.throttle, 0.5);
}

TEST(HitTest, SliderChangeThreshold) {
    const Layout l = load_layout(kPanel);
    HitResult r = hit_test(l, cursor_at(110, 50), {}, 0);
    r = hit_test(l, cursor_at(110, 50.5), r.state, 1);
    EXPECT_TRUE(r.events.empty());
    r = hit_test(l, cursor_at(110, 51.5), r.state, 2);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_NEAR(r.events[0].value, 0.485, 1e-12);
}

TEST(HitTest, ClickInsideButton) {
    const Layout l = load_layout(kPanel);
    HitResult r = hit_test(l, cursor_at(20, 20), {}, 0);
    r = hit_test(l, cursor_at(20, 20, true), r.state, 800);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(r.events[0], (InterfaceEvent{"q", EventKind::click, 0.0, 800}));
    EXPECT_EQ(*l.zones[0].action_for(EventKind::click), "action:quit");
}

TEST(HitTest, WheelSteering) {
    const Layout l = load_layout(kPanel);
    const HitResult r = hit_test(l, cursor_at(350, 100), {}, 0);
    ASSERT_TRUE(r.steering);
    EXPECT_DOUBLE_EQ(*r.steering, 1.0);
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(r.events[1], (InterfaceEvent{"w", EventKind::value_changed, 1.0, 0}));
    EXPECT_FALSE(r.throttle);
}

TEST(HitTest, InvisibleCursorLeaves) {
    const Layout l = load_layout(kPanel);
    HitResult r = hit_test(l, cursor_at(15, 15), {}, 0);
    CursorState gone = cursor_at(15, 15);
    gone.visible = false;
    r = hit_test(l, gone, r.state, 10);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(r.events[0].kind, EventKind::leave);
}

TEST(HitTest, EnterLeaveAlternateAndSliderClamped) {
    const Layout l = load_layout(kPanel);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> x(-20, 400), y(-50, 200);
    std::bernoulli_distribution vis(0.9);
    HitState st;
    std::map<std::string, EventKind> last;
    for (int i = 0; i < 5000; ++i) {
        CursorState c = cursor_at(x(rng), y(rng));
        c.visible = vis(rng);
        const HitResult r = hit_test(l, c, st, i);
        for (const auto& e : r.events) {
            if (e.kind == EventKind::enter || e.kind == EventKind::leave) {
                auto it = last.find(e.zone_id);
                if (it == last.end())
                    ASSERT_EQ(e.kind, EventKind::enter);
                else
                    ASSERT_NE(it->second, e.kind);
                last[e.zone_id] = e.kind;
            }
            if (e.kind == EventKind::value_changed) {
                const double lo = e.zone_id == "s" ? 0.0 : -1.0;
                ASSERT_GE(e.value, lo);
                ASSERT_LE(e.value, 1.0);
            }
        }
        st = r.state;
    }
    for (double yy : {-1000.0, -5.0, 0.0, 100.0, 1e6}) {
        Zone s = l.zones[1];
        const double v = s.slider_value({110, yy});
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(HitTest, OverlappingZonesAllReceiveEventsInDocumentOrder) {
    const Layout l = load_layout(
        "<interface><zone id=\"a\" type=\"button\" x=\"0\" y=\"0\" w=\"10\" h=\"10\"/>"
        "<zone id=\"b\" type=\"button\" x=\"5\" y=\"5\" w=\"10\" h=\"10\"/></interface>");
    const HitResult r = hit_test(l, cursor_at(7, 7, true), {}, 0);
    ASSERT_EQ(r.events.size(), 4u);
    EXPECT_EQ(r.events[0].zone_id, "a");
    EXPECT_EQ(r.events[1], (InterfaceEvent{"a", EventKind::click, 0.0, 0}));
    EXPECT_EQ(r.events[2].zone_id, "b");
    EXPECT_EQ(r.events[3].kind, EventKind::click);
}
