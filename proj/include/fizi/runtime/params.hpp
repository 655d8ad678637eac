#pragma once

// Tunable pipeline parameters and the single name table used by both the
// runtime config file and the UI protocol.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fizi/background.hpp"
#include "fizi/drive.hpp"
#include "fizi/error.hpp"
#include "fizi/segmentation.hpp"
#include "fizi/tracker.hpp"
#include "fizi/xml.hpp"

namespace fizi::runtime {

struct PipelineParams {
    SegmentationParams segmentation;
    TrackerParams tracker;
    WheelModel wheel;  // annulus and dead zone; geometry comes from the layout
    Millis hold_ms = kDefaultHoldMs;
    int learn_frames = kDefaultLearnFrames;
    int margin = kDefaultMargin;
    double relearn_threshold = kDefaultRelearnThreshold;

    void validate() const {
        segmentation.validate();
        tracker.validate();
        if (!(wheel.annulus_inner < 1.0 && 1.0 < wheel.annulus_outer))
            throw ConfigError("wheel: need annulus_inner < 1 < annulus_outer");
        if (!(wheel.dead_zone >= 0.0)) throw ConfigError("wheel: dead_zone must be >= 0");
        if (hold_ms < 0) throw ConfigError("drive: hold_ms must be >= 0");
        if (learn_frames < 1) throw ConfigError("background: frames must be >= 1");
        if (margin < 0 || margin > 255) throw ConfigError("background: margin must be in [0,255]");
        if (!(relearn_threshold >= 0.0 && relearn_threshold <= 255.0))
            throw ConfigError("background: relearn_threshold must be in [0,255]");
    }
};

struct ParamField {
    std::string_view group;  // config element
    std::string_view name;   // attribute / protocol key
    bool integral;
    std::function<double(const PipelineParams&)> get;
    std::function<void(PipelineParams&, double)> set;
};

inline const std::vector<ParamField>& param_fields() {
    using P = PipelineParams;
    static const std::vector<ParamField> fields = {
        {"segmentation", "S", true, [](const P& p) { return double(p.segmentation.gray_tolerance); },
         [](P& p, double v) { p.segmentation.gray_tolerance = int(v); }},
        {"segmentation", "hue_lo", false, [](const P& p) { return p.segmentation.hue_lo; },
         [](P& p, double v) { p.segmentation.hue_lo = v; }},
        {"segmentation", "hue_hi", false, [](const P& p) { return p.segmentation.hue_hi; },
         [](P& p, double v) { p.segmentation.hue_hi = v; }},
        {"segmentation", "se_radius", true, [](const P& p) { return double(p.segmentation.se_radius); },
         [](P& p, double v) { p.segmentation.se_radius = int(v); }},
        {"segmentation", "min_blob_fraction", false, [](const P& p) { return p.segmentation.min_blob_fraction; },
         [](P& p, double v) { p.segmentation.min_blob_fraction = v; }},
        {"segmentation", "luma_target", true, [](const P& p) { return double(p.segmentation.luma_target); },
         [](P& p, double v) { p.segmentation.luma_target = int(v); }},
        {"segmentation", "luma_lo", true, [](const P& p) { return double(p.segmentation.luma_lo); },
         [](P& p, double v) { p.segmentation.luma_lo = int(v); }},
        {"segmentation", "luma_hi", true, [](const P& p) { return double(p.segmentation.luma_hi); },
         [](P& p, double v) { p.segmentation.luma_hi = int(v); }},
        {"segmentation", "gamma_min", false, [](const P& p) { return p.segmentation.gamma_min; },
         [](P& p, double v) { p.segmentation.gamma_min = v; }},
        {"segmentation", "gamma_max", false, [](const P& p) { return p.segmentation.gamma_max; },
         [](P& p, double v) { p.segmentation.gamma_max = v; }},
        {"tracker", "smoothing", false, [](const P& p) { return p.tracker.smoothing; },
         [](P& p, double v) { p.tracker.smoothing = v; }},
        {"tracker", "dwell_radius", false, [](const P& p) { return p.tracker.dwell_radius; },
         [](P& p, double v) { p.tracker.dwell_radius = v; }},
        {"tracker", "dwell_time", true, [](const P& p) { return double(p.tracker.dwell_time); },
         [](P& p, double v) { p.tracker.dwell_time = Millis(v); }},
        {"tracker", "lost_timeout", true, [](const P& p) { return double(p.tracker.lost_timeout); },
         [](P& p, double v) { p.tracker.lost_timeout = Millis(v); }},
        {"wheel", "annulus_inner", false, [](const P& p) { return p.wheel.annulus_inner; },
         [](P& p, double v) { p.wheel.annulus_inner = v; }},
        {"wheel", "annulus_outer", false, [](const P& p) { return p.wheel.annulus_outer; },
         [](P& p, double v) { p.wheel.annulus_outer = v; }},
        {"wheel", "dead_zone", false, [](const P& p) { return p.wheel.dead_zone; },
         [](P& p, double v) { p.wheel.dead_zone = v; }},
        {"drive", "hold_ms", true, [](const P& p) { return double(p.hold_ms); },
         [](P& p, double v) { p.hold_ms = Millis(v); }},
        {"background", "frames", true, [](const P& p) { return double(p.learn_frames); },
         [](P& p, double v) { p.learn_frames = int(v); }},
        {"background", "margin", true, [](const P& p) { return double(p.margin); },
         [](P& p, double v) { p.margin = int(v); }},
        {"background", "relearn_threshold", false, [](const P& p) { return p.relearn_threshold; },
         [](P& p, double v) { p.relearn_threshold = v; }},
    };
    return fields;
}

inline const ParamField* find_param(std::string_view name) {
    for (const auto& f : param_fields())
        if (f.name == name) return &f;
    return nullptr;
}

namespace detail {
inline void assign(PipelineParams& p, const ParamField& f, double v) {
    if (!std::isfinite(v)) throw ConfigError("parameter '" + std::string(f.name) + "' must be finite");
    if (f.integral && (v != std::floor(v) || std::abs(v) > 1e9))
        throw ConfigError("parameter '" + std::string(f.name) + "' must be an integer");
    f.set(p, v);
}
}  // namespace detail

inline nlohmann::json params_to_json(const PipelineParams& p) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : param_fields()) {
        const double v = f.get(p);
        if (f.integral)
            j[std::string(f.name)] = static_cast<long long>(v);
        else
            j[std::string(f.name)] = v;
    }
    return j;
}

/// Applies a partial update; unknown keys and non-numeric values are errors.
/// The result is validated as a whole.
inline PipelineParams apply_params_patch(const PipelineParams& base, const nlohmann::json& patch) {
    if (!patch.is_object()) throw ConfigError("params must be a JSON object");
    PipelineParams out = base;
    for (const auto& [key, value] : patch.items()) {
        const auto* f = find_param(key);
        if (!f) throw ConfigError("unknown parameter '" + key + "'");
        if (!value.is_number()) throw ConfigError("parameter '" + key + "' must be a number");
        detail::assign(out, *f, value.get<double>());
    }
    out.validate();
    return out;
}

// Runtime config file:
//   <runtime>
//     <segmentation S="30" hue_lo="340" hue_hi="25" units="deg|rad" .../>
//     <tracker smoothing="0.5" .../>
//     <wheel annulus_inner="0.6" annulus_outer="1.4" dead_zone="3"/>
//     <drive hold_ms="250"/>
//     <background frames="30" margin="10" relearn_threshold="40"/>
//   </runtime>
// Hue thresholds are degrees unless units="rad".
inline PipelineParams parse_runtime_config(std::string_view text, PipelineParams base = {}) {
    xml::Element root;
    try {
        root = xml::parse(text);
    } catch (const xml::ParseError& e) {
        throw ConfigError(std::string("runtime config: ") + e.what());
    }
    if (root.name != "runtime") throw ConfigError("runtime config: root element must be <runtime>");
    for (const auto& e : root.children) {
        auto fail = [&](const std::string& what) {
            throw ConfigError("runtime config line " + std::to_string(e.line) + ": <" + e.name + ">: " + what);
        };
        if (e.name != "segmentation" && e.name != "tracker" && e.name != "wheel" && e.name != "drive" &&
            e.name != "background")
            fail("unknown element");
        bool radians = false;
        if (const auto* u = e.find("units")) {
            if (e.name != "segmentation") fail("units only applies to <segmentation>");
            if (*u == "rad")
                radians = true;
            else if (*u != "deg")
                fail("units must be deg or rad");
        }
        for (const auto& [key, value] : e.attributes) {
            if (key == "units") continue;
            const auto* f = find_param(key);
            if (!f || f->group != e.name) fail("unknown attribute '" + key + "'");
            auto v = xml::to_number(value);
            if (!v) fail("attribute '" + key + "' is not a number");
            if (radians && (key == "hue_lo" || key == "hue_hi")) {
                double deg = *v * 180.0 / std::numbers::pi;
                deg = std::fmod(deg, 360.0);
                if (deg < 0) deg += 360.0;
                v = deg;
            }
            try {
                detail::assign(base, *f, *v);
            } catch (const ConfigError& err) {
                fail(err.what());
            }
        }
    }
    base.validate();
    return base;
}

inline PipelineParams load_runtime_config(const std::string& path, PipelineParams base = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open runtime config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_runtime_config(ss.str(), base);
}

}  // namespace fizi::runtime
