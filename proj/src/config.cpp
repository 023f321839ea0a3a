#include "splatguard/config.hpp"

#include "splatguard/error.hpp"

#include <cmath>
#include <initializer_list>
#include <string_view>

namespace splatguard {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw Error(ErrorKind::InvalidConfig, "field '" + field + "': " + what);
}

std::string join(const std::string& prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) bad(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || key == k;
        if (!ok) bad(join(path, key), "unknown field");
    }
}

void read(const json& j, const std::string& path, std::string_view key, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(std::string(key));
    if (!v.is_number()) bad(join(path, key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) bad(join(path, key), "must be finite");
}

void read(const json& j, const std::string& path, std::string_view key, int& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(std::string(key));
    if (!v.is_number_integer()) bad(join(path, key), "expected an integer");
    const auto x = v.get<long long>();
    if (x < -2147483647LL || x > 2147483647LL) bad(join(path, key), "out of range");
    out = static_cast<int>(x);
}

void read(const json& j, const std::string& path, std::string_view key, std::uint64_t& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(std::string(key));
    if (!v.is_number_unsigned()) bad(join(path, key), "expected an unsigned 64-bit integer");
    out = v.get<std::uint64_t>();
}

void read(const json& j, const std::string& path, std::string_view key, bool& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(std::string(key));
    if (!v.is_boolean()) bad(join(path, key), "expected true or false");
    out = v.get<bool>();
}

void read(const json& j, const std::string& path, std::string_view key, std::string& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(std::string(key));
    if (!v.is_string()) bad(join(path, key), "expected a string");
    out = v.get<std::string>();
}

template <class Enum, class Parse>
void read_enum(const json& j, const std::string& path, std::string_view key, Enum& out, Parse parse) {
    if (!j.contains(key)) return;
    std::string s;
    read(j, path, key, s);
    try {
        out = parse(s);
    } catch (const Error&) {
        bad(join(path, key), "unsupported value '" + s + "'");
    }
}

std::string_view tour_mode_name(TourMode m) { return m == TourMode::OpenPath ? "open" : "closed"; }

TourMode tour_mode_from(std::string_view s) {
    if (s == "open") return TourMode::OpenPath;
    if (s == "closed") return TourMode::ClosedTour;
    throw Error(ErrorKind::InvalidArgument, "tour mode");
}

std::string_view solver_name(TspSolver s) {
    switch (s) {
    case TspSolver::Auto: return "auto";
    case TspSolver::Exact: return "exact";
    case TspSolver::LinKernighan: return "lk";
    }
    return "?";
}

TspSolver solver_from(std::string_view s) {
    if (s == "auto") return TspSolver::Auto;
    if (s == "exact") return TspSolver::Exact;
    if (s == "lk") return TspSolver::LinKernighan;
    throw Error(ErrorKind::InvalidArgument, "solver");
}

std::string_view scene_name(SceneKind k) { return k == SceneKind::Smooth ? "smooth" : "thin-bar"; }

SceneKind scene_from(std::string_view s) {
    if (s == "smooth") return SceneKind::Smooth;
    if (s == "thin-bar") return SceneKind::ThinBar;
    throw Error(ErrorKind::InvalidArgument, "scene");
}

std::string_view experiment_name(Experiment e) { return e == Experiment::Fit ? "fit" : "defense-ab"; }

Experiment experiment_from(std::string_view s) {
    if (s == "fit") return Experiment::Fit;
    if (s == "defense-ab") return Experiment::DefenseAB;
    throw Error(ErrorKind::InvalidArgument, "experiment");
}

void read_minisplat(const json& j, const std::string& path, MiniSplatConfig& m) {
    require_object(j, path);
    reject_unknown(j, path,
                   {"experiment", "scene", "gaussians", "width", "height", "views", "view_shift", "iterations", "lr",
                    "lambda_scale", "tau", "scale_warmup", "track_ssim", "background"});
    read_enum(j, path, "experiment", m.experiment, experiment_from);
    read_enum(j, path, "scene", m.scene, scene_from);
    read(j, path, "gaussians", m.gaussians);
    read(j, path, "width", m.width);
    read(j, path, "height", m.height);
    read(j, path, "views", m.views);
    read(j, path, "view_shift", m.view_shift);
    read(j, path, "iterations", m.train.iterations);
    read(j, path, "lambda_scale", m.train.lambda_scale);
    read(j, path, "tau", m.train.tau);
    read(j, path, "scale_warmup", m.train.scale_warmup);
    read(j, path, "track_ssim", m.train.track_ssim);
    if (j.contains("lr")) {
        const json& lr = j.at("lr");
        const std::string p = join(path, "lr");
        require_object(lr, p);
        reject_unknown(lr, p, {"position", "log_scale", "rotation", "color", "opacity"});
        read(lr, p, "position", m.train.lr.position);
        read(lr, p, "log_scale", m.train.lr.log_scale);
        read(lr, p, "rotation", m.train.lr.rotation);
        read(lr, p, "color", m.train.lr.color);
        read(lr, p, "opacity", m.train.lr.opacity);
    }
    if (j.contains("background")) {
        const json& bg = j.at("background");
        const std::string p = join(path, "background");
        if (!bg.is_array() || bg.size() != 3) bad(p, "expected an array of three numbers");
        for (int k = 0; k < 3; ++k) {
            if (!bg[k].is_number()) bad(p, "expected an array of three numbers");
            m.background[k] = bg[k].get<double>();
        }
    }
}

} // namespace

void RunConfig::validate() const {
    if (jobs < 0) bad("jobs", "must be >= 0");
    if (wavelet_level < 1 || wavelet_level > 8) bad("wavelet_level", "must lie in [1, 8]");
    try {
        pose_weights().validate();
    } catch (const Error& e) {
        bad("pose.w_g/pose.w_t", e.what());
    }
    if (matching.window < 1) bad("matching.window", "must be >= 1");
    if (matching.max_keypoints < 1) bad("matching.max_keypoints", "must be >= 1");
    if (!(matching.fast_threshold > 0.0 && matching.fast_threshold < 1.0)) {
        bad("matching.fast_threshold", "must lie in (0, 1)");
    }
    if (!(matching.ratio > 0.0 && matching.ratio <= 1.0)) bad("matching.ratio", "must lie in (0, 1]");
    if (!(scale.tau >= 0.0)) bad("scale.tau", "must be >= 0");
    if (!(scale.lambda >= 0.0)) bad("scale.lambda", "must be >= 0");
    if (!(perturb.epsilon >= 0.0 && perturb.epsilon <= 1.0)) bad("perturb.epsilon", "must lie in [0, 1]");
    const auto& m = minisplat;
    if (m.gaussians < 1) bad("minisplat.gaussians", "must be >= 1");
    if (m.width < 11 || m.height < 11) bad("minisplat.width/height", "canvas must be at least 11x11");
    if (m.views < 1) bad("minisplat.views", "must be >= 1");
    if (!(m.view_shift >= 0.0)) bad("minisplat.view_shift", "must be >= 0");
    for (double b : m.background) {
        if (!(b >= 0.0 && b <= 1.0)) bad("minisplat.background", "components must lie in [0, 1]");
    }
    try {
        m.train.validate();
    } catch (const Error& e) {
        bad("minisplat", e.what());
    }
}

MatchingOptions RunConfig::matching_options() const {
    MatchingOptions o;
    o.window = matching.window;
    o.denominator = matching.denominator;
    o.detector.max_keypoints = matching.max_keypoints;
    o.detector.fast_threshold = matching.fast_threshold;
    o.matcher.ratio = matching.ratio;
    o.include_hh = matching.include_hh;
    return o;
}

PoseLossWeights RunConfig::pose_weights() const { return {pose.w_g, pose.w_t}; }

ordered_json to_json(const RunConfig& c) {
    ordered_json j;
    j["seed"] = c.seed;
    j["out"] = c.out;
    j["jobs"] = c.jobs;
    j["wavelet_level"] = c.wavelet_level;
    j["pose"] = {{"w_g", c.pose.w_g},
                 {"w_t", c.pose.w_t},
                 {"normalize_translations", c.pose.normalize_translations},
                 {"mode", tour_mode_name(c.pose.mode)},
                 {"solver", solver_name(c.pose.solver)}};
    j["matching"] = {{"window", c.matching.window},
                     {"denominator", to_string(c.matching.denominator)},
                     {"max_keypoints", c.matching.max_keypoints},
                     {"fast_threshold", c.matching.fast_threshold},
                     {"ratio", c.matching.ratio},
                     {"include_hh", c.matching.include_hh}};
    j["scale"] = {{"tau", c.scale.tau}, {"lambda", c.scale.lambda}};
    j["perturb"] = {{"mode", to_string(c.perturb.mode)}, {"epsilon", c.perturb.epsilon}};
    const auto& m = c.minisplat;
    j["minisplat"] = {{"experiment", experiment_name(m.experiment)},
                      {"scene", scene_name(m.scene)},
                      {"gaussians", m.gaussians},
                      {"width", m.width},
                      {"height", m.height},
                      {"views", m.views},
                      {"view_shift", m.view_shift},
                      {"iterations", m.train.iterations},
                      {"lr",
                       {{"position", m.train.lr.position},
                        {"log_scale", m.train.lr.log_scale},
                        {"rotation", m.train.lr.rotation},
                        {"color", m.train.lr.color},
                        {"opacity", m.train.lr.opacity}}},
                      {"lambda_scale", m.train.lambda_scale},
                      {"tau", m.train.tau},
                      {"scale_warmup", m.train.scale_warmup},
                      {"track_ssim", m.train.track_ssim},
                      {"background", m.background}};
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j, RunConfig c) {
    require_object(j, "");
    reject_unknown(j, "", {"seed", "out", "jobs", "wavelet_level", "pose", "matching", "scale", "perturb", "minisplat"});
    read(j, "", "seed", c.seed);
    read(j, "", "out", c.out);
    read(j, "", "jobs", c.jobs);
    read(j, "", "wavelet_level", c.wavelet_level);
    if (j.contains("pose")) {
        const json& p = j.at("pose");
        require_object(p, "pose");
        reject_unknown(p, "pose", {"w_g", "w_t", "normalize_translations", "mode", "solver"});
        read(p, "pose", "w_g", c.pose.w_g);
        read(p, "pose", "w_t", c.pose.w_t);
        read(p, "pose", "normalize_translations", c.pose.normalize_translations);
        read_enum(p, "pose", "mode", c.pose.mode, tour_mode_from);
        read_enum(p, "pose", "solver", c.pose.solver, solver_from);
    }
    if (j.contains("matching")) {
        const json& m = j.at("matching");
        require_object(m, "matching");
        reject_unknown(m, "matching",
                       {"window", "denominator", "max_keypoints", "fast_threshold", "ratio", "include_hh"});
        read(m, "matching", "window", c.matching.window);
        read_enum(m, "matching", "denominator", c.matching.denominator, denominator_from_string);
        read(m, "matching", "max_keypoints", c.matching.max_keypoints);
        read(m, "matching", "fast_threshold", c.matching.fast_threshold);
        read(m, "matching", "ratio", c.matching.ratio);
        read(m, "matching", "include_hh", c.matching.include_hh);
    }
    if (j.contains("scale")) {
        const json& s = j.at("scale");
        require_object(s, "scale");
        reject_unknown(s, "scale", {"tau", "lambda"});
        read(s, "scale", "tau", c.scale.tau);
        read(s, "scale", "lambda", c.scale.lambda);
    }
    if (j.contains("perturb")) {
        const json& p = j.at("perturb");
        require_object(p, "perturb");
        reject_unknown(p, "perturb", {"mode", "epsilon"});
        read_enum(p, "perturb", "mode", c.perturb.mode, perturb_mode_from_string);
        read(p, "perturb", "epsilon", c.perturb.epsilon);
    }
    if (j.contains("minisplat")) read_minisplat(j.at("minisplat"), "minisplat", c.minisplat);
    return c;
}

} // namespace splatguard
