#pragma once

#include "splatguard/gsply.hpp"
#include "splatguard/matching.hpp"
#include "splatguard/minisplat.hpp"
#include "splatguard/perturb.hpp"
#include "splatguard/pose.hpp"
#include "splatguard/tsp.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace splatguard {

struct PoseConfig {
    double w_g = 1.0;
    double w_t = 1.0;
    bool normalize_translations = false;
    TourMode mode = TourMode::OpenPath;
    TspSolver solver = TspSolver::Auto;
};

struct MatchConfig {
    int window = 3;
    RateDenominator denominator = RateDenominator::Max;
    int max_keypoints = 500;
    double fast_threshold = 0.06;
    double ratio = 0.8;
    bool include_hh = false;
};

struct ScaleConfig {
    double tau = kDefaultTau;
    double lambda = kDefaultLambdaScale;
};

struct PerturbConfig {
    PerturbMode mode = PerturbMode::Uniform;
    double epsilon = kDefaultEpsilon;
};

enum class SceneKind { Smooth, ThinBar };
enum class Experiment { Fit, DefenseAB };

struct MiniSplatConfig {
    Experiment experiment = Experiment::Fit;
    SceneKind scene = SceneKind::Smooth;
    int gaussians = 64;
    int width = 64;
    int height = 64;
    int views = 4;
    double view_shift = 2.0; // pixels between neighbouring view offsets
    TrainConfig train{};
    std::array<double, 3> background{0.0, 0.0, 0.0};
};

/// Every tunable of a run. Serialized verbatim into each report.
struct RunConfig {
    std::uint64_t seed = 0;
    std::string out = "out";
    int jobs = 0; // 0 = OpenMP default
    int wavelet_level = 1;
    PoseConfig pose{};
    MatchConfig matching{};
    ScaleConfig scale{};
    PerturbConfig perturb{};
    MiniSplatConfig minisplat{};

    /// Throws InvalidConfig naming the offending field.
    void validate() const;

    MatchingOptions matching_options() const;
    PoseLossWeights pose_weights() const;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);

/// Overlays the keys present in `j` onto `base`. Unknown keys and wrongly
/// typed values throw InvalidConfig with the dotted field path.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});

} // namespace splatguard
