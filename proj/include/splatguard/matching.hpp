#pragma once

#include "splatguard/features.hpp"
#include "splatguard/image.hpp"
#include "splatguard/wavelet.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace splatguard {

/// Whose keypoint count divides the match count of a pair.
enum class RateDenominator { Max, Min, Mean };

std::string_view to_string(RateDenominator d);
RateDenominator denominator_from_string(std::string_view s);

struct PairStats {
    std::string view_i;
    std::string view_j;
    long long extracted_i = 0;
    long long extracted_j = 0;
    long long matched = 0;

    friend bool operator==(const PairStats&, const PairStats&) = default;
};

/// matched / denominator(extracted_i, extracted_j). Requires both counts > 0.
double pair_rate(const PairStats& p, RateDenominator denom);

struct RateSummary {
    double rate = 0.0;       // unweighted mean over usable pairs
    int pairs_used = 0;
    int pairs_excluded = 0;  // pairs where either side extracted nothing
};

/// Throws AllPairsDegenerate when no pair has keypoints on both sides.
RateSummary aggregate_rate(const std::vector<PairStats>& pairs, RateDenominator denom);

struct MatchingOptions {
    int window = 3;
    RateDenominator denominator = RateDenominator::Max;
    DetectorParams detector{};
    MatchParams matcher{};
    bool include_hh = false;
};

struct BandReport {
    Subband band = Subband::LL;
    std::optional<RateSummary> summary; // empty when every pair was degenerate
    std::vector<PairStats> pairs;
    std::vector<std::string> empty_views; // views with zero keypoints
};

struct MatchReport {
    std::vector<std::string> trajectory;
    int window = 0;
    RateDenominator denominator = RateDenominator::Max;
    int max_keypoints = 0;
    std::map<Subband, BandReport> bands;
    /// Mean of the LH and HL rates, when both are defined.
    std::optional<double> high_rate;
    std::vector<std::string> warnings;
};

/// Matches view order[i] against order[i+1 .. i+window] on the subband
/// visualization images of `band` (8-bit quantized, as fed to a matcher).
/// Throws EmptyTrajectory for fewer than two images, AllPairsDegenerate when
/// no pair has keypoints on both sides.
BandReport matching_rate(const std::vector<Image>& ordered_images, const std::vector<std::string>& names,
                         Subband band, const MatchingOptions& opts = {});

/// LL, LH, HL (and HH on request) rates plus the averaged high-frequency
/// rate. Degenerate bands are recorded as warnings instead of thrown.
MatchReport build_match_report(const std::vector<Image>& ordered_images, const std::vector<std::string>& names,
                               const MatchingOptions& opts = {});

/// The image the matcher sees for one subband: min-max visualization of the
/// level-1 band, quantized to 8 bits.
Image matcher_input(const Decomposition& d, Subband band);

/// Every (i, j) index pair with i < j <= i + window.
std::vector<std::pair<int, int>> window_pairs(int n, int window);

/// External match CSV: header `view_a,view_b,extracted_a,extracted_b,matched`.
/// Throws SchemaError (with line number), NegativeCount,
/// MatchedExceedsExtracted, or EmptyTrajectory for a file without rows.
std::vector<PairStats> ingest_matches(const std::filesystem::path& path);
std::vector<PairStats> parse_match_csv(const std::string& text);

} // namespace splatguard
