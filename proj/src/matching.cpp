#include "splatguard/matching.hpp"

#include "splatguard/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace splatguard {

std::string_view to_string(RateDenominator d) {
    switch (d) {
    case RateDenominator::Max: return "max";
    case RateDenominator::Min: return "min";
    case RateDenominator::Mean: return "mean";
    }
    return "?";
}

RateDenominator denominator_from_string(std::string_view s) {
    if (s == "max") return RateDenominator::Max;
    if (s == "min") return RateDenominator::Min;
    if (s == "mean") return RateDenominator::Mean;
    throw Error(ErrorKind::InvalidArgument, "unknown rate denominator '" + std::string(s) + "'");
}

double pair_rate(const PairStats& p, RateDenominator denom) {
    if (p.extracted_i <= 0 || p.extracted_j <= 0) {
        throw Error(ErrorKind::InvalidArgument, "pair rate undefined without keypoints on both sides");
    }
    double d = 0.0;
    switch (denom) {
    case RateDenominator::Max: d = static_cast<double>(std::max(p.extracted_i, p.extracted_j)); break;
    case RateDenominator::Min: d = static_cast<double>(std::min(p.extracted_i, p.extracted_j)); break;
    case RateDenominator::Mean: d = 0.5 * static_cast<double>(p.extracted_i + p.extracted_j); break;
    }
    return static_cast<double>(p.matched) / d;
}

RateSummary aggregate_rate(const std::vector<PairStats>& pairs, RateDenominator denom) {
    RateSummary s;
    double sum = 0.0;
    for (const auto& p : pairs) {
        if (p.extracted_i <= 0 || p.extracted_j <= 0) {
            ++s.pairs_excluded;
            continue;
        }
        sum += pair_rate(p, denom);
        ++s.pairs_used;
    }
    if (s.pairs_used == 0) throw Error(ErrorKind::AllPairsDegenerate, "no pair has keypoints on both sides");
    s.rate = sum / s.pairs_used;
    return s;
}

std::vector<std::pair<int, int>> window_pairs(int n, int window) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j <= std::min(n - 1, i + window); ++j) out.emplace_back(i, j);
    }
    return out;
}

Image matcher_input(const Decomposition& d, Subband band) {
    return quantize_8bit(subband_to_image(gather_band(d, band)).image);
}

namespace {

void check_inputs(const std::vector<Image>& images, const std::vector<std::string>& names, const MatchingOptions& opts) {
    if (images.size() < 2) throw Error(ErrorKind::EmptyTrajectory, "matching needs at least two views");
    if (names.size() != images.size()) throw Error(ErrorKind::DimensionMismatch, "one name per image required");
    if (opts.window < 1) throw Error(ErrorKind::InvalidArgument, "window must be >= 1");
}

std::vector<KeypointSet> detect_all(const std::vector<Decomposition>& decs, const std::vector<std::string>& names,
                                    Subband band, const MatchingOptions& opts) {
    const int n = static_cast<int>(decs.size());
    std::vector<KeypointSet> sets(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        sets[i] = detect_and_describe(matcher_input(decs[i], band), opts.detector);
        sets[i].source_view = names[i];
    }
    return sets;
}

BandReport match_band(const std::vector<KeypointSet>& sets, Subband band, const MatchingOptions& opts) {
    const int n = static_cast<int>(sets.size());
    const auto pairs = window_pairs(n, opts.window);
    BandReport r;
    r.band = band;
    r.pairs.resize(pairs.size());
    const int np = static_cast<int>(pairs.size());
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < np; ++k) {
        const auto [i, j] = pairs[k];
        PairStats& p = r.pairs[k];
        p.view_i = sets[i].source_view;
        p.view_j = sets[j].source_view;
        p.extracted_i = static_cast<long long>(sets[i].size());
        p.extracted_j = static_cast<long long>(sets[j].size());
        p.matched = static_cast<long long>(match_pair(sets[i], sets[j], opts.matcher).size());
    }
    for (const auto& s : sets)
        if (s.empty()) r.empty_views.push_back(s.source_view);
    return r;
}

std::vector<Decomposition> decompose_all(const std::vector<Image>& images) {
    std::vector<Decomposition> decs(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) decs[i] = dwt2(images[i]);
    return decs;
}

} // namespace

BandReport matching_rate(const std::vector<Image>& ordered_images, const std::vector<std::string>& names,
                         Subband band, const MatchingOptions& opts) {
    check_inputs(ordered_images, names, opts);
    const auto decs = decompose_all(ordered_images);
    BandReport r = match_band(detect_all(decs, names, band, opts), band, opts);
    r.summary = aggregate_rate(r.pairs, opts.denominator);
    return r;
}

MatchReport build_match_report(const std::vector<Image>& ordered_images, const std::vector<std::string>& names,
                               const MatchingOptions& opts) {
    check_inputs(ordered_images, names, opts);
    MatchReport report;
    report.trajectory = names;
    report.window = opts.window;
    report.denominator = opts.denominator;
    report.max_keypoints = opts.detector.max_keypoints;

    const auto decs = decompose_all(ordered_images);
    std::vector<Subband> bands{Subband::LL, Subband::LH, Subband::HL};
    if (opts.include_hh) bands.push_back(Subband::HH);
    for (Subband b : bands) {
        BandReport r = match_band(detect_all(decs, names, b, opts), b, opts);
        try {
            r.summary = aggregate_rate(r.pairs, opts.denominator);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::AllPairsDegenerate) throw;
            report.warnings.push_back(std::string(to_string(b)) + ": every pair is degenerate (no keypoints)");
        }
        if (!r.empty_views.empty()) {
            report.warnings.push_back(std::string(to_string(b)) + ": " + std::to_string(r.empty_views.size()) +
                                      " view(s) without keypoints");
        }
        report.bands.emplace(b, std::move(r));
    }
    const auto& lh = report.bands.at(Subband::LH).summary;
    const auto& hl = report.bands.at(Subband::HL).summary;
    if (lh && hl) report.high_rate = 0.5 * (lh->rate + hl->rate);
    return report;
}

std::vector<PairStats> parse_match_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int no = 0;
    bool header_seen = false;
    std::vector<PairStats> out;
    const auto fail = [&](ErrorKind k, const std::string& msg) {
        throw Error(k, "match CSV line " + std::to_string(no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (no == 1 && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // BOM
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (!header_seen) {
            if (line != "view_a,view_b,extracted_a,extracted_b,matched") {
                fail(ErrorKind::SchemaError, "expected header view_a,view_b,extracted_a,extracted_b,matched");
            }
            header_seen = true;
            continue;
        }
        if (cells.size() != 5) fail(ErrorKind::SchemaError, "expected 5 fields, got " + std::to_string(cells.size()));
        PairStats p;
        p.view_i = cells[0];
        p.view_j = cells[1];
        if (p.view_i.empty() || p.view_j.empty()) fail(ErrorKind::SchemaError, "empty view name");
        long long vals[3];
        for (int k = 0; k < 3; ++k) {
            const std::string& c = cells[2 + k];
            std::size_t used = 0;
            try {
                vals[k] = std::stoll(c, &used);
            } catch (const std::exception&) {
                fail(ErrorKind::SchemaError, "field '" + c + "' is not an integer");
            }
            if (used != c.size()) fail(ErrorKind::SchemaError, "field '" + c + "' is not an integer");
            if (vals[k] < 0) fail(ErrorKind::NegativeCount, "negative count " + c);
        }
        p.extracted_i = vals[0];
        p.extracted_j = vals[1];
        p.matched = vals[2];
        if (p.matched > std::min(p.extracted_i, p.extracted_j)) {
            fail(ErrorKind::MatchedExceedsExtracted, "matched exceeds extracted keypoints");
        }
        out.push_back(std::move(p));
    }
    if (out.empty()) throw Error(ErrorKind::EmptyTrajectory, "match CSV contains no pairs");
    return out;
}

std::vector<PairStats> ingest_matches(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_match_csv(ss.str());
}

} // namespace splatguard
