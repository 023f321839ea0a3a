#pragma once

#include "splatguard/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace splatguard::cli {

struct Io {
    std::ostream& out;
    std::ostream& err;
};

struct DefendArgs {
    std::filesystem::path dataset;
};

struct PerturbArgs {
    std::filesystem::path dataset;
};

struct OrderArgs {
    std::filesystem::path poses;
};

struct AnalyzeArgs {
    std::filesystem::path dataset;
    std::filesystem::path poses;
    std::optional<std::filesystem::path> matches;
    std::optional<std::filesystem::path> compare;
    int grid_views = 4;
};

struct ScaleLossArgs {
    std::filesystem::path ply;
    bool write_nu_csv = true;
};

int cmd_defend(const DefendArgs& a, const RunConfig& cfg, Io io);
int cmd_perturb(const PerturbArgs& a, const RunConfig& cfg, Io io);
int cmd_order(const OrderArgs& a, const RunConfig& cfg, Io io);
int cmd_analyze(const AnalyzeArgs& a, const RunConfig& cfg, Io io);
int cmd_scaleloss(const ScaleLossArgs& a, const RunConfig& cfg, Io io);
int cmd_minisplat(const RunConfig& cfg, Io io);

} // namespace splatguard::cli
