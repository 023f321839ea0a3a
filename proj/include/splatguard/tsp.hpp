#pragma once

#include "splatguard/pose.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace splatguard {

enum class TourMode { OpenPath, ClosedTour };

enum class TspSolver {
    Auto,          // exact for n <= kExactLimit, Lin-Kernighan otherwise
    Exact,         // Held-Karp dynamic program
    LinKernighan,  // multi-start LK-style improvement with Or-opt and double-bridge kicks
};

inline constexpr int kExactLimit = 10;

struct LkOptions {
    int max_depth = 5;
    int candidates = 8;
    int starts = 10;   // nearest-neighbour starts (capped at n)
    int kicks = 100;   // double-bridge perturbations of the best tour
    std::uint64_t seed = 0;
};

struct TspResult {
    std::vector<int> order;
    double cost = 0.0;
    bool exact = false;
};

/// Throws InvalidMatrix for asymmetry beyond 1e-9, negative or non-finite
/// entries, or a non-zero diagonal.
void validate_distance_matrix(const DistanceMatrix& m);

/// Sum of consecutive entries along order; closed tours include the wrap edge.
double route_cost(const DistanceMatrix& m, const std::vector<int>& order, TourMode mode);

/// Greedy nearest-neighbour route from start (ties go to the lower index).
std::vector<int> nearest_neighbor_route(const DistanceMatrix& m, int start);

/// Minimum Hamiltonian path (open) or cycle (closed). Deterministic.
TspResult solve_tsp(const DistanceMatrix& m, TourMode mode, TspSolver solver = TspSolver::Auto,
                    const LkOptions& opts = {});

/// TSP-ordered camera trajectory over pose-loss distances.
struct Trajectory {
    std::vector<std::string> order;
    std::vector<int> indices;
    double total_cost = 0.0;
    TourMode mode = TourMode::OpenPath;
    bool exact = false;
};

Trajectory order_trajectory(const std::vector<CameraPose>& poses, const DistanceMatrix& m,
                            TourMode mode = TourMode::OpenPath, TspSolver solver = TspSolver::Auto);

} // namespace splatguard
