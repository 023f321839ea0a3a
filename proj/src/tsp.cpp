#include "splatguard/tsp.hpp"

#include "splatguard/error.hpp"
#include "splatguard/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <utility>

namespace splatguard {

void validate_distance_matrix(const DistanceMatrix& m) {
    const int n = m.size();
    for (int i = 0; i < n; ++i) {
        if (m(i, i) != 0.0) throw Error(ErrorKind::InvalidMatrix, "non-zero diagonal at " + std::to_string(i));
        for (int j = 0; j < n; ++j) {
            const double v = m(i, j);
            if (!std::isfinite(v)) throw Error(ErrorKind::InvalidMatrix, "non-finite entry");
            if (v < 0.0) throw Error(ErrorKind::InvalidMatrix, "negative entry");
            if (std::abs(v - m(j, i)) > 1e-9) {
                throw Error(ErrorKind::InvalidMatrix,
                            "asymmetric entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

double route_cost(const DistanceMatrix& m, const std::vector<int>& order, TourMode mode) {
    double c = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) c += m(order[k - 1], order[k]);
    if (mode == TourMode::ClosedTour && order.size() > 1) c += m(order.back(), order.front());
    return c;
}

std::vector<int> nearest_neighbor_route(const DistanceMatrix& m, int start) {
    const int n = m.size();
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    std::vector<int> route{start};
    used[start] = 1;
    int cur = start;
    for (int step = 1; step < n; ++step) {
        int best = -1;
        for (int j = 0; j < n; ++j) {
            if (!used[j] && (best < 0 || m(cur, j) < m(cur, best))) best = j;
        }
        used[best] = 1;
        route.push_back(best);
        cur = best;
    }
    return route;
}

namespace {

// Held-Karp over subsets. Open paths may start anywhere; closed tours start at 0.
std::vector<int> held_karp(const DistanceMatrix& m, TourMode mode) {
    const int n = m.size();
    const std::size_t full = (std::size_t{1} << n) - 1;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dp((full + 1) * n, kInf);
    std::vector<int> parent((full + 1) * n, -1);
    auto at = [n](std::size_t mask, int j) { return mask * n + j; };
    if (mode == TourMode::OpenPath) {
        for (int j = 0; j < n; ++j) dp[at(std::size_t{1} << j, j)] = 0.0;
    } else {
        dp[at(1, 0)] = 0.0;
    }
    for (std::size_t mask = 1; mask <= full; ++mask) {
        for (int j = 0; j < n; ++j) {
            const double cur = dp[at(mask, j)];
            if (!(mask >> j & 1) || cur == kInf) continue;
            for (int k = 0; k < n; ++k) {
                if (mask >> k & 1) continue;
                const std::size_t next = mask | (std::size_t{1} << k);
                const double v = cur + m(j, k);
                if (v < dp[at(next, k)]) {
                    dp[at(next, k)] = v;
                    parent[at(next, k)] = j;
                }
            }
        }
    }
    int end = 0;
    double best = kInf;
    for (int j = 0; j < n; ++j) {
        double v = dp[at(full, j)];
        if (mode == TourMode::ClosedTour) v += m(j, 0);
        if (v < best) {
            best = v;
            end = j;
        }
    }
    std::vector<int> order;
    std::size_t mask = full;
    int j = end;
    while (j >= 0) {
        order.push_back(j);
        const int p = parent[at(mask, j)];
        mask &= ~(std::size_t{1} << j);
        j = p;
    }
    std::reverse(order.begin(), order.end());
    return order;
}

// Array-based tour with position index. Reversal picks the shorter side so a
// move costs O(min(len, n - len)).
class Tour {
public:
    explicit Tour(const std::vector<int>& order) : tour_(order), pos_(order.size()) {
        for (std::size_t i = 0; i < tour_.size(); ++i) pos_[tour_[i]] = static_cast<int>(i);
    }

    int n() const { return static_cast<int>(tour_.size()); }
    int succ(int c) const { return tour_[(pos_[c] + 1) % n()]; }
    int pred(int c) const { return tour_[(pos_[c] + n() - 1) % n()]; }
    int pos(int c) const { return pos_[c]; }
    const std::vector<int>& order() const { return tour_; }

    // Reverses the forward path from city `from` to city `to`.
    void reverse_path(int from, int to) {
        int i = pos_[from];
        int j = pos_[to];
        const int len = (j - i + n()) % n() + 1;
        if (2 * len > n()) {
            // Reversing the complement yields the same cycle, mirrored.
            const int ni = (j + 1) % n();
            const int nj = (i + n() - 1) % n();
            i = ni;
            j = nj;
        }
        int steps = ((j - i + n()) % n() + 1) / 2;
        while (steps-- > 0) {
            std::swap(tour_[i], tour_[j]);
            pos_[tour_[i]] = i;
            pos_[tour_[j]] = j;
            i = (i + 1) % n();
            j = (j + n() - 1) % n();
        }
    }

    // Replaces edges (a,b),(c,d) with (a,c),(b,d). Both edges must be
    // traversed in the same direction (a->b and c->d, or b->a and d->c).
    void exchange(int a, int b, int c, int d) {
        if (succ(a) == b) {
            reverse_path(b, c);
        } else {
            reverse_path(a, d);
        }
    }

private:
    std::vector<int> tour_;
    std::vector<int> pos_;
};

class LinKernighan {
public:
    LinKernighan(const DistanceMatrix& m, const LkOptions& opts) : m_(m), opts_(opts) {
        const int n = m.size();
        const int k = std::min(opts.candidates, n - 1);
        cand_.resize(n);
        for (int i = 0; i < n; ++i) {
            std::vector<int> others;
            for (int j = 0; j < n; ++j)
                if (j != i) others.push_back(j);
            std::stable_sort(others.begin(), others.end(), [&](int a, int b) { return m(i, a) < m(i, b); });
            others.resize(k);
            cand_[i] = std::move(others);
        }
    }

    std::vector<int> improve(std::vector<int> start) {
        Tour tour(start);
        const int n = tour.n();
        if (n < 4) return tour.order();
        std::vector<char> dont_look(n, 0);
        std::deque<int> queue;
        for (int c : tour.order()) queue.push_back(c);
        while (!queue.empty()) {
            const int t1 = queue.front();
            queue.pop_front();
            if (dont_look[t1]) continue;
            bool improved = false;
            for (int side = 0; side < 2 && !improved; ++side) {
                const int t2 = side == 0 ? tour.succ(t1) : tour.pred(t1);
                std::vector<int> touched;
                if (try_from(tour, t1, t2, touched)) {
                    improved = true;
                    for (int c : touched) {
                        if (dont_look[c]) {
                            dont_look[c] = 0;
                            queue.push_back(c);
                        }
                    }
                    queue.push_back(t1);
                }
            }
            if (!improved) dont_look[t1] = 1;
        }
        return tour.order();
    }

private:
    // Edges added by one step, (t1,t4) and (t2,t3); undoing restores (t1,t2),(t4,t3).
    struct Move {
        int t1, t2, t3, t4;
    };

    // Applies the 2-opt step that removes (t1,t2),(t3,t4) and adds (t2,t3),(t4,t1).
    // Returns t4, or -1 when t3 is not a legal choice.
    int step(Tour& tour, int t1, int t2, int t3, std::vector<Move>& moves) const {
        if (t3 == t1 || t3 == t2) return -1;
        const int t4 = partner(tour, t1, t2, t3);
        if (t4 == t2 || t4 == t1) return -1;
        tour.exchange(t1, t2, t4, t3);
        moves.push_back({t1, t2, t3, t4});
        return t4;
    }

    int partner(const Tour& tour, int t1, int t2, int t3) const {
        return tour.succ(t1) == t2 ? tour.pred(t3) : tour.succ(t3);
    }

    void undo(Tour& tour, std::vector<Move>& moves, std::size_t keep) const {
        while (moves.size() > keep) {
            const Move mv = moves.back();
            moves.pop_back();
            tour.exchange(mv.t1, mv.t4, mv.t2, mv.t3);
        }
    }

    // One LK search rooted at edge (t1,t2): full breadth at the first level,
    // greedy (best gain) below. Keeps the best prefix of the move sequence.
    bool try_from(Tour& tour, int t1, int t2_start, std::vector<int>& touched) const {
        constexpr double kEps = 1e-12;
        const double g0 = m_(t1, t2_start);
        std::vector<std::pair<double, int>> first;
        for (int t3 : cand_[t2_start]) {
            if (t3 == t1 || t3 == t2_start) continue;
            const double g1 = g0 - m_(t2_start, t3);
            if (g1 <= kEps) continue;
            const int t4 = partner(tour, t1, t2_start, t3);
            if (t4 == t2_start) continue;
            first.emplace_back(g1 + m_(t3, t4), t3);
        }
        std::stable_sort(first.begin(), first.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

        for (const auto& [unused, t3_first] : first) {
            (void)unused;
            std::vector<Move> moves;
            std::vector<int> path{t1, t2_start};
            double g = g0;
            int t2 = t2_start;
            double best_gain = 0.0;
            std::size_t best_len = 0;
            int t3 = t3_first;
            for (int depth = 0; depth < opts_.max_depth; ++depth) {
                if (depth > 0) {
                    // Greedy choice of the next t3.
                    t3 = -1;
                    double best_score = -std::numeric_limits<double>::infinity();
                    for (int c : cand_[t2]) {
                        if (c == t1 || c == t2) continue;
                        const double g1 = g - m_(t2, c);
                        if (g1 <= kEps) continue;
                        const int t4c = partner(tour, t1, t2, c);
                        if (t4c == t2 || t4c == t1) continue;
                        const double score = g1 + m_(c, t4c);
                        if (score > best_score) {
                            best_score = score;
                            t3 = c;
                        }
                    }
                    if (t3 < 0) break;
                }
                const double g1 = g - m_(t2, t3);
                const int t4 = step(tour, t1, t2, t3, moves);
                if (t4 < 0) break;
                path.push_back(t3);
                path.push_back(t4);
                const double closed = g1 + m_(t3, t4) - m_(t4, t1);
                if (closed > best_gain + kEps) {
                    best_gain = closed;
                    best_len = moves.size();
                }
                g = g1 + m_(t3, t4);
                t2 = t4;
            }
            if (best_len > 0) {
                undo(tour, moves, best_len);
                touched = path;
                return true;
            }
            undo(tour, moves, 0);
        }
        return false;
    }

    const DistanceMatrix& m_;
    LkOptions opts_;
    std::vector<std::vector<int>> cand_;
};

// Moves segments of one to three cities to a cheaper slot, in either
// orientation, until no such move helps.
std::vector<int> or_opt(const DistanceMatrix& m, std::vector<int> tour) {
    constexpr double kEps = 1e-12;
    const int n = static_cast<int>(tour.size());
    if (n < 5) return tour;
    bool improved = true;
    while (improved) {
        improved = false;
        for (int len = 1; len <= 3 && !improved; ++len) {
            for (int i = 0; i < n && !improved; ++i) {
                const int s0 = tour[i];
                const int s1 = tour[(i + len - 1) % n];
                const int prev = tour[(i + n - 1) % n];
                const int next = tour[(i + len) % n];
                const double removed = m(prev, s0) + m(s1, next) - m(prev, next);
                // Remaining cities in cyclic order, starting right after the segment.
                std::vector<int> rest;
                for (int k = 0; k < n - len; ++k) rest.push_back(tour[(i + len + k) % n]);
                for (int k = 0; k + 1 < static_cast<int>(rest.size()) + 1; ++k) {
                    const int a = rest[k];
                    const int b = rest[(k + 1) % rest.size()];
                    if (a == prev && b == next) continue;
                    const double fwd = m(a, s0) + m(s1, b) - m(a, b);
                    const double rev = m(a, s1) + m(s0, b) - m(a, b);
                    if (std::min(fwd, rev) < removed - kEps) {
                        std::vector<int> seg;
                        for (int q = 0; q < len; ++q) seg.push_back(tour[(i + q) % n]);
                        if (rev < fwd) std::reverse(seg.begin(), seg.end());
                        std::vector<int> out(rest.begin(), rest.begin() + k + 1);
                        out.insert(out.end(), seg.begin(), seg.end());
                        out.insert(out.end(), rest.begin() + k + 1, rest.end());
                        tour = std::move(out);
                        improved = true;
                        break;
                    }
                }
            }
        }
    }
    return tour;
}

std::vector<int> double_bridge(const std::vector<int>& tour, Rng& rng) {
    const int n = static_cast<int>(tour.size());
    std::array<int, 3> cut{};
    for (auto& c : cut) c = 1 + static_cast<int>(rng.below(static_cast<unsigned long long>(n - 1)));
    std::sort(cut.begin(), cut.end());
    if (cut[0] == cut[1] || cut[1] == cut[2]) return tour;
    std::vector<int> out(tour.begin(), tour.begin() + cut[0]);
    out.insert(out.end(), tour.begin() + cut[2], tour.end());
    out.insert(out.end(), tour.begin() + cut[1], tour.begin() + cut[2]);
    out.insert(out.end(), tour.begin() + cut[0], tour.begin() + cut[1]);
    return out;
}

std::vector<int> solve_closed_lk(const DistanceMatrix& m, const LkOptions& opts) {
    LinKernighan lk(m, opts);
    const int n = m.size();
    const auto local = [&](std::vector<int> t) { return or_opt(m, lk.improve(std::move(t))); };
    std::vector<int> best;
    double best_cost = std::numeric_limits<double>::infinity();
    const int starts = std::clamp(opts.starts, 1, n);
    for (int s = 0; s < starts; ++s) {
        auto t = local(nearest_neighbor_route(m, s));
        const double c = route_cost(m, t, TourMode::ClosedTour);
        if (c < best_cost - 1e-12) {
            best_cost = c;
            best = std::move(t);
        }
    }
    if (n >= 8) {
        Rng rng(opts.seed);
        for (int k = 0; k < opts.kicks; ++k) {
            auto t = local(double_bridge(best, rng));
            const double c = route_cost(m, t, TourMode::ClosedTour);
            if (c < best_cost - 1e-12) {
                best_cost = c;
                best = std::move(t);
            }
        }
    }
    return best;
}

} // namespace

TspResult solve_tsp(const DistanceMatrix& m, TourMode mode, TspSolver solver, const LkOptions& opts) {
    validate_distance_matrix(m);
    const int n = m.size();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "TSP needs at least two cities");
    const bool exact = solver == TspSolver::Exact || (solver == TspSolver::Auto && n <= kExactLimit);
    if (exact && n > 20) throw Error(ErrorKind::InvalidArgument, "exact solver is limited to 20 cities");

    TspResult r;
    r.exact = exact;
    if (exact) {
        r.order = held_karp(m, mode);
    } else if (mode == TourMode::ClosedTour) {
        r.order = solve_closed_lk(m, opts);
    } else {
        // Dummy city n at zero distance from all others turns the open path
        // into a closed tour; cutting at the dummy recovers the path.
        DistanceMatrix ext(n + 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) ext(i, j) = m(i, j);
        const std::vector<int> tour = solve_closed_lk(ext, opts);
        const auto it = std::find(tour.begin(), tour.end(), n);
        r.order.assign(it + 1, tour.end());
        r.order.insert(r.order.end(), tour.begin(), it);
    }
    if (mode == TourMode::ClosedTour) {
        // Canonical rotation: start at city 0.
        const auto it = std::find(r.order.begin(), r.order.end(), 0);
        std::rotate(r.order.begin(), it, r.order.end());
    }
    r.cost = route_cost(m, r.order, mode);
    return r;
}

Trajectory order_trajectory(const std::vector<CameraPose>& poses, const DistanceMatrix& m, TourMode mode,
                            TspSolver solver) {
    if (static_cast<int>(poses.size()) != m.size()) {
        throw Error(ErrorKind::DimensionMismatch, "pose count does not match matrix size");
    }
    const TspResult r = solve_tsp(m, mode, solver);
    Trajectory t;
    t.indices = r.order;
    t.total_cost = r.cost;
    t.mode = mode;
    t.exact = r.exact;
    for (int i : r.order) t.order.push_back(poses[i].view_id);
    return t;
}

} // namespace splatguard
