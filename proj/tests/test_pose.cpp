#include "doctest.h"

#include "splatguard/error.hpp"
#include "splatguard/numeric.hpp"
#include "splatguard/pose.hpp"
#include "splatguard/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace splatguard;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Textbook unit-quaternion to rotation-matrix expansion.
Eigen::Matrix3d quat_oracle(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n, x /= n, y /= n, z /= n;
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

CameraPose random_pose(Rng& rng, int i) {
    CameraPose p;
    p.rotation = rotation_from_quaternion(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    p.translation = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    p.view_id = "v" + std::to_string(i);
    return p;
}

DistanceMatrix random_metric(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<double, double>> pts(n);
    for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
    DistanceMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
    return m;
}

double brute_force(const DistanceMatrix& m, TourMode mode) {
    std::vector<int> perm(m.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        if (mode == TourMode::ClosedTour && perm[0] != 0) break;
        best = std::min(best, route_cost(m, perm, mode));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no splatguard::Error thrown");
    return ErrorKind::IoError;
}

} // namespace

TEST_CASE("pose: quaternion conversion matches the closed-form expansion") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const double w = rng.normal(), x = rng.normal(), y = rng.normal(), z = rng.normal();
        CHECK((rotation_from_quaternion(w, x, y, z) - quat_oracle(w, x, y, z)).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK(kind_of([] { rotation_from_quaternion(0, 0, 0, 0); }) == ErrorKind::InvalidPose);
    CHECK(rotation_from_quaternion(2, 0, 0, 0).isIdentity(1e-15));
}

TEST_CASE("pose: geodesic loss recovers the rotation angle") {
    for (double angle : {0.0, 0.1, 1.0, 2.5, kPi}) {
        CameraPose a, b;
        b.rotation = rotation_from_quaternion(std::cos(angle / 2), 0, 0, std::sin(angle / 2));
        CHECK(geodesic_loss(a, b) == doctest::Approx(angle).epsilon(1e-7));
    }
    CameraPose a, b;
    a.translation = {1, 2, 3};
    b.translation = {2, 0, 3};
    CHECK(translation_loss(a, b) == doctest::Approx(5.0));
}

TEST_CASE("pose: geodesic is a metric on random rotations") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const CameraPose a = random_pose(rng, 0), b = random_pose(rng, 1), c = random_pose(rng, 2);
        const double ab = geodesic_loss(a, b), bc = geodesic_loss(b, c), ac = geodesic_loss(a, c);
        CHECK(ab >= 0.0);
        CHECK(ab <= kPi + 1e-12);
        CHECK(ab == doctest::Approx(geodesic_loss(b, a)).epsilon(1e-12));
        CHECK(ac <= ab + bc + 1e-9);
        CHECK(geodesic_loss(a, a) == doctest::Approx(0.0).epsilon(1e-6));
    }
}

TEST_CASE("pose: loss matrix is symmetric, weighted, and matches the serial reference") {
    Rng rng(5);
    std::vector<CameraPose> poses;
    for (int i = 0; i < 9; ++i) poses.push_back(random_pose(rng, i));
    const PoseLossWeights w{0.7, 2.0};
    const DistanceMatrix m = pose_loss_matrix(poses, w);
    CHECK(m == reference::pose_loss_matrix(poses, w));
    for (int i = 0; i < 9; ++i) {
        CHECK(m(i, i) == 0.0);
        for (int j = 0; j < 9; ++j) {
            CHECK(m(i, j) == m(j, i));
            if (i != j)
                CHECK(m(i, j) == doctest::Approx(0.7 * geodesic_loss(poses[i], poses[j]) +
                                                 2.0 * translation_loss(poses[i], poses[j])));
        }
    }
    CHECK_NOTHROW(validate_distance_matrix(m));
    CHECK(kind_of([&] { pose_loss_matrix({poses[0]}, w); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { pose_loss_matrix(poses, {-1.0, 1.0}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("pose: translation normalization gives unit RMS and keeps coincident sets") {
    Rng rng(8);
    std::vector<CameraPose> poses;
    for (int i = 0; i < 6; ++i) poses.push_back(random_pose(rng, i));
    const auto n = normalize_translations(poses);
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : n) centroid += p.translation;
    centroid /= 6.0;
    double ms = 0.0;
    for (const auto& p : n) ms += (p.translation - centroid).squaredNorm();
    CHECK(std::sqrt(ms / 6.0) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<CameraPose> same(3);
    for (auto& p : same) p.translation = {1, 1, 1};
    CHECK(normalize_translations(same)[2].translation == Eigen::Vector3d(1, 1, 1));
}

TEST_CASE("pose: validation rejects reflections and skew") {
    CameraPose p;
    p.rotation(0, 0) = -1.0;
    CHECK(kind_of([&] { validate_pose(p); }) == ErrorKind::InvalidPose);
    p.rotation = Eigen::Matrix3d::Identity();
    p.rotation(0, 1) = 0.1;
    CHECK(kind_of([&] { validate_pose(p); }) == ErrorKind::InvalidPose);
}

TEST_CASE("colmap: parses poses with comments and empty point lines") {
    const std::string text =
        "# Image list with two lines of data per image:\n"
        "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n"
        "1 1 0 0 0 0.5 -1 2 1 a b.png\n"
        "\n"
        "2 0 0 0 1 3 4 5 1 c.png\n"
        "10.0 20.0 -1 30.5 40.5 7\n";
    const auto poses = parse_colmap_images(text);
    REQUIRE(poses.size() == 2);
    CHECK(poses[0].view_id == "a b.png");
    CHECK(poses[0].translation == Eigen::Vector3d(0.5, -1, 2));
    CHECK(poses[1].rotation.isApprox(quat_oracle(0, 0, 0, 1)));
    CHECK(parse_colmap_images("# nothing\n").empty());
}

TEST_CASE("colmap: malformed files raise schema errors with a line number") {
    const auto message = [](const std::string& text) {
        try {
            parse_colmap_images(text);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::SchemaError);
            return std::string(e.what());
        }
        FAIL("no error");
        return std::string();
    };
    CHECK(message("1 1 0 0 x 0 0 0 1 a.png\n\n").find("line 1") != std::string::npos);
    CHECK(message("# c\n1 1 0 0 0 0 0 0 1\n\n").find("line 2") != std::string::npos);
    CHECK(message("1 1 0 0 0 0 0 0 1 a.png\n\n2 1 0 0 0 0 0 0 1 a.png\n\n").find("duplicate") != std::string::npos);
    CHECK(message("1 0 0 0 0 0 0 0 1 a.png\n\n").find("line 1") != std::string::npos);
    CHECK(kind_of([] { load_colmap_images("/nonexistent/images.txt"); }) == ErrorKind::FileNotFound);
}

TEST_CASE("tsp: exact solver equals brute force on n = 8") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const DistanceMatrix m = random_metric(8, seed);
        for (TourMode mode : {TourMode::OpenPath, TourMode::ClosedTour}) {
            const TspResult r = solve_tsp(m, mode, TspSolver::Exact);
            CHECK(r.exact);
            CHECK(r.cost == doctest::Approx(brute_force(m, mode)).epsilon(1e-12));
            CHECK(r.cost == doctest::Approx(route_cost(m, r.order, mode)).epsilon(1e-12));
            std::vector<int> sorted = r.order;
            std::sort(sorted.begin(), sorted.end());
            for (int i = 0; i < 8; ++i) CHECK(sorted[i] == i);
        }
    }
}

TEST_CASE("tsp: heuristic never loses to nearest neighbour on n = 50") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const DistanceMatrix m = random_metric(50, 100 + seed);
        for (TourMode mode : {TourMode::OpenPath, TourMode::ClosedTour}) {
            const TspResult r = solve_tsp(m, mode);
            CHECK(!r.exact);
            CHECK(r.order.size() == 50);
            double nn = 1e300;
            for (int s = 0; s < 50; ++s) nn = std::min(nn, route_cost(m, nearest_neighbor_route(m, s), mode));
            CHECK(r.cost <= nn + 1e-12);
            CHECK(r.order == solve_tsp(m, mode).order);
        }
    }
}

TEST_CASE("tsp: reversal of an open path keeps its cost, two cities are trivial") {
    const DistanceMatrix m = random_metric(7, 9);
    const TspResult r = solve_tsp(m, TourMode::OpenPath);
    std::vector<int> rev(r.order.rbegin(), r.order.rend());
    CHECK(route_cost(m, rev, TourMode::OpenPath) == doctest::Approx(r.cost));
    DistanceMatrix two(2);
    two(0, 1) = two(1, 0) = 3.0;
    CHECK(solve_tsp(two, TourMode::OpenPath).cost == 3.0);
    CHECK(solve_tsp(two, TourMode::ClosedTour).cost == 6.0);
    CHECK(kind_of([] { solve_tsp(DistanceMatrix(1), TourMode::OpenPath); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("tsp: invalid matrices are rejected") {
    DistanceMatrix m = random_metric(4, 1);
    m(0, 1) += 1e-6;
    CHECK(kind_of([&] { validate_distance_matrix(m); }) == ErrorKind::InvalidMatrix);
    m = random_metric(4, 1);
    m(2, 2) = 0.5;
    CHECK(kind_of([&] { validate_distance_matrix(m); }) == ErrorKind::InvalidMatrix);
    m = random_metric(4, 1);
    m(1, 3) = m(3, 1) = -1;
    CHECK(kind_of([&] { validate_distance_matrix(m); }) == ErrorKind::InvalidMatrix);
    m(1, 3) = m(3, 1) = std::nan("");
    CHECK(kind_of([&] { validate_distance_matrix(m); }) == ErrorKind::InvalidMatrix);
}

TEST_CASE("trajectory: view names follow the solved order") {
    Rng rng(4);
    std::vector<CameraPose> poses;
    for (int i = 0; i < 5; ++i) poses.push_back(random_pose(rng, i));
    const DistanceMatrix m = pose_loss_matrix(poses, {});
    const Trajectory t = order_trajectory(poses, m);
    CHECK(t.exact);
    REQUIRE(t.order.size() == 5);
    for (int k = 0; k < 5; ++k) CHECK(t.order[k] == poses[t.indices[k]].view_id);
    CHECK(t.total_cost == doctest::Approx(brute_force(m, TourMode::OpenPath)));
    CHECK(kind_of([&] { order_trajectory(poses, DistanceMatrix(4)); }) == ErrorKind::DimensionMismatch);
}
