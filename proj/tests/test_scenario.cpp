#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "uavbeam/scenario.hpp"

using namespace uavbeam;

namespace {
ScenarioConfig paper_config() {
    ScenarioConfig c;
    c.k = 10;
    c.radius = 100.0;
    c.speed_min = 18.0;
    c.speed_max = 20.0;
    return c;
}
}  // namespace

TEST_CASE("initial states sit on the hemisphere with the configured speed band") {
    auto cfg = paper_config();
    std::mt19937_64 rng(7);
    const auto states = generate_initial_states(cfg, rng);
    REQUIRE(states.size() == 10);
    for (const auto& s : states) {
        CHECK(s.p.norm() == Catch::Approx(100.0).margin(1e-9));
        CHECK(s.p.z() > 0.0);
        CHECK(s.v.norm() >= 18.0);
        CHECK(s.v.norm() <= 20.0);
        CHECK(s.a.norm() == 0.0);
    }
}

TEST_CASE("zero jitter heads exactly toward the BS") {
    auto cfg = paper_config();
    cfg.k = 1;
    cfg.heading_azimuth_jitter_deg = 0.0;
    cfg.heading_elevation_jitter_deg = 0.0;
    cfg.speed_min = cfg.speed_max = 20.0;
    // Pin the position by drawing many and checking the heading relation for each.
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const auto s = generate_initial_states(cfg, rng)[0];
        const Eigen::Vector2d horiz{s.p.x(), s.p.y()};
        const Eigen::Vector2d vel{s.v.x(), s.v.y()};
        CHECK(vel.norm() == Catch::Approx(20.0).margin(1e-12));
        CHECK(vel.dot(horiz.normalized()) == Catch::Approx(-20.0).margin(1e-9));
        CHECK(s.v.z() == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("altitude band restricts the draw without leaving the sphere") {
    auto cfg = paper_config();
    cfg.altitude_band = {{20.0, 30.0}};
    std::mt19937_64 rng(11);
    for (const auto& s : generate_initial_states(cfg, rng)) {
        CHECK(s.p.z() >= 20.0);
        CHECK(s.p.z() <= 30.0);
        CHECK(s.p.norm() == Catch::Approx(100.0).margin(1e-9));
    }
}

TEST_CASE("generation rejects bad configs") {
    auto cfg = paper_config();
    std::mt19937_64 rng(1);
    cfg.k = 0;
    CHECK_THROWS_AS(generate_initial_states(cfg, rng), std::invalid_argument);
    cfg = paper_config();
    cfg.radius = 0.0;
    CHECK_THROWS_AS(generate_initial_states(cfg, rng), std::invalid_argument);
}

TEST_CASE("fixed seed reproduces the state list bit-for-bit") {
    auto cfg = paper_config();
    std::mt19937_64 a(42), b(42);
    const auto s1 = generate_initial_states(cfg, a);
    const auto s2 = generate_initial_states(cfg, b);
    for (int i = 0; i < cfg.k; ++i) {
        CHECK(s1[i].p == s2[i].p);
        CHECK(s1[i].v == s2[i].v);
    }
}

TEST_CASE("noise-free evolution follows the transition matrix") {
    const ProcessNoise off{0.0, 0.0, 0.0};
    const Vector9d z = Vector9d::Zero();

    UavState x;
    x.p = {0.0, 0.0, 10.0};
    x.v = {1.0, 0.0, 0.0};
    auto next = evolve_state(x, 1.0, off, z);
    CHECK(next.p.isApprox(Eigen::Vector3d{1.0, 0.0, 10.0}, 1e-15));
    CHECK(next.v.isApprox(x.v, 1e-15));

    // Position/acceleration coupling is dt/2 in this model variant.
    UavState y;
    y.p = {0.0, 0.0, 10.0};
    y.a = {2.0, 0.0, 0.0};
    next = evolve_state(y, 1.0, off, z);
    CHECK(next.p.x() == Catch::Approx(1.0).margin(1e-15));
    CHECK(next.v.x() == Catch::Approx(2.0).margin(1e-15));
}

TEST_CASE("noise-free evolution is linear") {
    const ProcessNoise off{0.0, 0.0, 0.0};
    const Vector9d z = Vector9d::Zero();
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        Vector9d a, b;
        for (int i = 0; i < 9; ++i) {
            a(i) = n(rng);
            b(i) = n(rng);
        }
        a(2) += 100.0;  // keep well above the reflection floor
        b(2) += 100.0;
        const double alpha = 0.7, beta = -1.3;
        const Vector9d combo = alpha * a + beta * b;
        const auto ea = evolve_state(UavState::from_vector(a), 0.02, off, z, -1e9).to_vector();
        const auto eb = evolve_state(UavState::from_vector(b), 0.02, off, z, -1e9).to_vector();
        const auto ec =
            evolve_state(UavState::from_vector(combo), 0.02, off, z, -1e9).to_vector();
        CHECK((ec - (alpha * ea + beta * eb)).norm() < 1e-9);
    }
}

TEST_CASE("process noise injects the configured position std") {
    ProcessNoise q{0.5, 0.0, 0.0};
    UavState x;
    x.p = {0.0, 0.0, 100.0};
    std::mt19937_64 rng(17);
    const int reps = 10000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < reps; ++i) {
        const auto nx = evolve_state(x, 1.0, q, rng);
        sum += nx.p.x();
        sumsq += nx.p.x() * nx.p.x();
    }
    const double mean = sum / reps;
    const double stdev = std::sqrt(sumsq / reps - mean * mean);
    CHECK(stdev == Catch::Approx(0.5).epsilon(0.05));
}

TEST_CASE("altitude floor reflects vertical motion") {
    const ProcessNoise off{0.0, 0.0, 0.0};
    UavState x;
    x.p = {50.0, 0.0, 1.5};
    x.v = {0.0, 0.0, -40.0};  // would cross to z = 0.7
    const auto next = evolve_state(x, 0.02, off, Vector9d::Zero(), 1.0);
    CHECK(next.p.z() == Catch::Approx(1.3).margin(1e-12));
    CHECK(next.v.z() == Catch::Approx(40.0).margin(1e-12));
}

TEST_CASE("true observables match the closed forms") {
    UavState x;
    x.p = {150.0, 0.0, 0.0};
    x.v = {0.0, 10.0, 0.0};  // perpendicular to p
    auto o = true_observables(x, 28e9);
    CHECK(o.tau == Catch::Approx(1.0e-6).margin(1e-18));  // 2*150/3e8
    CHECK(o.d == Catch::Approx(150.0));
    CHECK(o.gamma == Catch::Approx(0.0).margin(1e-9));

    x.p = {100.0, 0.0, 0.0};
    x.v = {30.0, 0.0, 0.0};
    o = true_observables(x, 28e9);
    CHECK(o.gamma == Catch::Approx(2800.0).margin(1e-9));
    CHECK(o.mu == Catch::Approx(5600.0).margin(1e-9));
    CHECK(o.tau * kSpeedOfLight / 2.0 == Catch::Approx(o.d).margin(1e-12));

    UavState degenerate;
    CHECK_THROWS_AS(true_observables(degenerate, 28e9), std::invalid_argument);
}

TEST_CASE("angles stay in their ranges along random trajectories") {
    auto cfg = paper_config();
    std::mt19937_64 rng(23);
    auto states = generate_initial_states(cfg, rng);
    for (int slot = 0; slot < 200; ++slot) {
        for (auto& s : states) {
            s = evolve_state(s, cfg.slot, cfg.process_noise, rng);
            const auto o = true_observables(s, 28e9);
            CHECK(o.theta > 0.0);
            CHECK(o.theta <= kPi / 2.0);
            CHECK(o.phi > -kPi);
            CHECK(o.phi <= kPi);
        }
    }
}
