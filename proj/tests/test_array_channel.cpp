#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "uavbeam/array_channel.hpp"

using namespace uavbeam;

TEST_CASE("steering vector closed forms") {
    SECTION("single antenna") {
        const auto a = steering_vector(0.3, 0.7, {1, 1});
        REQUIRE(a.size() == 1);
        CHECK(a(0) == std::complex<double>(1.0, 0.0));
    }
    SECTION("zero elevation kills the phase") {
        const auto a = steering_vector(1.1, 0.0, {4, 4});
        for (int i = 0; i < 16; ++i) {
            CHECK(a(i).real() == Catch::Approx(0.25).margin(1e-15));
            CHECK(a(i).imag() == Catch::Approx(0.0).margin(1e-15));
        }
    }
    SECTION("2x2 broadside") {
        const auto a = steering_vector(0.0, kPi / 2.0, {2, 2});
        const double expect[] = {0.5, -0.5, 0.5, -0.5};
        for (int i = 0; i < 4; ++i) {
            CHECK(a(i).real() == Catch::Approx(expect[i]).margin(1e-12));
            CHECK(a(i).imag() == Catch::Approx(0.0).margin(1e-12));
        }
    }
}

TEST_CASE("steering vectors have unit norm everywhere") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uphi(-kPi, kPi), utheta(0.0, kPi / 2.0);
    for (const auto geom : {UpaGeometry{1, 1}, {4, 4}, {8, 8}, {16, 4}}) {
        for (int rep = 0; rep < 200; ++rep) {
            const auto a = steering_vector(uphi(rng), utheta(rng), geom);
            CHECK(std::abs(a.norm() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("beam_gain equals the explicit inner product and is 1 at alignment") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uphi(-kPi, kPi), utheta(0.0, kPi / 2.0);
    const UpaGeometry geom{4, 4};
    for (int rep = 0; rep < 50; ++rep) {
        const AnglePair at{uphi(rng), utheta(rng)};
        const AnglePair beam{uphi(rng), utheta(rng)};
        const auto lhs = beam_gain(at, beam, geom);
        const auto rhs = steering_vector(at.azimuth, at.elevation, geom)
                             .dot(steering_vector(beam.azimuth, beam.elevation, geom));
        CHECK(std::abs(lhs - rhs) < 1e-12);
        CHECK(std::abs(std::abs(beam_gain(at, at, geom)) - 1.0) < 1e-14);
    }
}

TEST_CASE("large arrays sharpen: p95 cross-gain non-increasing in Nt") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uphi(-kPi, kPi), utheta(0.0, kPi / 2.0);
    std::vector<double> p95;
    for (const int side : {4, 8, 16, 32}) {  // Nt = 16, 64, 256, 1024
        std::vector<double> gains;
        for (int rep = 0; rep < 2000; ++rep) {
            AnglePair a{uphi(rng), utheta(rng)}, b{uphi(rng), utheta(rng)};
            // Keep the pair well separated in the array's phase space.
            const Eigen::Vector2d ua{std::sin(a.elevation) * std::cos(a.azimuth),
                                     std::sin(a.elevation) * std::sin(a.azimuth)};
            const Eigen::Vector2d ub{std::sin(b.elevation) * std::cos(b.azimuth),
                                     std::sin(b.elevation) * std::sin(b.azimuth)};
            if ((ua - ub).norm() < 0.2) {
                --rep;
                continue;
            }
            gains.push_back(std::abs(beam_gain(a, b, {side, side})));
        }
        std::sort(gains.begin(), gains.end());
        p95.push_back(gains[static_cast<std::size_t>(0.95 * gains.size())]);
    }
    for (std::size_t i = 1; i < p95.size(); ++i) CHECK(p95[i] <= p95[i - 1] + 1e-12);
}

TEST_CASE("LoS probability matches the fitted logistic and stays clamped") {
    const ChannelParams prm{};
    CHECK(los_probability(0.0, prm) == Catch::Approx(0.9633865043090833).margin(1e-12));
    CHECK(los_probability(90.0, prm) == Catch::Approx(0.0020247196748129914).margin(1e-12));
    CHECK(los_probability(30.0, prm) == Catch::Approx(0.8597837012441621).margin(1e-12));

    SECTION("degenerate logistic is the clamped offset") {
        ChannelParams flat = prm;
        flat.a4 = 0.0;
        for (double t : {0.0, 45.0, 90.0}) CHECK(los_probability(t, flat) == 0.0);  // A3 < 0
    }
    SECTION("monotone decreasing for positive A2*A4, always within [0,1]") {
        double prev = 2.0;
        for (int t = 0; t <= 90; ++t) {
            const double p = los_probability(t, prm);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            CHECK(p <= prev + 1e-12);
            prev = p;
        }
    }
}

TEST_CASE("Rician factor spans the configured dB bounds") {
    const ChannelParams prm{};  // 0..30 dB
    CHECK(rician_factor(kPi / 2.0, prm) == Catch::Approx(1.0).margin(1e-12));
    CHECK(rician_factor(0.0, prm) == Catch::Approx(1000.0).epsilon(1e-12));
    CHECK(rician_factor(kPi / 4.0, prm) == Catch::Approx(31.62277660168379).epsilon(1e-12));

    SECTION("constant when the bounds coincide") {
        ChannelParams c = prm;
        c.kr_min_db = c.kr_max_db = 7.0;
        const double want = std::pow(10.0, 0.7);
        for (double t : {0.0, 0.3, 1.2, kPi / 2.0})
            CHECK(rician_factor(t, c) == Catch::Approx(want).epsilon(1e-12));
    }
    SECTION("monotone decreasing and bounded") {
        double prev = 1e9;
        for (int i = 0; i <= 50; ++i) {
            const double t = i * kPi / 100.0;
            const double k = rician_factor(t, prm);
            CHECK(k <= prev);
            CHECK(k >= 1.0 - 1e-12);
            CHECK(k <= 1000.0 + 1e-9);
            prev = k;
        }
    }
}

TEST_CASE("channel gain composition") {
    const ChannelParams prm{};
    const LinkGeometry geom{{4, 4}, {2, 2}};
    const AnglePair at{0.4, 0.3};
    const LinkAngles truth{at, at};

    SECTION("pure LoS, aligned, fixed beta -> unit gain") {
        std::mt19937_64 rng(1);
        const auto g = channel_gain(truth, truth, geom,
                                    std::numeric_limits<double>::infinity(), prm,
                                    FadingSpec{}, rng);
        CHECK(std::abs(g - std::complex<double>(1.0, 0.0)) < 1e-12);
    }
    SECTION("pure NLoS has zero empirical mean") {
        std::mt19937_64 rng(2);
        std::complex<double> acc(0.0, 0.0);
        const int reps = 10000;
        for (int i = 0; i < reps; ++i)
            acc += channel_gain(truth, truth, geom, 0.0, prm, FadingSpec{}, rng);
        CHECK(std::abs(acc) / reps < 0.01);
    }
    SECTION("far-off beams on a large array collapse the gain") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> uphi(-kPi, kPi), utheta(0.0, kPi / 2.0);
        const LinkGeometry big{{32, 32}, {1, 1}};
        int ok = 0, total = 0;
        for (int rep = 0; rep < 500; ++rep) {
            const AnglePair a{uphi(rng), utheta(rng)};
            const AnglePair b{uphi(rng), utheta(rng)};
            const Eigen::Vector2d ua{std::sin(a.elevation) * std::cos(a.azimuth),
                                     std::sin(a.elevation) * std::sin(a.azimuth)};
            const Eigen::Vector2d ub{std::sin(b.elevation) * std::cos(b.azimuth),
                                     std::sin(b.elevation) * std::sin(b.azimuth)};
            if ((ua - ub).norm() < 0.25) continue;
            ++total;
            const auto g = channel_gain({a, a}, {b, a}, big,
                                        std::numeric_limits<double>::infinity(), prm,
                                        FadingSpec{}, rng);
            if (std::abs(g) < 0.1) ++ok;
        }
        CHECK(static_cast<double>(ok) / total >= 0.99);
    }
}

TEST_CASE("receive SNR arithmetic") {
    const double kappa = std::sqrt(16.0 * 4.0);
    CHECK(receive_snr(1.0, {1.0, 0.0}, kappa, 1.0) == Catch::Approx(64.0));
    CHECK(receive_snr(0.0, {1.0, 0.0}, kappa, 1.0) == 0.0);
    CHECK(receive_snr(2.0, {1.0, 0.0}, kappa, 1.0) ==
          Catch::Approx(2.0 * receive_snr(1.0, {1.0, 0.0}, kappa, 1.0)));
    CHECK_THROWS_AS(receive_snr(1.0, {1.0, 0.0}, kappa, 0.0), std::invalid_argument);
}

TEST_CASE("achievable rate") {
    const std::vector<double> one{1.0};
    CHECK(achievable_rate(one) == Catch::Approx(1.0));
    const std::vector<double> g64{64.0};
    CHECK(achievable_rate(g64) == Catch::Approx(6.022367813028454));
    const std::vector<double> two{1.0, 3.0};
    CHECK(achievable_rate(two) == Catch::Approx(1.5));
    CHECK_THROWS_AS(achievable_rate(std::vector<double>{}), std::invalid_argument);

    SECTION("monotone in every component") {
        std::vector<double> a{0.5, 2.0, 7.0};
        const double base = achievable_rate(a);
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto b = a;
            b[i] += 1.0;
            CHECK(achievable_rate(b) > base);
        }
    }
}
