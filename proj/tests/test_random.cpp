#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "storsim/dist/random.hpp"

using namespace storsim;

namespace
{

DistSpec ValidationFileSize()
{
    DistSpec spec;
    spec.kind = DistKind::Exponential;
    spec.lambda = 0.61972;
    spec.scale = BYTES_PER_GIB;
    spec.min = 10.23e6;
    spec.max = 13.73e9;
    return spec;
}

} // namespace

TEST_CASE("truncated exponential file sizes reproduce the 1.74 GB mean")
{
    ValueDist dist(ValidationFileSize());
    Rng rng(7);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
        sum += dist.Sample(rng);
    const double meanGB = sum / n / BYTES_PER_GB;
    CHECK(meanGB == doctest::Approx(1.74).epsilon(0.02));

    // against the quadrature oracle (in GiB space)
    const double oracleGiB = oracles::TruncExpMean(0.61972, 10.23e6 / BYTES_PER_GIB, 13.73e9 / BYTES_PER_GIB);
    CHECK(sum / n / BYTES_PER_GIB == doctest::Approx(oracleGiB).epsilon(0.01));
}

TEST_CASE("truncated geometric popularity stays inside [1,49] and matches its oracle mean")
{
    DistSpec spec;
    spec.kind = DistKind::Geometric;
    spec.p = 0.1;
    spec.min = 1;
    spec.max = 49;
    ValueDist dist(spec);
    Rng rng(11);

    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
    {
        const double v = dist.Sample(rng);
        REQUIRE(v == std::floor(v));
        REQUIRE(v >= 1.0);
        REQUIRE(v <= 49.0);
        sum += v;
    }
    CHECK(sum / n == doctest::Approx(oracles::TruncGeomMean(0.1, 1, 49)).epsilon(0.01));
}

TEST_CASE("rejection-truncated normal matches the numeric integration oracle")
{
    DistSpec spec;
    spec.kind = DistKind::Normal;
    spec.mu = 0.63366;
    spec.sigma = 0.37292;
    spec.min = 0.0;
    ValueDist dist(spec);
    Rng rng(13);

    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
    {
        const double v = dist.Sample(rng);
        REQUIRE(v >= 0.0);
        sum += v;
    }
    const double oracle = oracles::TruncNormalMean(0.63366, 0.37292, 0.0, 10.0);
    CHECK(sum / n == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("clamped normal matches the closed-form mean of max(X,0)")
{
    DistSpec spec;
    spec.kind = DistKind::Normal;
    spec.mu = 0.63366;
    spec.sigma = 0.37292;
    spec.min = 0.0;
    spec.truncation = TruncationPolicy::Clamp;
    ValueDist dist(spec);
    Rng rng(17);

    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
        sum += dist.Sample(rng);
    CHECK(sum / n == doctest::Approx(oracles::ClampedNormalMean(0.63366, 0.37292)).epsilon(0.01));
}

TEST_CASE("bounds keeping negligible mass are a configuration error")
{
    DistSpec spec;
    spec.kind = DistKind::Exponential;
    spec.lambda = 1.0;
    spec.min = 40.0; // exp(-40) of the mass
    CHECK_THROWS_AS(ValueDist{spec}, ConfigError);
}

TEST_CASE("latency spec: normal(60 min, 15 min) truncated to [0, 90] min")
{
    DistSpec spec;
    spec.kind = DistKind::Normal;
    spec.mu = 3600;
    spec.sigma = 900;
    spec.min = 0.0;
    spec.max = 5400.0;
    ValueDist dist(spec);
    Rng rng(19);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i)
    {
        const double v = dist.Sample(rng);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 5400.0);
        sum += v;
    }
    CHECK(sum / 100000 == doctest::Approx(oracles::TruncNormalMean(3600, 900, 0, 5400)).epsilon(0.01));
}

TEST_CASE("draw_count integerizes with an exact fractional carry")
{
    Rng rng(1);

    SUBCASE("constant 0.5 alternates 0,1,0,1")
    {
        DistSpec spec;
        spec.kind = DistKind::Constant;
        spec.value = 0.5;
        ValueDist dist(spec);
        RateAccumulator acc;
        std::vector<std::uint64_t> draws;
        for (int i = 0; i < 6; ++i)
            draws.push_back(acc.Draw(dist, rng));
        CHECK(draws == std::vector<std::uint64_t>{0, 1, 0, 1, 0, 1});
    }

    SUBCASE("constant 2.0 returns 2 every tick")
    {
        DistSpec spec;
        spec.kind = DistKind::Constant;
        spec.value = 2.0;
        ValueDist dist(spec);
        RateAccumulator acc;
        for (int i = 0; i < 10; ++i)
            CHECK(acc.Draw(dist, rng) == 2);
    }

    SUBCASE("exponential rate stream preserves the 1/lambda mean")
    {
        DistSpec spec;
        spec.kind = DistKind::Exponential;
        spec.lambda = 3.33437;
        ValueDist dist(spec);
        RateAccumulator acc;
        std::uint64_t total = 0;
        const int ticks = 100000;
        for (int i = 0; i < ticks; ++i)
        {
            total += acc.Draw(dist, rng);
            REQUIRE(acc.Remainder() >= 0.0);
            REQUIRE(acc.Remainder() < 1.0);
        }
        CHECK(static_cast<double>(total) / ticks == doctest::Approx(1.0 / 3.33437).epsilon(0.01));
    }
}

TEST_CASE("fixed seed reproduces the exact sample stream")
{
    ValueDist dist(ValidationFileSize());
    Rng a(12345), b(12345);
    for (int i = 0; i < 10000; ++i)
        REQUIRE(dist.Sample(a) == dist.Sample(b));
}
