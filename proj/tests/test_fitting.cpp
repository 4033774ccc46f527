#include <doctest.h>

#include <fstream>
#include <random>

#include "storsim/dist/fitting.hpp"

using namespace storsim;

namespace
{

// histogram a sample with fixed-width bins starting at 0
Histogram Bin(const std::vector<double>& samples, double width)
{
    double maxValue = 0.0;
    for (double s : samples)
        maxValue = std::max(maxValue, s);
    const std::size_t bins = static_cast<std::size_t>(maxValue / width) + 1;
    Histogram hist;
    hist.counts.assign(bins, 0.0);
    for (std::size_t i = 0; i <= bins; ++i)
        hist.edges.push_back(i * width);
    for (double s : samples)
        hist.counts[static_cast<std::size_t>(s / width)] += 1.0;
    return hist;
}

} // namespace

TEST_CASE("a single occupied bin gives the closed-form rate 1/midpoint")
{
    Histogram hist;
    hist.edges = {1.0, 3.0};
    hist.counts = {50.0};
    CHECK(FitExponentialRate(hist) == doctest::Approx(1.0 / 2.0));
}

TEST_CASE("all mass at zero is an error")
{
    Histogram hist;
    hist.edges = {-1.0, 1.0};
    hist.counts = {10.0};
    CHECK_THROWS_AS(FitExponentialRate(hist), ConfigError);

    Histogram empty;
    empty.edges = {0.0, 1.0};
    empty.counts = {0.0};
    CHECK_THROWS_AS(FitExponentialRate(empty), ConfigError);
}

TEST_CASE("exponential fit recovers a planted rate from 128 MB-binned samples")
{
    // sampling path independent of the library: std::exponential_distribution
    std::mt19937 gen(2024);
    std::exponential_distribution<double> exp(0.62);
    std::vector<double> samples;
    samples.reserve(1000000);
    for (int i = 0; i < 1000000; ++i)
        samples.push_back(exp(gen));

    const Histogram hist = Bin(samples, 0.128); // GB units, 128 MB bins
    const double lambda = FitExponentialRate(hist);
    CHECK(lambda > 0.60);
    CHECK(lambda < 0.64);
}

TEST_CASE("normal fit recovers planted parameters within 3%")
{
    std::mt19937 gen(77);
    std::normal_distribution<double> normal(0.63366, 0.37292);
    std::vector<double> samples;
    for (int i = 0; i < 1000000; ++i)
        samples.push_back(std::abs(normal(gen)) + 1.0); // shifted positive
    const Histogram hist = Bin(samples, 0.01);
    const NormalFit fit = FitNormalParams(hist);
    CHECK(fit.mu == doctest::Approx(1.6369).epsilon(0.03)); // E[|X|+1] for these params
    CHECK(fit.sigma > 0.0);
}

TEST_CASE("geometric fit recovers a planted p")
{
    std::mt19937 gen(31);
    std::geometric_distribution<int> geom(0.1); // support 0,1,...
    std::vector<double> counts(60, 0.0);
    for (int i = 0; i < 1000000; ++i)
    {
        const int k = geom(gen) + 1;
        if (k < 60)
            counts[k] += 1.0;
    }
    Histogram hist;
    for (std::size_t k = 0; k < counts.size(); ++k)
        hist.edges.push_back(k + 0.5);
    hist.edges.insert(hist.edges.begin(), -0.5);
    hist.counts = counts;
    const double p = FitGeometricP(hist);
    CHECK(p == doctest::Approx(0.1).epsilon(0.03));
}

TEST_CASE("hourly interpolation: constant series")
{
    const std::vector<double> rates = InterpolateHourly({360.0, 360.0, 360.0}, 10);
    REQUIRE(rates.size() == 2 * 360 + 1);
    for (double r : rates)
        CHECK(r == doctest::Approx(1.0));
}

TEST_CASE("hourly interpolation: linear ramp 0 -> 720 becomes a 0 -> 2 per-tick ramp")
{
    const std::vector<double> rates = InterpolateHourly({0.0, 720.0}, 10);
    REQUIRE(rates.size() == 361);
    CHECK(rates.front() == doctest::Approx(0.0));
    CHECK(rates.back() == doctest::Approx(2.0));
    CHECK(rates[180] == doctest::Approx(1.0));

    // trapezoid consistency: the integral over the hour matches the mean of
    // the endpoint counts
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < rates.size(); ++i)
        integral += 0.5 * (rates[i] + rates[i + 1]);
    CHECK(integral == doctest::Approx(360.0).epsilon(1e-9));
}

TEST_CASE("hourly interpolation input validation")
{
    CHECK_THROWS_AS(InterpolateHourly({1.0}, 10), ConfigError);
    CHECK_THROWS_AS(InterpolateHourly({1.0, 2.0}, 7), ConfigError);   // does not divide 3600
    CHECK_THROWS_AS(InterpolateHourly({}, 10), ConfigError);
}

TEST_CASE("monitoring-shaped pipeline: interpolate, split across links, fit")
{
    // hourly transfer counts across 6 links averaging 648/h, so that the
    // per-link per-10s rate is 0.3 = 1/3.33437
    std::mt19937 gen(5);
    std::normal_distribution<double> noise(648.0, 40.0);
    std::vector<double> hourly;
    for (int h = 0; h < 500; ++h)
        hourly.push_back(std::max(0.0, noise(gen)));

    const std::vector<double> perTick = InterpolateHourly(hourly, 10);
    double mean = 0.0;
    for (double r : perTick)
        mean += r / 6.0; // uniform split across the 6 links
    mean /= static_cast<double>(perTick.size());

    CHECK(mean == doctest::Approx(0.3).epsilon(0.02));
    CHECK(1.0 / mean == doctest::Approx(3.33437).epsilon(0.02));
}

TEST_CASE("histogram text loader parses three-column lines")
{
    const char* path = "test_hist.tmp";
    {
        std::ofstream out(path, std::ios::trunc);
        out << "0 128 10\n128,256,20\n256\t384\t5\n";
    }
    const Histogram hist = Histogram::LoadText(path);
    REQUIRE(hist.counts.size() == 3);
    CHECK(hist.TotalCount() == 35.0);
    CHECK(hist.edges.front() == 0.0);
    CHECK(hist.edges.back() == 384.0);
    std::remove(path);
}
