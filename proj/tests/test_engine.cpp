#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "storsim/sim/engine.hpp"

using namespace storsim;

TEST_CASE("event at the current tick fires in the first loop iteration")
{
    Simulation sim;
    std::vector<TickType> fired;
    sim.Schedule(0, [&](Simulation&, TickType now) { fired.push_back(now); });
    const RunSummary summary = sim.Run(10);
    CHECK(fired == std::vector<TickType>{0});
    CHECK(summary.executedEvents == 1);
}

TEST_CASE("scheduling in the past is rejected")
{
    Simulation sim;
    sim.Schedule(10, [](Simulation& s, TickType) {
        CHECK_THROWS_AS(s.Schedule(5, [](Simulation&, TickType) {}), SimError);
    });
    sim.Run(20);
    CHECK_THROWS_AS(sim.Schedule(5, [](Simulation&, TickType) {}), SimError);
}

TEST_CASE("same-tick events run in insertion order")
{
    Simulation sim;
    std::vector<char> order;
    sim.Schedule(100, [&](Simulation&, TickType) { order.push_back('A'); });
    sim.Schedule(100, [&](Simulation&, TickType) { order.push_back('B'); });
    sim.Run(100);
    CHECK(order == std::vector<char>{'A', 'B'});
}

TEST_CASE("empty queue still advances the clock")
{
    Simulation sim;
    const RunSummary summary = sim.Run(100);
    CHECK(summary.executedEvents == 0);
    CHECK(summary.finalClock == 100);
    CHECK(sim.Now() == 100);
}

TEST_CASE("recurring event count over the validation horizon")
{
    // floor(5166000 / 10) + 1 fires, t=0 included
    Simulation sim;
    std::uint64_t fires = 0;
    sim.ScheduleRecurring(0, 10, [&](Simulation&, TickType) { ++fires; });
    const RunSummary summary = sim.Run(5166000);
    CHECK(fires == 516601);
    CHECK(summary.finalClock == 5166000);
}

TEST_CASE("recurrence is drift-free from the scheduled tick")
{
    Simulation sim;
    std::vector<TickType> ticks;
    sim.ScheduleRecurring(3, 7, [&](Simulation&, TickType now) { ticks.push_back(now); });
    sim.Run(31);
    CHECK(ticks == std::vector<TickType>{3, 10, 17, 24, 31});
}

TEST_CASE("now() is visible inside events and clock never decreases")
{
    Simulation sim;
    CHECK(sim.Now() == 0);
    TickType seen = 0;
    sim.Schedule(42, [&](Simulation& s, TickType now) {
        seen = now;
        CHECK(s.Now() == 42);
    });
    sim.Run(5166000);
    CHECK(seen == 42);
    CHECK(sim.Now() == 5166000);
}

TEST_CASE("cancelled events do not fire; cancelled recurring events stop")
{
    Simulation sim;
    int fired = 0;
    const EventId oneShot = sim.Schedule(5, [&](Simulation&, TickType) { ++fired; });
    sim.Cancel(oneShot);

    int recurFired = 0;
    EventId recur = sim.ScheduleRecurring(0, 2, [&](Simulation& s, TickType now) {
        ++recurFired;
        if (now == 4)
            s.Cancel(recur);
    });
    sim.Run(20);
    CHECK(fired == 0);
    CHECK(recurFired == 3); // t = 0, 2, 4
}

TEST_CASE("a failing event aborts the run with diagnostic context")
{
    Simulation sim;
    sim.Schedule(7, [](Simulation&, TickType) { throw std::runtime_error("boom"); });
    try
    {
        sim.Run(10);
        FAIL("expected SimError");
    }
    catch (const SimError& ex)
    {
        const std::string what = ex.what();
        CHECK(what.find("tick 7") != std::string::npos);
        CHECK(what.find("boom") != std::string::npos);
    }
}

TEST_CASE("property: execution order equals a stable sort by tick")
{
    std::mt19937 gen(1234);
    for (int round = 0; round < 20; ++round)
    {
        const int n = 200;
        std::vector<TickType> ticks(n);
        for (auto& t : ticks)
            t = gen() % 50;

        Simulation sim;
        std::vector<int> executed;
        for (int i = 0; i < n; ++i)
            sim.Schedule(ticks[i], [&executed, i](Simulation&, TickType) { executed.push_back(i); });
        sim.Run(100);

        std::vector<int> expected(n);
        for (int i = 0; i < n; ++i)
            expected[i] = i;
        std::stable_sort(expected.begin(), expected.end(),
                         [&](int a, int b) { return ticks[a] < ticks[b]; });
        REQUIRE(executed == expected);
    }
}

TEST_CASE("identical schedules produce identical traces")
{
    auto trace = [] {
        Simulation sim;
        std::vector<std::pair<TickType, int>> out;
        std::mt19937 gen(99);
        for (int i = 0; i < 500; ++i)
            sim.Schedule(gen() % 1000, [&out, i](Simulation&, TickType now) { out.emplace_back(now, i); });
        sim.Run(1000);
        return out;
    };
    CHECK(trace() == trace());
}
