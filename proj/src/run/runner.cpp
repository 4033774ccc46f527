#include "storsim/run/runner.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "storsim/cloud/cost.hpp"
#include "storsim/io/output.hpp"
#include "storsim/scenario/hcdc.hpp"
#include "storsim/scenario/validation.hpp"
#include "storsim/sim/engine.hpp"
#include "storsim/transfer/manager.hpp"

namespace storsim
{
namespace
{

nlohmann::ordered_json MakeHeader(const ScenarioConfig& config, std::uint64_t seed)
{
    nlohmann::ordered_json header;
    header["scenario"] = config.name;
    header["seed"] = seed;
    header["duration_s"] = config.durationSec;
    return header;
}

std::vector<std::string> GenericTimeseriesColumns(const World& world)
{
    std::vector<std::string> columns;
    for (ElementId id = 0; id < world.ElementCount(); ++id)
        columns.push_back(world.Element(id).mName + ".used_bytes");
    for (LinkId id = 0; id < world.LinkCount(); ++id)
    {
        const NetworkLink& link = world.Link(id);
        const std::string label = world.Element(link.mSrc).mName + ">" + world.Element(link.mDst).mName;
        columns.push_back(label + ".done");
        columns.push_back(label + ".traffic_bytes");
    }
    return columns;
}

std::vector<double> GenericTimeseriesValues(const World& world)
{
    std::vector<double> values;
    for (ElementId id = 0; id < world.ElementCount(); ++id)
        values.push_back(static_cast<double>(world.Element(id).UsedBytes()));
    for (LinkId id = 0; id < world.LinkCount(); ++id)
    {
        values.push_back(static_cast<double>(world.Link(id).mDoneTransfers));
        values.push_back(static_cast<double>(world.Link(id).mTrafficBytes));
    }
    return values;
}

} // namespace

nlohmann::ordered_json ExecuteRun(const ScenarioConfig& config, const RunOptions& options)
{
    const auto wallStart = std::chrono::steady_clock::now();

    World world = config.BuildWorld();
    Rng rng(options.seed);
    Simulation sim;
    TransferManager manager(world, rng);

    const bool wantRecords = options.records.value_or(config.writeRecords);
    RecordStreams streams(options.outDir, MakeHeader(config, options.seed), wantRecords);

    std::unique_ptr<ValidationScenario> validation;
    std::unique_ptr<HcdcScenario> hcdc;

    if (config.generator == GeneratorKind::Validation)
    {
        validation = std::make_unique<ValidationScenario>(world, manager, rng, config, streams);
        validation->Initialize();
    }
    else
    {
        hcdc = std::make_unique<HcdcScenario>(world, manager, rng, config, streams);
        hcdc->Initialize();
    }

    // recurring events are scheduled longest interval first so their relative
    // order at shared ticks stays fixed for the whole run
    if (!options.outDir.empty())
    {
        if (hcdc)
            streams.OpenTimeseries(hcdc->TimeseriesColumns());
        else
            streams.OpenTimeseries(GenericTimeseriesColumns(world));
        sim.ScheduleRecurring(0, config.timeseriesIntervalSec, [&](Simulation&, TickType now) {
            if (hcdc)
                streams.WriteTimeseriesRow(now, hcdc->TimeseriesValues());
            else
                streams.WriteTimeseriesRow(now, GenericTimeseriesValues(world));
        });
    }

    sim.ScheduleRecurring(0, config.generatorIntervalSec, [&](Simulation&, TickType now) {
        if (validation)
            validation->Tick(now);
        else
            hcdc->Tick(now);
    });

    sim.ScheduleRecurring(0, config.managerIntervalSec, [&](Simulation&, TickType now) {
        manager.Update(now);
    });

    const RunSummary runSummary = sim.Run(config.durationSec);
    if (hcdc)
        hcdc->Finalize(config.durationSec);

    const double wallSeconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wallStart).count();

    nlohmann::ordered_json summary;
    summary["scenario"] = config.name;
    summary["generator"] = config.generator == GeneratorKind::Validation ? "validation" : "hcdc";
    summary["seed"] = options.seed;
    summary["duration_s"] = config.durationSec;
    summary["engine"] = {{"executed_events", runSummary.executedEvents}, {"final_clock", runSummary.finalClock}};

    if (validation)
    {
        const nlohmann::ordered_json body = validation->Summary(config.durationSec);
        for (const auto& [key, value] : body.items())
            summary[key] = value;
    }
    else
    {
        const nlohmann::ordered_json body = hcdc->Summary(config.durationSec);
        for (const auto& [key, value] : body.items())
            summary[key] = value;

        if (config.cloud && hcdc->Account())
        {
            const PricingSchedule schedule = PricingSchedule::Load(config.ResolvePath(config.cloud->pricingFile));
            const CostReport report = hcdc->Account()->ComputeCosts(schedule, config.durationSec);
            nlohmann::ordered_json costs;
            costs["currency"] = report.currency;
            costs["months"] = nlohmann::ordered_json::array();
            for (const MonthCosts& month : report.months)
            {
                nlohmann::ordered_json m;
                m["storage_cost"] = month.storageCost;
                m["network_cost"] = month.networkCost;
                m["operations_cost"] = month.operationsCost;
                m["stored_gb_months"] = month.storedGBMonths;
                m["egress_gib"] = month.egressGiBByClass;
                costs["months"].push_back(std::move(m));
            }
            summary["costs"] = costs;
            if (!options.outDir.empty())
                WriteJsonFile((std::filesystem::path(options.outDir) / "costs.json").string(), costs);
        }
    }

    // wall time is environment noise; keep it out of cross-run aggregation by
    // storing it under a non-numeric-safe key group
    summary["wall"] = {{"seconds", wallSeconds}};

    streams.Flush();
    if (!options.outDir.empty())
        WriteJsonFile((std::filesystem::path(options.outDir) / "summary.json").string(), summary);
    return summary;
}

nlohmann::ordered_json ExecuteMultiRun(const ScenarioConfig& config, const MultiRunOptions& options)
{
    const std::uint32_t runs = options.runs;
    std::vector<nlohmann::json> summaries(runs);
    std::vector<std::string> errors(runs);

    unsigned parallelism = options.parallelism ? options.parallelism : std::thread::hardware_concurrency();
    parallelism = std::max(1u, std::min<unsigned>(parallelism, runs));

    std::atomic<std::uint32_t> nextRun{0};
    auto worker = [&]() {
        for (;;)
        {
            const std::uint32_t run = nextRun.fetch_add(1);
            if (run >= runs)
                return;
            RunOptions runOptions;
            runOptions.seed = options.baseSeed + run;
            runOptions.records = options.records;
            if (!options.outRoot.empty())
            {
                char name[32];
                std::snprintf(name, sizeof(name), "run-%03u", run);
                runOptions.outDir = (std::filesystem::path(options.outRoot) / name).string();
            }
            try
            {
                summaries[run] = ExecuteRun(config, runOptions);
            }
            catch (const std::exception& ex)
            {
                errors[run] = ex.what();
            }
        }
    };

    std::vector<std::thread> threads;
    for (unsigned i = 1; i < parallelism; ++i)
        threads.emplace_back(worker);
    worker();
    for (std::thread& t : threads)
        t.join();

    for (std::uint32_t run = 0; run < runs; ++run)
        if (!errors[run].empty())
            throw SimError("run " + std::to_string(run) + " failed: " + errors[run]);

    nlohmann::ordered_json out;
    out["scenario"] = config.name;
    out["base_seed"] = options.baseSeed;
    out["runs"] = nlohmann::ordered_json::array();
    for (const nlohmann::json& s : summaries)
        out["runs"].push_back(s);
    if (runs >= 2)
        out["aggregate"] = SummarizeRuns(summaries);

    if (!options.outRoot.empty())
        WriteJsonFile((std::filesystem::path(options.outRoot) / "summary.json").string(), out);
    return out;
}

} // namespace storsim
