#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "storsim/dist/fitting.hpp"
#include "storsim/io/config.hpp"
#include "storsim/io/output.hpp"
#include "storsim/run/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

std::string DefaultOutRoot()
{
    const char* env = std::getenv("STORSIM_OUT");
    return env ? env : "out";
}

int CmdRun(const std::string& configPath, std::uint32_t runs, std::optional<std::uint64_t> seed,
           std::string outDir, unsigned jobs, std::optional<bool> records)
{
    storsim::ScenarioConfig config = storsim::ScenarioConfig::Load(configPath);
    if (runs == 0)
        runs = config.runs;

    storsim::MultiRunOptions options;
    options.runs = runs;
    options.baseSeed = seed.value_or(config.seed);
    options.outRoot = outDir;
    options.parallelism = jobs;
    options.records = records;

    std::cout << "running " << config.name << " x" << runs << " (base seed " << options.baseSeed << ") -> "
              << outDir << std::endl;
    const json result = storsim::ExecuteMultiRun(config, options);

    if (result.contains("aggregate"))
    {
        const json& metrics = result["aggregate"]["metrics"];
        std::cout << std::fixed << std::setprecision(4);
        for (const auto& [path, stats] : metrics.items())
        {
            // keep the console output to headline metrics
            if (path.find("hist_1h") != std::string::npos || path.find("engine.") == 0)
                continue;
            std::cout << "  " << path << ": mean " << stats["mean"].get<double>()
                      << "  sd " << stats["stddev"].get<double>()
                      << "  se " << stats["stderr"].get<double>() << "\n";
        }
    }
    std::cout << "done; outputs in " << outDir << std::endl;
    return 0;
}

int CmdFit(const std::string& histogramPath, const std::string& family,
           std::optional<unsigned> interpolateSeconds, double scale)
{
    if (interpolateSeconds)
    {
        // hourly count series: one count per line (or bin_low bin_high count)
        std::ifstream in(histogramPath);
        if (!in)
            throw storsim::ConfigError("cannot open " + histogramPath);
        std::vector<double> hourly;
        std::string line;
        while (std::getline(in, line))
        {
            std::istringstream ss(line);
            double a, b, c;
            if (!(ss >> a))
                continue;
            if (ss >> b && ss >> c)
                hourly.push_back(c); // three-column histogram form
            else
                hourly.push_back(a);
        }
        std::vector<double> rates = storsim::InterpolateHourly(hourly, *interpolateSeconds);
        double mean = 0.0;
        for (double& r : rates)
        {
            r *= scale;
            mean += r;
        }
        mean /= static_cast<double>(rates.size());

        const std::string outPath = histogramPath + ".per_tick.csv";
        std::ofstream out(outPath, std::ios::trunc);
        out << "tick_index,rate\n";
        for (std::size_t i = 0; i < rates.size(); ++i)
            out << i << ',' << rates[i] << '\n';
        std::cout << "interpolated " << hourly.size() << " hourly points to " << rates.size()
                  << " ticks of " << *interpolateSeconds << " s (mean " << mean << " per tick): " << outPath << "\n";
        if (family == "exponential")
            std::cout << "exponential: lambda = " << 1.0 / mean << "  (mean " << mean << ")\n";
        return 0;
    }

    storsim::Histogram hist = storsim::Histogram::LoadText(histogramPath);
    if (scale != 1.0)
        for (double& e : hist.edges)
            e *= scale;

    if (family == "exponential")
    {
        const double lambda = storsim::FitExponentialRate(hist);
        std::cout << "exponential: lambda = " << lambda << "  (mean " << 1.0 / lambda << ")\n";
    }
    else if (family == "normal")
    {
        const storsim::NormalFit fit = storsim::FitNormalParams(hist);
        std::cout << "normal: mu = " << fit.mu << "  sigma = " << fit.sigma << "\n";
    }
    else if (family == "geometric")
    {
        const double p = storsim::FitGeometricP(hist);
        std::cout << "geometric: p = " << p << "  (mean " << 1.0 / p << ")\n";
    }
    else
        throw storsim::ConfigError("unknown family " + family + " (use exponential, normal or geometric)");

    std::cout << "total count " << hist.TotalCount() << " in " << hist.counts.size() << " bins\n";
    return 0;
}

std::vector<std::vector<double>> LoadCsv(const std::string& path, std::vector<std::string>& columns)
{
    std::ifstream in(path);
    if (!in)
        throw storsim::SimError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw storsim::SimError("empty timeseries " + path);
    std::stringstream header(line);
    std::string column;
    while (std::getline(header, column, ','))
        columns.push_back(column);

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line))
    {
        std::stringstream ss(line);
        std::vector<double> row;
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> MeanFilter(const std::vector<double>& values, std::size_t window)
{
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        const std::size_t lo = i >= window / 2 ? i - window / 2 : 0;
        const std::size_t hi = std::min(values.size(), i + window / 2 + 1);
        double sum = 0.0;
        for (std::size_t j = lo; j < hi; ++j)
            sum += values[j];
        out[i] = sum / static_cast<double>(hi - lo);
    }
    return out;
}

int CmdReport(const std::string& outDir, std::size_t filterWindow)
{
    const fs::path root(outDir);
    if (!fs::exists(root / "summary.json"))
        throw storsim::SimError("no summary.json in " + outDir + " (not a run output directory?)");

    const json summary = storsim::ReadJsonFile((root / "summary.json").string());
    const fs::path reportDir = root / "report";
    fs::create_directories(reportDir);

    // metric table
    {
        std::ofstream table(reportDir / "metrics.txt", std::ios::trunc);
        table << std::fixed << std::setprecision(4);
        table << "scenario: " << summary.value("scenario", "?") << "\n";
        if (summary.contains("aggregate"))
        {
            table << "runs: " << summary["aggregate"]["runs"].get<std::size_t>() << "\n\n";
            table << std::left << std::setw(56) << "metric" << std::setw(18) << "mean"
                  << std::setw(14) << "sd%" << "se%" << "\n";
            for (const auto& [path, stats] : summary["aggregate"]["metrics"].items())
            {
                if (path.find("hist_1h") != std::string::npos)
                    continue;
                const double mean = stats["mean"].get<double>();
                const double sd = stats["stddev"].get<double>();
                const double se = stats["stderr"].get<double>();
                table << std::left << std::setw(56) << path << std::setw(18) << mean << std::setw(14)
                      << (mean != 0.0 ? 100.0 * sd / std::abs(mean) : 0.0)
                      << (mean != 0.0 ? 100.0 * se / std::abs(mean) : 0.0) << "\n";
            }
        }
        else
        {
            table << summary.dump(2) << "\n";
        }
    }

    // waiting time histograms (figure data), mean across runs
    if (summary.contains("runs") && summary["runs"].size() > 0 && summary["runs"][0].contains("waiting_time"))
    {
        std::map<std::string, std::vector<double>> histsBySite;
        for (const json& run : summary["runs"])
        {
            for (const auto& [site, w] : run["waiting_time"].items())
            {
                const auto& hist = w["hist_1h"];
                auto& acc = histsBySite[site];
                if (acc.size() < hist.size())
                    acc.resize(hist.size(), 0.0);
                for (std::size_t i = 0; i < hist.size(); ++i)
                    acc[i] += hist[i].get<double>();
            }
        }
        const double runs = static_cast<double>(summary["runs"].size());
        std::ofstream out(reportDir / "waiting_time_hist.csv", std::ios::trunc);
        out << "hours";
        for (const auto& [site, hist] : histsBySite)
            out << ',' << site;
        out << '\n';
        std::size_t maxLen = 0;
        for (const auto& [site, hist] : histsBySite)
            maxLen = std::max(maxLen, hist.size());
        for (std::size_t h = 0; h < maxLen; ++h)
        {
            out << h;
            for (const auto& [site, hist] : histsBySite)
                out << ',' << (h < hist.size() ? hist[h] / runs : 0.0);
            out << '\n';
        }
    }

    // time series: mean across runs, then an hourly mean filter
    std::vector<fs::path> runDirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && entry.path().filename().string().rfind("run-", 0) == 0)
            runDirs.push_back(entry.path());
    std::sort(runDirs.begin(), runDirs.end());

    if (!runDirs.empty() && fs::exists(runDirs.front() / "timeseries.csv"))
    {
        std::vector<std::string> columns;
        std::vector<std::vector<double>> mean;
        std::size_t loaded = 0;
        for (const fs::path& dir : runDirs)
        {
            std::vector<std::string> cols;
            const auto rows = LoadCsv((dir / "timeseries.csv").string(), cols);
            if (mean.empty())
            {
                columns = cols;
                mean = rows;
            }
            else
            {
                for (std::size_t r = 0; r < std::min(mean.size(), rows.size()); ++r)
                    for (std::size_t c = 1; c < mean[r].size(); ++c)
                        mean[r][c] += rows[r][c];
            }
            ++loaded;
        }
        for (auto& row : mean)
            for (std::size_t c = 1; c < row.size(); ++c)
                row[c] /= static_cast<double>(loaded);

        // per-column filtered output; counter columns are emitted as deltas
        std::ofstream out(reportDir / "timeseries_filtered.csv", std::ios::trunc);
        out << columns[0];
        for (std::size_t c = 1; c < columns.size(); ++c)
            out << ',' << columns[c];
        out << '\n';
        std::vector<std::vector<double>> filtered(columns.size());
        for (std::size_t c = 1; c < columns.size(); ++c)
        {
            std::vector<double> series;
            series.reserve(mean.size());
            const bool isCounter = columns[c].find(".done") != std::string::npos;
            for (std::size_t r = 0; r < mean.size(); ++r)
            {
                if (isCounter)
                    series.push_back(r == 0 ? mean[r][c] : mean[r][c] - mean[r - 1][c]);
                else
                    series.push_back(mean[r][c]);
            }
            filtered[c] = MeanFilter(series, filterWindow);
        }
        for (std::size_t r = 0; r < mean.size(); ++r)
        {
            out << static_cast<std::uint64_t>(mean[r][0]);
            for (std::size_t c = 1; c < columns.size(); ++c)
                out << ',' << filtered[c][r];
            out << '\n';
        }
    }

    std::cout << "report written to " << (reportDir).string() << std::endl;
    return 0;
}

int CmdCompare(const std::string& dirA, const std::string& dirB)
{
    const json a = storsim::ReadJsonFile((fs::path(dirA) / "summary.json").string());
    const json b = storsim::ReadJsonFile((fs::path(dirB) / "summary.json").string());
    if (!a.contains("aggregate") || !b.contains("aggregate"))
        throw storsim::SimError("compare needs multi-run outputs with aggregates");

    std::cout << std::fixed << std::setprecision(4);
    std::cout << std::left << std::setw(56) << "metric" << std::setw(18) << "A" << std::setw(18) << "B"
              << "delta%\n";
    for (const auto& [path, stats] : a["aggregate"]["metrics"].items())
    {
        if (!b["aggregate"]["metrics"].contains(path) || path.find("hist_1h") != std::string::npos)
            continue;
        const double meanA = stats["mean"].get<double>();
        const double meanB = b["aggregate"]["metrics"][path]["mean"].get<double>();
        const double delta = meanA != 0.0 ? 100.0 * (meanB - meanA) / std::abs(meanA) : 0.0;
        std::cout << std::left << std::setw(56) << path << std::setw(18) << meanA << std::setw(18) << meanB
                  << delta << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"storsim - discrete event simulator for tiered storage and cloud cache workflows"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "execute a scenario (single or replicated runs)");
    std::string configPath;
    std::uint32_t runs = 0;
    std::optional<std::uint64_t> seed;
    std::string outDir = DefaultOutRoot();
    unsigned jobs = 0;
    std::string recordsFlag = "config";
    run->add_option("--config", configPath, "scenario config JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--runs", runs, "number of replicated runs (default: from config)");
    run->add_option("--seed", seed, "base seed; run i uses seed+i (default: from config)");
    run->add_option("--out", outDir, "output directory (default: $STORSIM_OUT or ./out)");
    run->add_option("--jobs", jobs, "parallel run workers (default: hardware)");
    run->add_option("--records", recordsFlag, "per-event record streams: on, off or config")
        ->check(CLI::IsMember({"on", "off", "config"}));

    // fit
    auto* fit = app.add_subcommand("fit", "fit a distribution to a histogram export");
    std::string histogramPath;
    std::string family = "exponential";
    std::optional<unsigned> interpolate;
    double scale = 1.0;
    fit->add_option("histogram", histogramPath, "histogram file (bin_low bin_high count per line)")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--family", family, "exponential, normal or geometric");
    fit->add_option("--interpolate", interpolate, "treat input as hourly counts; interpolate to this tick interval (s)");
    fit->add_option("--scale", scale, "multiply values before fitting (e.g. 1/links)");

    // report
    auto* report = app.add_subcommand("report", "emit tables and figure data from run outputs");
    std::string reportDir;
    std::size_t filterWindow = 24;
    report->add_option("out_dir", reportDir, "output directory of a run")->required()->check(CLI::ExistingDirectory);
    report->add_option("--filter-window", filterWindow, "mean filter window for hourly series (rows)");

    // compare
    auto* compare = app.add_subcommand("compare", "compare the aggregates of two run outputs");
    std::string dirA, dirB;
    compare->add_option("dir_a", dirA)->required()->check(CLI::ExistingDirectory);
    compare->add_option("dir_b", dirB)->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
        {
            std::optional<bool> records;
            if (recordsFlag == "on")
                records = true;
            else if (recordsFlag == "off")
                records = false;
            return CmdRun(configPath, runs, seed, outDir, jobs, records);
        }
        if (fit->parsed())
            return CmdFit(histogramPath, family, interpolate, scale);
        if (report->parsed())
            return CmdReport(reportDir, filterWindow);
        if (compare->parsed())
            return CmdCompare(dirA, dirB);
    }
    catch (const std::exception& ex)
    {
        std::cerr << "error: " << ex.what() << std::endl;
        return 1;
    }
    return 0;
}
