#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "storsim/common/types.hpp"
#include "storsim/transfer/manager.hpp"

namespace storsim
{

/// Append-only record streams for one run. All writers are line oriented
/// (JSON object per line) so external tools can stream them. Disabled streams
/// swallow writes; aggregate metrics do not depend on them.
class RecordStreams
{
public:
    RecordStreams() = default; // all streams disabled

    // header is written as the first line of every stream
    RecordStreams(const std::string& directory, const nlohmann::ordered_json& header, bool enabled);

    void WriteTransfer(const Transfer& transfer, const std::string& linkLabel);
    void WriteDownload(IdType jobId, const std::string& site, FileId file, SpaceType bytes,
                       TickType startedAt, TickType finishedAt);
    void WriteUpload(IdType jobId, const std::string& site, SpaceType bytes, TickType at);
    void WriteJob(IdType jobId, const std::string& site, TickType submittedAt, TickType queuedAt,
                  TickType startedAt, TickType finishedAt);

    void OpenTimeseries(const std::vector<std::string>& columns);
    void WriteTimeseriesRow(TickType at, const std::vector<double>& values);

    void Flush();
    bool Enabled() const { return mEnabled; }

private:
    std::ofstream mTransfers;
    std::ofstream mDownloads;
    std::ofstream mUploads;
    std::ofstream mJobs;
    std::ofstream mTimeseries;
    bool mEnabled = false;
    bool mTimeseriesOpen = false;
    std::string mDirectory;
    nlohmann::ordered_json mHeader;
};

/// Mean, population standard deviation and standard error over N runs.
struct MetricStats
{
    double mean = 0.0;
    double stddev = 0.0;
    double stderror = 0.0;
    std::size_t n = 0;
};

MetricStats SummarizeValues(const std::vector<double>& values);

/// Aggregates numeric leaves across run summaries: every numeric field that
/// appears in all runs yields {mean, stddev, stderr}.
nlohmann::ordered_json SummarizeRuns(const std::vector<nlohmann::json>& runSummaries);

void WriteJsonFile(const std::string& path, const nlohmann::ordered_json& doc);
nlohmann::json ReadJsonFile(const std::string& path);

} // namespace storsim
