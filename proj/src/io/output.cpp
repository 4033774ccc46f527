#include "storsim/io/output.hpp"

#include <cmath>
#include <filesystem>

namespace storsim
{
namespace
{

void OpenStream(std::ofstream& stream, const std::string& directory, const char* name,
                const nlohmann::ordered_json& header)
{
    const std::string path = (std::filesystem::path(directory) / name).string();
    stream.open(path, std::ios::trunc);
    if (!stream)
        throw SimError("cannot open output stream " + path);
    stream << nlohmann::ordered_json{{"header", header}}.dump() << '\n';
}

} // namespace

RecordStreams::RecordStreams(const std::string& directory, const nlohmann::ordered_json& header, bool enabled)
    : mEnabled(enabled && !directory.empty()), mDirectory(directory), mHeader(header)
{
    if (mDirectory.empty())
        return;
    std::filesystem::create_directories(directory);
    if (!mEnabled)
        return;
    OpenStream(mTransfers, directory, "transfers.jsonl", header);
    OpenStream(mDownloads, directory, "downloads.jsonl", header);
    OpenStream(mUploads, directory, "uploads.jsonl", header);
    OpenStream(mJobs, directory, "jobs.jsonl", header);
}

void RecordStreams::WriteTransfer(const Transfer& transfer, const std::string& linkLabel)
{
    if (!mEnabled)
        return;
    nlohmann::ordered_json row;
    row["id"] = transfer.id;
    row["link"] = linkLabel;
    row["file"] = transfer.file;
    row["bytes"] = transfer.size;
    row["created_at"] = transfer.createdAt;
    row["activated_at"] = transfer.activatedAt;
    row["start_moving_at"] = transfer.startMovingAt; // activation + access latency
    row["completed_at"] = transfer.completedAt;
    mTransfers << row.dump() << '\n';
}

void RecordStreams::WriteDownload(IdType jobId, const std::string& site, FileId file, SpaceType bytes,
                                  TickType startedAt, TickType finishedAt)
{
    if (!mEnabled)
        return;
    nlohmann::ordered_json row;
    row["job"] = jobId;
    row["site"] = site;
    row["file"] = file;
    row["bytes"] = bytes;
    row["started_at"] = startedAt;
    row["finished_at"] = finishedAt;
    mDownloads << row.dump() << '\n';
}

void RecordStreams::WriteUpload(IdType jobId, const std::string& site, SpaceType bytes, TickType at)
{
    if (!mEnabled)
        return;
    nlohmann::ordered_json row;
    row["job"] = jobId;
    row["site"] = site;
    row["bytes"] = bytes;
    row["at"] = at;
    mUploads << row.dump() << '\n';
}

void RecordStreams::WriteJob(IdType jobId, const std::string& site, TickType submittedAt, TickType queuedAt,
                             TickType startedAt, TickType finishedAt)
{
    if (!mEnabled)
        return;
    nlohmann::ordered_json row;
    row["id"] = jobId;
    row["site"] = site;
    row["submitted_at"] = submittedAt;
    row["queued_at"] = queuedAt;
    row["started_at"] = startedAt;
    row["finished_at"] = finishedAt;
    mJobs << row.dump() << '\n';
}

void RecordStreams::OpenTimeseries(const std::vector<std::string>& columns)
{
    if (mDirectory.empty())
        return;
    const std::string path = (std::filesystem::path(mDirectory) / "timeseries.csv").string();
    mTimeseries.open(path, std::ios::trunc);
    if (!mTimeseries)
        throw SimError("cannot open output stream " + path);
    mTimeseries << "tick";
    for (const std::string& column : columns)
        mTimeseries << ',' << column;
    mTimeseries << '\n';
    mTimeseriesOpen = true;
}

void RecordStreams::WriteTimeseriesRow(TickType at, const std::vector<double>& values)
{
    if (!mTimeseriesOpen)
        return;
    mTimeseries << at;
    char buf[40];
    for (double v : values)
    {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        mTimeseries << ',' << buf;
    }
    mTimeseries << '\n';
}

void RecordStreams::Flush()
{
    for (std::ofstream* stream : {&mTransfers, &mDownloads, &mUploads, &mJobs, &mTimeseries})
        if (stream->is_open())
            stream->flush();
}

MetricStats SummarizeValues(const std::vector<double>& values)
{
    if (values.size() < 2)
        throw SimError("summarizing requires at least two runs");
    MetricStats stats;
    stats.n = values.size();
    for (double v : values)
        stats.mean += v;
    stats.mean /= static_cast<double>(stats.n);
    double var = 0.0;
    for (double v : values)
        var += (v - stats.mean) * (v - stats.mean);
    var /= static_cast<double>(stats.n); // population over runs
    stats.stddev = std::sqrt(var);
    stats.stderror = stats.stddev / std::sqrt(static_cast<double>(stats.n));
    return stats;
}

namespace
{

void CollectNumericPaths(const nlohmann::json& node, const std::string& prefix,
                         std::vector<std::string>& paths)
{
    if (node.is_number())
    {
        paths.push_back(prefix);
        return;
    }
    if (node.is_object())
        for (const auto& [key, value] : node.items())
            CollectNumericPaths(value, prefix.empty() ? key : prefix + "." + key, paths);
    if (node.is_array())
        for (std::size_t i = 0; i < node.size(); ++i)
            CollectNumericPaths(node[i], prefix + "[" + std::to_string(i) + "]", paths);
}

std::optional<double> LookupPath(const nlohmann::json& node, const std::string& path)
{
    const nlohmann::json* cur = &node;
    std::size_t pos = 0;
    while (pos < path.size())
    {
        if (path[pos] == '[')
        {
            const std::size_t end = path.find(']', pos);
            const std::size_t idx = std::stoul(path.substr(pos + 1, end - pos - 1));
            if (!cur->is_array() || idx >= cur->size())
                return std::nullopt;
            cur = &(*cur)[idx];
            pos = end + 1;
            if (pos < path.size() && path[pos] == '.')
                ++pos;
            continue;
        }
        std::size_t end = path.size();
        for (std::size_t i = pos; i < path.size(); ++i)
        {
            if (path[i] == '.' || path[i] == '[')
            {
                end = i;
                break;
            }
        }
        const std::string key = path.substr(pos, end - pos);
        if (!cur->is_object() || !cur->contains(key))
            return std::nullopt;
        cur = &(*cur)[key];
        pos = end;
        if (pos < path.size() && path[pos] == '.')
            ++pos;
    }
    return cur->is_number() ? std::optional<double>(cur->get<double>()) : std::nullopt;
}

} // namespace

nlohmann::ordered_json SummarizeRuns(const std::vector<nlohmann::json>& runSummaries)
{
    if (runSummaries.size() < 2)
        throw SimError("summarizing requires at least two runs");

    std::vector<std::string> paths;
    CollectNumericPaths(runSummaries.front(), "", paths);

    nlohmann::ordered_json out;
    out["runs"] = runSummaries.size();
    nlohmann::ordered_json metrics;
    for (const std::string& path : paths)
    {
        std::vector<double> values;
        values.reserve(runSummaries.size());
        bool complete = true;
        for (const nlohmann::json& summary : runSummaries)
        {
            const std::optional<double> v = LookupPath(summary, path);
            if (!v)
            {
                complete = false;
                break;
            }
            values.push_back(*v);
        }
        if (!complete)
            continue;
        const MetricStats stats = SummarizeValues(values);
        metrics[path] = {{"mean", stats.mean}, {"stddev", stats.stddev}, {"stderr", stats.stderror}};
    }
    out["metrics"] = std::move(metrics);
    return out;
}

void WriteJsonFile(const std::string& path, const nlohmann::ordered_json& doc)
{
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw SimError("cannot write " + path);
    out << doc.dump(2) << '\n';
}

nlohmann::json ReadJsonFile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SimError("cannot read " + path);
    nlohmann::json doc;
    in >> doc;
    return doc;
}

} // namespace storsim
