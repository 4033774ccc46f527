#pragma once

#include <deque>
#include <map>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "storsim/cloud/cost.hpp"
#include "storsim/dist/random.hpp"
#include "storsim/io/config.hpp"
#include "storsim/io/output.hpp"
#include "storsim/sim/engine.hpp"
#include "storsim/transfer/manager.hpp"

namespace storsim
{

enum class JobState : std::uint8_t
{
    Waiting,      // input not on disk, no transfer yet, storage not reservable
    Transferring, // staging transfer to disk queued or running
    Queued,       // input complete on disk, waiting for a job slot
    Active,       // downloading input to the worker
    Running,      // paused for the sampled execution duration
    Finished,
};

/// Continuous production scenario: two-tier sites feeding a shared cloud
/// bucket. Jobs walk waiting -> transferring -> queued -> active -> running;
/// processed input is evicted from disk and migrated to the bucket when one
/// is configured.
class HcdcScenario : public ITransferListener, public ICloudTrafficListener
{
public:
    HcdcScenario(World& world, TransferManager& manager, Rng& rng,
                 const ScenarioConfig& config, RecordStreams& streams);

    void Initialize();
    void Tick(TickType now); // generator update: eviction, submission, advancement

    void OnTransferComplete(const Transfer& transfer, TickType now) override;

    void OnBucketBytesIn(ElementId bucket, SpaceType bytes, TickType now) override;
    void OnBucketBytesOut(ElementId bucket, const std::string& egressClass, SpaceType bytes, TickType now) override;
    void OnBucketOperation(ElementId bucket, bool isWrite, TickType now) override;

    void Finalize(TickType now);
    nlohmann::ordered_json Summary(TickType duration) const;

    const BucketAccount* Account() const { return mBucketElem ? &mAccount : nullptr; }
    BucketAccount* Account() { return mBucketElem ? &mAccount : nullptr; }

    // timeseries support
    std::vector<std::string> TimeseriesColumns() const;
    std::vector<double> TimeseriesValues() const;

    // state-machine bookkeeping exposed for tests
    std::uint64_t JobsFinished() const { return mJobsFinishedTotal; }
    std::uint64_t JobsSubmitted() const { return mJobsSubmittedTotal; }

    static constexpr std::uint8_t TRANSFER_STAGING = 1;
    static constexpr std::uint8_t TRANSFER_MIGRATION = 2;

private:
    enum class FileState : std::uint8_t
    {
        None,        // input only at tape (and possibly bucket)
        Staging,     // disk replica reserved, transfer in flight
        OnDisk,      // complete disk replica
        EvictQueued, // unreferenced, waiting for the next eviction pass
        Migrating,   // disk -> bucket transfer in flight; not selectable
    };

    struct Job
    {
        IdType id = 0;
        FileId file = 0;
        std::uint32_t durationS = 0;
        TickType submittedAt = 0;
        TickType queuedAt = 0;
        TickType startedAt = 0;
        SpaceType downloadedBytes = 0;
        std::uint32_t siteIdx = 0;
        JobState state = JobState::Waiting;
    };

    struct PopularityClass
    {
        std::uint32_t weight = 0; // the popularity value shared by the class
        std::vector<FileId> files;
    };

    struct SiteRuntime
    {
        std::string name;
        ElementId tape = 0, disk = 0, worker = 0, output = 0;
        LinkId tapeToDisk = 0, diskToWorker = 0;
        std::optional<LinkId> bucketToDisk;
        std::optional<LinkId> diskToBucket;
        FileId fileBase = 0;
        std::uint32_t fileCount = 0;

        std::vector<PopularityClass> classes;
        std::uint64_t classWeightTotal = 0;

        // FIFO; entries carry the job id so stale entries of recycled slots
        // are recognized and skipped
        std::deque<std::pair<std::uint32_t, IdType>> waitingJobs;
        std::unordered_map<FileId, std::vector<std::uint32_t>> waitingByFile;
        std::unordered_map<FileId, std::vector<std::uint32_t>> transferringByFile;
        std::vector<std::uint32_t> queuedJobs;
        std::vector<std::uint32_t> downloads;
        std::map<TickType, std::vector<std::uint32_t>> runningUntil;
        std::vector<FileId> evictionQueue;
        RateAccumulator jobCountAcc;

        // stats
        std::uint64_t jobsSubmitted = 0;
        std::uint64_t jobsFinished = 0;
        std::uint64_t downloadsDone = 0;
        SpaceType downloadVolume = 0;
        std::uint64_t waitingSumS = 0;
        TickType waitingMaxS = 0;
        std::vector<std::uint64_t> waitingHist1h;
        // state-machine safety counters
        std::uint64_t enteredQueued = 0, enteredActive = 0, enteredRunning = 0;
    };

    std::uint32_t AllocJob();
    void FreeJob(std::uint32_t slot);

    FileId SelectInputFile(SiteRuntime& site);
    void SubmitJobs(SiteRuntime& site, TickType now);
    void EvictProcessed(SiteRuntime& site, TickType now);
    void AdvanceRunning(SiteRuntime& site, TickType now);
    void AdvanceDownloads(SiteRuntime& site, TickType now, TickType dt);
    void AdvanceQueued(SiteRuntime& site, TickType now);
    void DrainWaiting(SiteRuntime& site, TickType now);
    void FinishJob(SiteRuntime& site, std::uint32_t slot, TickType now);
    SiteRuntime& SiteOfFile(FileId file);

    World& mWorld;
    TransferManager& mManager;
    Rng& mRng;
    const ScenarioConfig& mConfig;
    RecordStreams& mStreams;

    ValueDist mFileSize;
    ValueDist mPopularity;
    ValueDist mJobCount;
    ValueDist mJobDuration;

    std::vector<SiteRuntime> mSites;
    std::optional<ElementId> mBucketElem;
    BucketAccount mAccount;

    // per-file runtime state, indexed by FileId
    std::vector<FileState> mFileState;
    std::vector<std::uint32_t> mFileRefCount;
    std::vector<std::uint8_t> mFileBudget;
    std::vector<std::uint8_t> mFileClass;
    std::vector<std::uint32_t> mFilePosInClass;
    std::vector<std::uint32_t> mFileUses;

    std::vector<Job> mJobPool;
    std::vector<std::uint32_t> mFreeJobs;
    IdType mNextJobId = 1;
    TickType mLastTick = 0;

    std::uint64_t mJobsSubmittedTotal = 0;
    std::uint64_t mJobsFinishedTotal = 0;
    std::uint64_t mSelectionRedraws = 0;
};

} // namespace storsim
