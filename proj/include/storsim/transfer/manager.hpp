#pragma once

#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "storsim/infra/model.hpp"

namespace storsim
{

enum class TransferState : std::uint8_t
{
    Queued,
    Deferred, // activated but waiting out the source access latency
    Active,
    Done,
};

struct Transfer
{
    IdType id = 0;
    LinkId link = 0;
    FileId file = 0;
    SpaceType size = 0;
    Replica* srcReplica = nullptr;
    Replica* dstReplica = nullptr;
    TickType createdAt = 0;
    TickType activatedAt = 0;
    TickType startMovingAt = 0; // activatedAt + sampled access latency
    TickType completedAt = 0;
    TransferState state = TransferState::Queued;
    std::uint8_t kind = 0;      // scenario tag
    std::uint32_t context = 0;  // scenario payload
};

class ITransferListener
{
public:
    virtual ~ITransferListener() = default;
    virtual void OnTransferComplete(const Transfer& transfer, TickType now) = 0;
};

/// Cloud traffic hooks; wired to the bucket accounting when a scenario uses a bucket.
class ICloudTrafficListener
{
public:
    virtual ~ICloudTrafficListener() = default;
    virtual void OnBucketBytesIn(ElementId bucket, SpaceType bytes, TickType now) = 0;
    virtual void OnBucketBytesOut(ElementId bucket, const std::string& egressClass, SpaceType bytes, TickType now) = 0;
    virtual void OnBucketOperation(ElementId bucket, bool isWrite, TickType now) = 0;
};

/// Transfer lifecycle: queueing, FIFO activation under per-link max-active
/// limits, tape access-latency deferral, and byte progress per link mode.
class TransferManager
{
public:
    TransferManager(World& world, Rng& rng);

    void SetListener(ITransferListener* listener) { mListener = listener; }
    void SetCloudListener(ICloudTrafficListener* listener) { mCloudListener = listener; }
    void SetRecordHook(std::function<void(const Transfer&)> hook) { mRecordHook = std::move(hook); }

    // creates the destination replica (reserving the file's full size) and a
    // QUEUED transfer on the src->dst link
    IdType Enqueue(FileId file, ElementId srcElem, ElementId dstElem, TickType now,
                   std::uint8_t kind = 0, std::uint32_t context = 0);

    // progresses all active transfers since the last update, then activates
    // queued transfers FIFO into free slots; meant to run as a recurring event
    void Update(TickType now);

    // FIFO activation only (normally called from Update)
    std::uint32_t ActivatePending(LinkId link, TickType now);

    std::uint64_t DoneCount() const { return mDoneCount; }
    std::uint64_t ActiveCount() const { return mActiveCount; }
    std::uint64_t QueuedCount() const { return mQueuedCount; }
    std::uint64_t MovedBytesTotal() const { return mMovedBytesTotal; }
    SpaceType DoneBytesTotal() const { return mDoneBytesTotal; }

    // mean of completedAt - activatedAt over finished transfers
    double MeanDurationSeconds() const;
    // mean of completedAt - startMovingAt (deferral excluded)
    double MeanMovingDurationSeconds() const;
    // mean per-transfer throughput size/(completedAt - activatedAt), bytes/s
    double MeanThroughputBytesPerSec() const;

    // bytes still sitting in unfinished destination replicas
    SpaceType InFlightBytes() const;

private:
    struct LinkRuntime
    {
        std::deque<std::uint32_t> queued;
        std::vector<std::uint32_t> active;
    };

    void EnsureRuntimeSize();
    void Progress(TickType now);
    void Complete(std::uint32_t slot, TickType now);

    World& mWorld;
    Rng& mRng;
    ITransferListener* mListener = nullptr;
    ICloudTrafficListener* mCloudListener = nullptr;
    std::function<void(const Transfer&)> mRecordHook;

    std::vector<Transfer> mPool;
    std::vector<std::uint32_t> mFreeSlots;
    std::vector<LinkRuntime> mRuntime;
    std::unordered_map<ElementId, ValueDist> mLatencyDists;

    TickType mLastUpdate = 0;
    IdType mNextId = 1;

    std::uint64_t mDoneCount = 0;
    std::uint64_t mActiveCount = 0;
    std::uint64_t mQueuedCount = 0;
    std::uint64_t mMovedBytesTotal = 0;
    SpaceType mDoneBytesTotal = 0;
    std::uint64_t mDurationSumS = 0;
    std::uint64_t mMovingDurationSumS = 0;
    double mThroughputSum = 0.0;
};

} // namespace storsim
