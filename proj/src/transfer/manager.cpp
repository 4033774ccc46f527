#include "storsim/transfer/manager.hpp"

#include <cassert>
#include <cmath>

namespace storsim
{

TransferManager::TransferManager(World& world, Rng& rng)
    : mWorld(world), mRng(rng)
{
    EnsureRuntimeSize();
}

void TransferManager::EnsureRuntimeSize()
{
    if (mRuntime.size() < mWorld.LinkCount())
        mRuntime.resize(mWorld.LinkCount());
}

IdType TransferManager::Enqueue(FileId file, ElementId srcElem, ElementId dstElem, TickType now,
                                std::uint8_t kind, std::uint32_t context)
{
    EnsureRuntimeSize();
    const LinkId linkId = mWorld.FindLink(srcElem, dstElem); // throws NoSuchLinkError

    StorageElement& src = mWorld.Element(srcElem);
    StorageElement& dst = mWorld.Element(dstElem);
    const SpaceType fileSize = mWorld.GetFile(file).size;

    Replica* srcReplica = src.FindReplica(file);
    if (!srcReplica || srcReplica->current != fileSize)
        throw ModelError("no complete source replica of file " + std::to_string(file) + " at " + src.mName);

    Replica* dstReplica = dst.CreateReplica(file, fileSize); // reserves, may throw
    dstReplica->inboundTransfer = true;
    srcReplica->readLocks += 1;
    srcReplica->egressCount += 1;

    std::uint32_t slot;
    if (!mFreeSlots.empty())
    {
        slot = mFreeSlots.back();
        mFreeSlots.pop_back();
    }
    else
    {
        slot = static_cast<std::uint32_t>(mPool.size());
        mPool.emplace_back();
    }

    Transfer& t = mPool[slot];
    t = Transfer{};
    t.id = mNextId++;
    t.link = linkId;
    t.file = file;
    t.size = fileSize;
    t.srcReplica = srcReplica;
    t.dstReplica = dstReplica;
    t.createdAt = now;
    t.state = TransferState::Queued;
    t.kind = kind;
    t.context = context;

    mRuntime[linkId].queued.push_back(slot);
    ++mQueuedCount;

    if (mCloudListener)
    {
        if (dst.mKind == StorageKind::CloudBucket)
            mCloudListener->OnBucketOperation(dstElem, true, mLastUpdate);
        if (src.mKind == StorageKind::CloudBucket)
            mCloudListener->OnBucketOperation(srcElem, false, mLastUpdate);
    }
    return t.id;
}

std::uint32_t TransferManager::ActivatePending(LinkId linkId, TickType now)
{
    NetworkLink& link = mWorld.Link(linkId);
    LinkRuntime& runtime = mRuntime[linkId];

    std::uint32_t activated = 0;
    while (!runtime.queued.empty())
    {
        if (link.mMaxActive && link.mActiveTransfers >= *link.mMaxActive)
            break;

        const std::uint32_t slot = runtime.queued.front();
        runtime.queued.pop_front();
        Transfer& t = mPool[slot];
        assert(t.state == TransferState::Queued);

        t.activatedAt = now;
        t.startMovingAt = now;
        const StorageElement& src = mWorld.Element(link.mSrc);
        if (src.mAccessLatency)
        {
            auto it = mLatencyDists.find(link.mSrc);
            if (it == mLatencyDists.end())
                it = mLatencyDists.emplace(link.mSrc, ValueDist(*src.mAccessLatency)).first;
            const double latency = std::max(0.0, it->second.Sample(mRng));
            t.startMovingAt = now + static_cast<TickType>(std::llround(latency));
        }
        t.state = t.startMovingAt > now ? TransferState::Deferred : TransferState::Active;

        runtime.active.push_back(slot);
        link.mActiveTransfers += 1;
        --mQueuedCount;
        ++mActiveCount;
        ++activated;
    }
    return activated;
}

void TransferManager::Complete(std::uint32_t slot, TickType now)
{
    Transfer& t = mPool[slot];
    NetworkLink& link = mWorld.Link(t.link);

    t.state = TransferState::Done;
    t.completedAt = now;
    t.dstReplica->inboundTransfer = false;
    assert(t.srcReplica->readLocks > 0);
    t.srcReplica->readLocks -= 1;

    link.mDoneTransfers += 1;
    assert(link.mActiveTransfers > 0);
    link.mActiveTransfers -= 1;

    --mActiveCount;
    ++mDoneCount;
    mDoneBytesTotal += t.size;
    const TickType duration = t.completedAt - t.activatedAt;
    mDurationSumS += duration;
    mMovingDurationSumS += t.completedAt - t.startMovingAt;
    mThroughputSum += static_cast<double>(t.size) / static_cast<double>(duration);

    if (mRecordHook)
        mRecordHook(t);
    if (mListener)
        mListener->OnTransferComplete(t, now);

    mFreeSlots.push_back(slot);
}

void TransferManager::Progress(TickType now)
{
    for (LinkId linkId = 0; linkId < mRuntime.size(); ++linkId)
    {
        LinkRuntime& runtime = mRuntime[linkId];
        if (runtime.active.empty())
            continue;

        NetworkLink& link = mWorld.Link(linkId);
        StorageElement& dstElem = mWorld.Element(link.mDst);
        const StorageElement& srcElem = mWorld.Element(link.mSrc);
        const bool srcIsBucket = srcElem.mKind == StorageKind::CloudBucket;
        const bool dstIsBucket = dstElem.mKind == StorageKind::CloudBucket;

        std::uint32_t moving = 0;
        if (link.mMode == LinkMode::SharedBandwidth)
        {
            for (std::uint32_t slot : runtime.active)
                if (mPool[slot].startMovingAt < now)
                    ++moving;
        }

        for (std::size_t i = 0; i < runtime.active.size();)
        {
            const std::uint32_t slot = runtime.active[i];
            Transfer& t = mPool[slot];

            const TickType moveFrom = std::max(mLastUpdate, t.startMovingAt);
            if (now <= moveFrom)
            {
                ++i;
                continue;
            }
            if (t.state == TransferState::Deferred)
                t.state = TransferState::Active;

            const TickType dt = now - moveFrom;
            SpaceType delta = 0;
            switch (link.mMode)
            {
            case LinkMode::SharedBandwidth:
                delta = link.mRateBytesPerSec * dt / moving;
                break;
            case LinkMode::FixedThroughput:
                delta = link.mRateBytesPerSec * dt;
                break;
            case LinkMode::FixedDuration:
            {
                const TickType elapsed = std::min<TickType>(now - t.startMovingAt, link.mFixedDurationSec);
                const SpaceType target = static_cast<SpaceType>(
                    static_cast<unsigned __int128>(t.size) * elapsed / link.mFixedDurationSec);
                delta = target > t.dstReplica->current ? target - t.dstReplica->current : 0;
                break;
            }
            }

            const SpaceType before = t.dstReplica->current;
            dstElem.GrowReplica(*t.dstReplica, t.size, delta);
            const SpaceType movedActual = t.dstReplica->current - before;
            link.mTrafficBytes += movedActual;
            mMovedBytesTotal += movedActual;

            if (mCloudListener && movedActual > 0)
            {
                if (dstIsBucket)
                    mCloudListener->OnBucketBytesIn(link.mDst, movedActual, now);
                if (srcIsBucket)
                    mCloudListener->OnBucketBytesOut(link.mSrc, link.mEgressClass, movedActual, now);
            }

            if (t.dstReplica->current == t.size)
            {
                // swap-remove keeps iteration O(1); order within a tick is
                // deterministic for a fixed seed
                runtime.active[i] = runtime.active.back();
                runtime.active.pop_back();
                Complete(slot, now);
                continue;
            }
            ++i;
        }
    }
}

void TransferManager::Update(TickType now)
{
    assert(now >= mLastUpdate);
    EnsureRuntimeSize();

    if (now > mLastUpdate)
        Progress(now);

    for (LinkId linkId = 0; linkId < mRuntime.size(); ++linkId)
        if (!mRuntime[linkId].queued.empty())
            ActivatePending(linkId, now);

    mLastUpdate = now;
}

double TransferManager::MeanDurationSeconds() const
{
    if (mDoneCount == 0)
        throw ModelError("no completed transfers");
    return static_cast<double>(mDurationSumS) / static_cast<double>(mDoneCount);
}

double TransferManager::MeanMovingDurationSeconds() const
{
    if (mDoneCount == 0)
        throw ModelError("no completed transfers");
    return static_cast<double>(mMovingDurationSumS) / static_cast<double>(mDoneCount);
}

double TransferManager::MeanThroughputBytesPerSec() const
{
    if (mDoneCount == 0)
        throw ModelError("no completed transfers");
    return mThroughputSum / static_cast<double>(mDoneCount);
}

SpaceType TransferManager::InFlightBytes() const
{
    SpaceType bytes = 0;
    for (const LinkRuntime& runtime : mRuntime)
        for (std::uint32_t slot : runtime.active)
            bytes += mPool[slot].dstReplica->current;
    return bytes;
}

} // namespace storsim
