#include "storsim/scenario/validation.hpp"

#include <cassert>
#include <cmath>

namespace storsim
{

ValidationScenario::ValidationScenario(World& world, TransferManager& manager, Rng& rng,
                                       const ScenarioConfig& config, RecordStreams& streams)
    : mWorld(world), mManager(manager), mRng(rng), mConfig(config), mStreams(streams),
      mFileSize(config.validation->fileSize), mTransferCount(config.validation->transferCount)
{
    mManager.SetListener(this);
}

FileId ValidationScenario::NewPoolFile(std::size_t poolIdx)
{
    const SpaceType size = static_cast<SpaceType>(std::llround(mFileSize.Sample(mRng)));
    const FileId file = mWorld.CreateFile(size);
    StorageElement& element = mWorld.Element(mPools[poolIdx].element);
    element.CreateReplica(file, size, size); // complete from the start
    mPools[poolIdx].files.push_back(file);
    if (mFilePool.size() <= file)
        mFilePool.resize(file + 1);
    mFilePool[file] = poolIdx;
    return file;
}

void ValidationScenario::Initialize()
{
    const ValidationGenConfig& gen = *mConfig.validation;

    std::vector<ElementId> elements;
    for (const std::string& name : gen.elements)
    {
        for (ElementId id = 0; id < mWorld.ElementCount(); ++id)
            if (mWorld.Element(id).mName == name)
                elements.push_back(id);
    }
    assert(elements.size() == gen.elements.size());

    for (ElementId element : elements)
    {
        mPools.push_back(Pool{element, {}});
        for (std::uint32_t i = 0; i < gen.initialReplicasPerElement; ++i)
            NewPoolFile(mPools.size() - 1);
    }

    // one generator stream per declared link between participating elements
    for (LinkId link = 0; link < mWorld.LinkCount(); ++link)
    {
        const NetworkLink& l = mWorld.Link(link);
        std::size_t srcPool = mPools.size();
        bool dstParticipates = false;
        for (std::size_t p = 0; p < mPools.size(); ++p)
        {
            if (mPools[p].element == l.mSrc)
                srcPool = p;
            if (mPools[p].element == l.mDst)
                dstParticipates = true;
        }
        if (srcPool < mPools.size() && dstParticipates)
            mStreamsPerLink.push_back(LinkStream{link, l.mSrc, l.mDst, srcPool, 0, {}});
    }
}

void ValidationScenario::Tick(TickType now)
{
    for (LinkStream& stream : mStreamsPerLink)
    {
        const std::uint64_t toCreate = stream.accumulator.Draw(mTransferCount, mRng);
        for (std::uint64_t i = 0; i < toCreate; ++i)
        {
            Pool& pool = mPools[stream.srcPool];
            assert(stream.inflightOrStored <= pool.files.size());
            if (stream.inflightOrStored == pool.files.size())
            {
                // no file satisfies the selection conditions: create a new one
                NewPoolFile(stream.srcPool);
                ++mCreatedOnDemand;
            }

            const StorageElement& dst = mWorld.Element(stream.dst);
            FileId file;
            do
            {
                file = pool.files[mRng.Below(pool.files.size())];
            } while (dst.FindReplica(file) != nullptr);

            mManager.Enqueue(file, stream.src, stream.dst, now);
            stream.inflightOrStored += 1;
        }
    }
}

void ValidationScenario::OnTransferComplete(const Transfer& transfer, TickType now)
{
    const NetworkLink& link = mWorld.Link(transfer.link);

    if (mStreams.Enabled())
        mStreams.WriteTransfer(transfer, mWorld.Element(link.mSrc).mName + ">" + mWorld.Element(link.mDst).mName);

    // delete the destination replica again so the file can be transferred again
    StorageElement& dst = mWorld.Element(link.mDst);
    dst.DeleteReplica(transfer.file, transfer.size);

    for (LinkStream& stream : mStreamsPerLink)
    {
        if (stream.link == transfer.link)
        {
            assert(stream.inflightOrStored > 0);
            stream.inflightOrStored -= 1;
            break;
        }
    }
    (void)now;
}

nlohmann::ordered_json ValidationScenario::Summary(TickType duration) const
{
    nlohmann::ordered_json out;
    const std::uint64_t done = mManager.DoneCount();

    std::uint64_t sumLinkTraffic = 0;
    for (LinkId link = 0; link < mWorld.LinkCount(); ++link)
        sumLinkTraffic += mWorld.Link(link).mTrafficBytes;

    nlohmann::ordered_json metrics;
    metrics["transfers_done"] = done;
    metrics["mean_file_size_gb"] = done ? static_cast<double>(mManager.DoneBytesTotal()) / static_cast<double>(done) / BYTES_PER_GB : 0.0;
    metrics["transfers_per_10s"] = static_cast<double>(done) / (static_cast<double>(duration) / 10.0);
    metrics["throughput_mb_s"] = done ? mManager.MeanThroughputBytesPerSec() / BYTES_PER_MB : 0.0;
    metrics["duration_s"] = done ? mManager.MeanDurationSeconds() : 0.0;
    metrics["traffic_total_bytes"] = mManager.MovedBytesTotal();
    metrics["traffic_gb_per_s"] = static_cast<double>(mManager.MovedBytesTotal()) / static_cast<double>(duration) / BYTES_PER_GB;
    metrics["created_on_demand"] = mCreatedOnDemand;
    out["metrics"] = std::move(metrics);

    nlohmann::ordered_json conservation;
    conservation["moved_total_bytes"] = mManager.MovedBytesTotal();
    conservation["delivered_total_bytes"] = mManager.DoneBytesTotal() + mManager.InFlightBytes();
    conservation["sum_link_traffic_bytes"] = sumLinkTraffic;
    out["flow_conservation"] = std::move(conservation);
    return out;
}

} // namespace storsim
