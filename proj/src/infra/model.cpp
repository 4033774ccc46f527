#include "storsim/infra/model.hpp"

#include <cassert>

namespace storsim
{

const char* ToString(StorageKind kind)
{
    switch (kind)
    {
    case StorageKind::Tape: return "tape";
    case StorageKind::Disk: return "disk";
    case StorageKind::Worker: return "worker";
    case StorageKind::Output: return "output";
    case StorageKind::CloudBucket: return "cloud_bucket";
    }
    return "?";
}

StorageKind StorageKindFromString(const std::string& name)
{
    if (name == "tape") return StorageKind::Tape;
    if (name == "disk") return StorageKind::Disk;
    if (name == "worker") return StorageKind::Worker;
    if (name == "output") return StorageKind::Output;
    if (name == "cloud_bucket") return StorageKind::CloudBucket;
    throw ConfigError("unknown storage kind: " + name);
}

Replica* StorageElement::CreateReplica(FileId file, SpaceType fileSize, SpaceType initialSize)
{
    if (mReplicas.count(file))
        throw DuplicateReplicaError("file " + std::to_string(file) + " already has a replica at " + mName);
    if (!CanStore(fileSize))
        throw InsufficientStorageError("element " + mName + " cannot reserve " + std::to_string(fileSize) + " bytes");
    assert(initialSize <= fileSize);

    mUsed += fileSize;
    mStored += initialSize;
    Replica& replica = mReplicas[file];
    replica.file = file;
    replica.current = initialSize;
    return &replica;
}

SpaceType StorageElement::DeleteReplica(FileId file, SpaceType fileSize)
{
    auto it = mReplicas.find(file);
    if (it == mReplicas.end())
        throw ModelError("no replica of file " + std::to_string(file) + " at " + mName);
    if (it->second.inboundTransfer)
        throw ReplicaBusyError("replica of file " + std::to_string(file) + " at " + mName + " is being written");
    if (it->second.readLocks > 0)
        throw ReplicaBusyError("replica of file " + std::to_string(file) + " at " + mName + " is being read");

    assert(mUsed >= fileSize);
    assert(mStored >= it->second.current);
    mUsed -= fileSize;
    mStored -= it->second.current;
    mReplicas.erase(it);
    return fileSize;
}

SpaceType StorageElement::GrowReplica(Replica& replica, SpaceType fileSize, SpaceType delta)
{
    const SpaceType grown = std::min<SpaceType>(replica.current + delta, fileSize);
    mStored += grown - replica.current;
    replica.current = grown;
    return grown;
}

Replica* StorageElement::FindReplica(FileId file)
{
    auto it = mReplicas.find(file);
    return it == mReplicas.end() ? nullptr : &it->second;
}

const Replica* StorageElement::FindReplica(FileId file) const
{
    auto it = mReplicas.find(file);
    return it == mReplicas.end() ? nullptr : &it->second;
}

ElementId World::AddElement(std::uint32_t siteIdx, std::string name, StorageKind kind,
                            std::optional<SpaceType> limit, std::optional<DistSpec> accessLatency)
{
    if (kind == StorageKind::Worker && limit)
        throw ConfigError("worker storage element " + name + " must not have a limit");

    auto element = std::make_unique<StorageElement>();
    element->mId = static_cast<ElementId>(mElements.size());
    element->mSiteIdx = siteIdx;
    element->mName = std::move(name);
    element->mKind = kind;
    element->mLimit = limit;
    element->mAccessLatency = std::move(accessLatency);
    mElements.push_back(std::move(element));

    assert(siteIdx < mSites.size());
    mSites[siteIdx].elements.push_back(mElements.back()->mId);
    return mElements.back()->mId;
}

LinkId World::AddLink(ElementId src, ElementId dst, LinkMode mode, std::uint64_t rateBytesPerSec,
                      TickType fixedDurationSec, std::optional<std::uint32_t> maxActive,
                      std::string egressClass)
{
    if (src == dst)
        throw ConfigError("network link endpoints must differ");
    if (mLinkIndex.count(LinkKey(src, dst)))
        throw ConfigError("duplicate network link " + Element(src).mName + " -> " + Element(dst).mName);

    auto link = std::make_unique<NetworkLink>();
    link->mId = static_cast<LinkId>(mLinks.size());
    link->mSrc = src;
    link->mDst = dst;
    link->mMode = mode;
    link->mRateBytesPerSec = rateBytesPerSec;
    link->mFixedDurationSec = fixedDurationSec;
    link->mMaxActive = maxActive;
    link->mEgressClass = std::move(egressClass);
    mLinkIndex[LinkKey(src, dst)] = link->mId;
    mLinks.push_back(std::move(link));
    return mLinks.back()->mId;
}

FileId World::CreateFile(SpaceType size, std::uint32_t popularity, TickType expiresAt)
{
    assert(size > 0);
    mFiles.push_back(File{size, popularity, expiresAt});
    return static_cast<FileId>(mFiles.size() - 1);
}

LinkId World::FindLink(ElementId src, ElementId dst) const
{
    auto it = mLinkIndex.find(LinkKey(src, dst));
    if (it == mLinkIndex.end())
        throw NoSuchLinkError("no link " + Element(src).mName + " -> " + Element(dst).mName);
    return it->second;
}

bool World::HasLink(ElementId src, ElementId dst) const
{
    return mLinkIndex.count(LinkKey(src, dst)) > 0;
}

} // namespace storsim
