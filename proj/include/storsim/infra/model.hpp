#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "storsim/common/types.hpp"
#include "storsim/dist/random.hpp"

namespace storsim
{

enum class StorageKind : std::uint8_t
{
    Tape,
    Disk,
    Worker,
    Output,
    CloudBucket,
};

const char* ToString(StorageKind kind);
StorageKind StorageKindFromString(const std::string& name);

struct File
{
    SpaceType size = 0;
    std::uint32_t popularity = 1;
    TickType expiresAt = 0; // 0 = never
};

struct Replica
{
    SpaceType current = 0;
    FileId file = 0;
    std::uint32_t readLocks = 0;  // active transfers reading this replica
    std::uint32_t egressCount = 0; // transfers served from this replica
    bool inboundTransfer = false;  // an active transfer is filling this replica
};

enum class LinkMode : std::uint8_t
{
    SharedBandwidth, // bytes/s divided equally among moving transfers
    FixedThroughput, // bytes/s per transfer, independent of the active count
    FixedDuration,   // every transfer completes after a fixed number of seconds
};

class NetworkLink
{
public:
    LinkId mId = 0;
    ElementId mSrc = 0;
    ElementId mDst = 0;
    LinkMode mMode = LinkMode::FixedThroughput;
    std::uint64_t mRateBytesPerSec = 0; // SharedBandwidth / FixedThroughput
    TickType mFixedDurationSec = 0;     // FixedDuration
    std::optional<std::uint32_t> mMaxActive;
    std::string mEgressClass; // billing class when the source is a cloud bucket

    // counters
    std::uint64_t mTrafficBytes = 0;
    std::uint64_t mDoneTransfers = 0;
    std::uint32_t mActiveTransfers = 0; // includes latency-deferred transfers
};

/// A named storage area. `used` tracks reserved bytes: a replica reserves its
/// file's full size at creation so a configured limit can never be overshot
/// by in-flight growth.
class StorageElement
{
public:
    ElementId mId = 0;
    std::uint32_t mSiteIdx = 0;
    std::string mName;
    StorageKind mKind = StorageKind::Disk;
    std::optional<SpaceType> mLimit;
    std::optional<DistSpec> mAccessLatency; // per-transfer deferral for sources

    SpaceType UsedBytes() const { return mUsed; }
    SpaceType StoredBytes() const { return mStored; }
    std::size_t ReplicaCount() const { return mReplicas.size(); }

    bool CanStore(SpaceType bytes) const
    {
        return !mLimit || mUsed + bytes <= *mLimit;
    }

    // reserves fileSize and registers a replica with the given initial content
    Replica* CreateReplica(FileId file, SpaceType fileSize, SpaceType initialSize = 0);

    // returns freed (reserved) bytes; throws ReplicaBusyError while a transfer
    // reads from or writes to the replica
    SpaceType DeleteReplica(FileId file, SpaceType fileSize);

    // clamps at fileSize; returns the new current size
    SpaceType GrowReplica(Replica& replica, SpaceType fileSize, SpaceType delta);

    Replica* FindReplica(FileId file);
    const Replica* FindReplica(FileId file) const;

    template <typename Fn>
    void ForEachReplica(Fn&& fn) const
    {
        for (const auto& [file, replica] : mReplicas)
            fn(file, replica);
    }

private:
    SpaceType mUsed = 0;   // reserved bytes
    SpaceType mStored = 0; // actually written bytes
    std::unordered_map<FileId, Replica> mReplicas;
};

struct Site
{
    std::string name;
    std::vector<ElementId> elements;
};

/// The simulated world: sites, storage elements, directed links, files.
class World
{
public:
    ElementId AddElement(std::uint32_t siteIdx, std::string name, StorageKind kind,
                         std::optional<SpaceType> limit, std::optional<DistSpec> accessLatency);
    LinkId AddLink(ElementId src, ElementId dst, LinkMode mode, std::uint64_t rateBytesPerSec,
                   TickType fixedDurationSec, std::optional<std::uint32_t> maxActive,
                   std::string egressClass = {});

    FileId CreateFile(SpaceType size, std::uint32_t popularity = 1, TickType expiresAt = 0);

    StorageElement& Element(ElementId id) { return *mElements[id]; }
    const StorageElement& Element(ElementId id) const { return *mElements[id]; }
    NetworkLink& Link(LinkId id) { return *mLinks[id]; }
    const NetworkLink& Link(LinkId id) const { return *mLinks[id]; }
    File& GetFile(FileId id) { return mFiles[id]; }
    const File& GetFile(FileId id) const { return mFiles[id]; }

    // throws NoSuchLinkError when the directed pair is not declared
    LinkId FindLink(ElementId src, ElementId dst) const;
    bool HasLink(ElementId src, ElementId dst) const;

    std::size_t ElementCount() const { return mElements.size(); }
    std::size_t LinkCount() const { return mLinks.size(); }
    std::size_t FileCount() const { return mFiles.size(); }

    std::vector<Site> mSites;

private:
    static std::uint64_t LinkKey(ElementId src, ElementId dst)
    {
        return (static_cast<std::uint64_t>(src) << 32) | dst;
    }

    std::vector<std::unique_ptr<StorageElement>> mElements;
    std::vector<std::unique_ptr<NetworkLink>> mLinks;
    std::vector<File> mFiles;
    std::unordered_map<std::uint64_t, LinkId> mLinkIndex;
};

} // namespace storsim
