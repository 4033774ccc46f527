#include <doctest.h>

#include <random>

#include "storsim/infra/model.hpp"

using namespace storsim;

namespace
{

constexpr SpaceType GB = 1000000000ULL;
constexpr SpaceType TB = 1000ULL * GB;

World TwoElementWorld(std::optional<SpaceType> limitA = std::nullopt)
{
    World world;
    world.mSites.push_back(Site{"site-1", {}});
    world.AddElement(0, "a", StorageKind::Disk, limitA, std::nullopt);
    world.AddElement(0, "b", StorageKind::Disk, std::nullopt, std::nullopt);
    return world;
}

} // namespace

TEST_CASE("replica creation reserves the full file size")
{
    World world = TwoElementWorld(100 * TB);
    const FileId file = world.CreateFile(1 * GB);
    StorageElement& a = world.Element(0);

    a.CreateReplica(file, 1 * GB);
    CHECK(a.UsedBytes() == 1 * GB);
    CHECK(a.StoredBytes() == 0);

    SUBCASE("a second replica of the same file is rejected")
    {
        CHECK_THROWS_AS(a.CreateReplica(file, 1 * GB), DuplicateReplicaError);
    }
}

TEST_CASE("reservation beyond the limit is rejected")
{
    // a 134 GB file onto an element with 100 GB free
    World world = TwoElementWorld(100 * GB);
    const FileId file = world.CreateFile(134 * GB);
    CHECK_THROWS_AS(world.Element(0).CreateReplica(file, 134 * GB), InsufficientStorageError);
    CHECK(world.Element(0).UsedBytes() == 0);
}

TEST_CASE("deleting a replica frees its reservation; recreate is allowed")
{
    World world = TwoElementWorld();
    const FileId file = world.CreateFile(1 * GB);
    StorageElement& a = world.Element(0);

    a.CreateReplica(file, 1 * GB, 1 * GB);
    CHECK(a.DeleteReplica(file, 1 * GB) == 1 * GB);
    CHECK(a.UsedBytes() == 0);
    CHECK(a.FindReplica(file) == nullptr);

    a.CreateReplica(file, 1 * GB);
    CHECK(a.UsedBytes() == 1 * GB);
}

TEST_CASE("replicas busy with a transfer cannot be deleted")
{
    World world = TwoElementWorld();
    const FileId file = world.CreateFile(1 * GB);
    StorageElement& a = world.Element(0);
    Replica* replica = a.CreateReplica(file, 1 * GB);

    replica->inboundTransfer = true;
    CHECK_THROWS_AS(a.DeleteReplica(file, 1 * GB), ReplicaBusyError);
    replica->inboundTransfer = false;
    replica->readLocks = 1;
    CHECK_THROWS_AS(a.DeleteReplica(file, 1 * GB), ReplicaBusyError);
    replica->readLocks = 0;
    CHECK_NOTHROW(a.DeleteReplica(file, 1 * GB));
}

TEST_CASE("grow clamps at the file size")
{
    World world = TwoElementWorld();
    StorageElement& a = world.Element(0);

    SUBCASE("one second at the validation throughput")
    {
        const FileId file = world.CreateFile(1730 * 1000000ULL);
        Replica* replica = a.CreateReplica(file, 1730 * 1000000ULL);
        CHECK(a.GrowReplica(*replica, 1730 * 1000000ULL, 8100000) == 8100000);
    }

    SUBCASE("growth past the size stays at the size")
    {
        const FileId file = world.CreateFile(1730000000ULL);
        Replica* replica = a.CreateReplica(file, 1730000000ULL, 1730000000ULL);
        CHECK(a.GrowReplica(*replica, 1730000000ULL, 5000000) == 1730000000ULL);
    }

    SUBCASE("repeated one-second growth completes a 1.73 GB file in 214 steps")
    {
        const SpaceType size = 1730000000ULL;
        const FileId file = world.CreateFile(size);
        Replica* replica = a.CreateReplica(file, size);
        int steps = 0;
        while (replica->current < size)
        {
            a.GrowReplica(*replica, size, 8100000);
            ++steps;
        }
        CHECK(steps == 214); // ceil(1730 / 8.10)
    }
}

TEST_CASE("worker elements must not carry a limit")
{
    World world;
    world.mSites.push_back(Site{"site-1", {}});
    CHECK_THROWS_AS(world.AddElement(0, "w", StorageKind::Worker, SpaceType{1}, std::nullopt), ConfigError);
    CHECK_NOTHROW(world.AddElement(0, "w", StorageKind::Worker, std::nullopt, std::nullopt));
}

TEST_CASE("links are directional and unique per ordered pair")
{
    World world = TwoElementWorld();
    const LinkId forward = world.AddLink(0, 1, LinkMode::FixedThroughput, 1000, 0, std::nullopt);
    CHECK_THROWS_AS(world.AddLink(0, 1, LinkMode::FixedThroughput, 1000, 0, std::nullopt), ConfigError);
    const LinkId backward = world.AddLink(1, 0, LinkMode::FixedThroughput, 1000, 0, std::nullopt);
    CHECK(forward != backward);
    CHECK(world.FindLink(0, 1) == forward);
    CHECK(world.FindLink(1, 0) == backward);

    World noLink = TwoElementWorld();
    CHECK_THROWS_AS(noLink.FindLink(0, 1), NoSuchLinkError);
}

TEST_CASE("property: storage conservation under random create/delete/grow sequences")
{
    std::mt19937 gen(4242);
    World world = TwoElementWorld(SpaceType{50} * GB);
    StorageElement& element = world.Element(0);

    std::vector<FileId> files;
    for (int i = 0; i < 40; ++i)
        files.push_back(world.CreateFile(1 + gen() % (2 * GB)));

    std::vector<bool> present(files.size(), false);
    for (int step = 0; step < 5000; ++step)
    {
        const std::size_t pick = gen() % files.size();
        const SpaceType size = world.GetFile(files[pick]).size;
        if (!present[pick])
        {
            if (element.CanStore(size))
            {
                element.CreateReplica(files[pick], size);
                present[pick] = true;
            }
            else
            {
                CHECK_THROWS_AS(element.CreateReplica(files[pick], size), InsufficientStorageError);
            }
        }
        else if (gen() % 2)
        {
            element.GrowReplica(*element.FindReplica(files[pick]), size, gen() % GB);
        }
        else
        {
            element.DeleteReplica(files[pick], size);
            present[pick] = false;
        }

        // used equals the sum of reserved sizes of resident replicas
        SpaceType expected = 0;
        for (std::size_t i = 0; i < files.size(); ++i)
            if (present[i])
                expected += world.GetFile(files[i]).size;
        REQUIRE(element.UsedBytes() == expected);
        REQUIRE(element.UsedBytes() <= 50 * GB);

        // at most one replica per (file, element)
        std::size_t count = 0;
        for (std::size_t i = 0; i < files.size(); ++i)
            count += present[i] ? 1 : 0;
        REQUIRE(element.ReplicaCount() == count);
    }
}
