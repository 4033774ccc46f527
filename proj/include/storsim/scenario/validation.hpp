#pragma once

#include <vector>

#include <json.hpp>

#include "storsim/dist/random.hpp"
#include "storsim/io/config.hpp"
#include "storsim/io/output.hpp"
#include "storsim/sim/engine.hpp"
#include "storsim/transfer/manager.hpp"

namespace storsim
{

/// Correctness scenario: a generator creating uniform-random source to
/// destination transfers across the declared links every generator tick.
/// Completed destination replicas are deleted again so files stay eligible.
class ValidationScenario : public ITransferListener
{
public:
    ValidationScenario(World& world, TransferManager& manager, Rng& rng,
                       const ScenarioConfig& config, RecordStreams& streams);

    void Initialize();
    void Tick(TickType now);
    void OnTransferComplete(const Transfer& transfer, TickType now) override;

    nlohmann::ordered_json Summary(TickType duration) const;

    std::uint64_t CreatedOnDemand() const { return mCreatedOnDemand; }

private:
    struct LinkStream
    {
        LinkId link;
        ElementId src;
        ElementId dst;
        std::size_t srcPool; // index into mPools
        std::uint32_t inflightOrStored = 0; // pool files with a replica at dst
        RateAccumulator accumulator;
    };

    struct Pool
    {
        ElementId element;
        std::vector<FileId> files;
    };

    FileId NewPoolFile(std::size_t poolIdx);

    World& mWorld;
    TransferManager& mManager;
    Rng& mRng;
    const ScenarioConfig& mConfig;
    RecordStreams& mStreams;

    ValueDist mFileSize;
    ValueDist mTransferCount;
    std::vector<Pool> mPools;
    std::vector<LinkStream> mStreamsPerLink;
    std::vector<std::size_t> mFilePool;  // file id -> pool index
    std::uint64_t mCreatedOnDemand = 0;
};

} // namespace storsim
