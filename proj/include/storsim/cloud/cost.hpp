#pragma once

#include <map>
#include <string>
#include <vector>

#include "storsim/common/types.hpp"

namespace storsim
{

/// One price band: applies to volume up to `upTo` (in the schedule's unit),
/// infinity for the last band. Bands are contiguous starting at zero and, for
/// egress, reset every 30-day month.
struct PriceTier
{
    double upTo;  // unit volume, inf for open-ended
    double price; // per unit
};

struct PricingSchedule
{
    std::string currency = "USD";
    // storage: per GB-month (GB = 1e9 bytes), tiered by stored GB-months
    std::map<std::string, std::vector<PriceTier>> storageClasses;
    // egress: per GiB (2^30 bytes), tiered by monthly egress GiB
    std::map<std::string, std::vector<PriceTier>> egressClasses;
    // operations: per 10^4 operations
    std::map<std::string, double> operationClasses;
    double ingressPricePerGiB = 0.0;

    static PricingSchedule Load(const std::string& path);
    void Validate() const;

    // applies contiguous tiers to a volume expressed in the tier unit
    static double ApplyTiers(const std::vector<PriceTier>& tiers, double volume);
};

struct MonthCosts
{
    double storageCost = 0.0;
    double networkCost = 0.0;
    double operationsCost = 0.0;
    double storedGBMonths = 0.0;
    std::map<std::string, double> egressGiBByClass;
};

struct CostReport
{
    std::string currency;
    std::vector<MonthCosts> months;

    double TotalNetworkCost() const;
    double TotalStorageCost() const;
};

/// Per-bucket accounting: exact piecewise-constant integral of stored bytes,
/// plus monthly ingress/egress/operation counters.
class BucketAccount
{
public:
    explicit BucketAccount(std::string storageClass = "standard") : mStorageClass(std::move(storageClass)) {}

    void OnStore(SpaceType bytes, TickType now);   // stored volume grows
    void OnRelease(SpaceType bytes, TickType now); // stored volume shrinks
    void OnIngress(SpaceType bytes, TickType now);
    void OnEgress(SpaceType bytes, const std::string& egressClass, TickType now);
    void OnOperation(const std::string& opClass, TickType now);

    // advances the integral to `now` without changing the volume
    void Advance(TickType now);

    SpaceType CurrentVolume() const { return mVolume; }
    SpaceType TotalIngress() const { return mTotalIngress; }
    SpaceType TotalEgress() const;
    double ByteSecondsTotal() const;

    std::size_t MonthCount() const { return mMonths.size(); }
    double MonthByteSeconds(std::size_t m) const { return mMonths[m].byteSeconds; }
    const std::map<std::string, SpaceType>& MonthEgress(std::size_t m) const { return mMonths[m].egressBytes; }
    const std::map<std::string, std::uint64_t>& MonthOperations(std::size_t m) const { return mMonths[m].operations; }

    // evaluates the schedule month by month over [0, horizon)
    CostReport ComputeCosts(const PricingSchedule& schedule, TickType horizon) const;

private:
    struct MonthLedger
    {
        double byteSeconds = 0.0;
        std::map<std::string, SpaceType> egressBytes;
        std::map<std::string, std::uint64_t> operations;
    };

    MonthLedger& Month(TickType now);

    std::string mStorageClass;
    SpaceType mVolume = 0;
    SpaceType mTotalIngress = 0;
    TickType mLastEvent = 0;
    std::vector<MonthLedger> mMonths;
};

} // namespace storsim
