#include "storsim/cloud/cost.hpp"

#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace storsim
{
namespace
{

std::vector<PriceTier> ParseTiers(const nlohmann::json& node, const std::string& where)
{
    std::vector<PriceTier> tiers;
    if (node.is_number())
    {
        // shorthand: flat price
        tiers.push_back(PriceTier{std::numeric_limits<double>::infinity(), node.get<double>()});
        return tiers;
    }
    if (!node.is_array() || node.empty())
        throw ConfigError(where + ": tiers must be a non-empty array");
    for (const auto& t : node)
    {
        PriceTier tier;
        tier.price = t.at("price").get<double>();
        if (t.contains("up_to") && !t.at("up_to").is_null())
            tier.upTo = t.at("up_to").get<double>();
        else
            tier.upTo = std::numeric_limits<double>::infinity();
        tiers.push_back(tier);
    }
    return tiers;
}

} // namespace

double PricingSchedule::ApplyTiers(const std::vector<PriceTier>& tiers, double volume)
{
    double cost = 0.0;
    double covered = 0.0;
    for (const PriceTier& tier : tiers)
    {
        if (volume <= covered)
            break;
        const double inTier = std::min(volume, tier.upTo) - covered;
        cost += inTier * tier.price;
        covered = tier.upTo;
    }
    return cost;
}

void PricingSchedule::Validate() const
{
    auto checkTiers = [](const std::vector<PriceTier>& tiers, const std::string& where) {
        if (tiers.empty())
            throw ConfigError(where + ": no tiers");
        double prev = 0.0;
        for (std::size_t i = 0; i < tiers.size(); ++i)
        {
            if (tiers[i].price < 0.0)
                throw ConfigError(where + ": negative price");
            if (i + 1 < tiers.size())
            {
                if (tiers[i].upTo <= prev)
                    throw ConfigError(where + ": tiers must be contiguous and increasing");
                prev = tiers[i].upTo;
            }
            else if (!std::isinf(tiers[i].upTo))
                throw ConfigError(where + ": last tier must be open-ended");
        }
    };
    for (const auto& [name, tiers] : storageClasses)
        checkTiers(tiers, "storage class " + name);
    for (const auto& [name, tiers] : egressClasses)
        checkTiers(tiers, "egress class " + name);
    if (ingressPricePerGiB != 0.0)
        throw ConfigError("ingress must be free of charge");
}

PricingSchedule PricingSchedule::Load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open pricing file: " + path);
    nlohmann::json doc;
    try
    {
        in >> doc;
    }
    catch (const nlohmann::json::exception& ex)
    {
        throw ConfigError("pricing file " + path + ": " + ex.what());
    }

    PricingSchedule schedule;
    try
    {
        schedule.currency = doc.value("currency", "USD");
        for (const auto& [name, node] : doc.at("storage_classes").items())
            schedule.storageClasses[name] = ParseTiers(node.contains("tiers") ? node.at("tiers") : node, "storage class " + name);
        for (const auto& [name, node] : doc.at("egress_classes").items())
            schedule.egressClasses[name] = ParseTiers(node.contains("tiers") ? node.at("tiers") : node, "egress class " + name);
        if (doc.contains("operation_classes"))
            for (const auto& [name, node] : doc.at("operation_classes").items())
                schedule.operationClasses[name] = node.at("price_per_10k").get<double>();
        schedule.ingressPricePerGiB = doc.value("ingress_price_per_gib", 0.0);
    }
    catch (const nlohmann::json::exception& ex)
    {
        throw ConfigError("pricing file " + path + ": " + ex.what());
    }
    schedule.Validate();
    return schedule;
}

BucketAccount::MonthLedger& BucketAccount::Month(TickType now)
{
    const std::size_t m = static_cast<std::size_t>(now / SECONDS_PER_MONTH);
    if (mMonths.size() <= m)
        mMonths.resize(m + 1);
    return mMonths[m];
}

void BucketAccount::Advance(TickType now)
{
    assert(now >= mLastEvent);
    while (mLastEvent < now)
    {
        const std::size_t m = static_cast<std::size_t>(mLastEvent / SECONDS_PER_MONTH);
        const TickType monthEnd = static_cast<TickType>(m + 1) * SECONDS_PER_MONTH;
        const TickType sliceEnd = std::min(now, monthEnd);
        if (mMonths.size() <= m)
            mMonths.resize(m + 1);
        mMonths[m].byteSeconds += static_cast<double>(mVolume) * static_cast<double>(sliceEnd - mLastEvent);
        mLastEvent = sliceEnd;
    }
}

void BucketAccount::OnStore(SpaceType bytes, TickType now)
{
    Advance(now);
    mVolume += bytes;
}

void BucketAccount::OnRelease(SpaceType bytes, TickType now)
{
    Advance(now);
    if (bytes > mVolume)
        throw ModelError("bucket volume would become negative");
    mVolume -= bytes;
}

void BucketAccount::OnIngress(SpaceType bytes, TickType now)
{
    mTotalIngress += bytes;
    (void)now; // ingress is free; tracked only in total
}

void BucketAccount::OnEgress(SpaceType bytes, const std::string& egressClass, TickType now)
{
    assert(bytes > 0);
    if (egressClass.empty())
        throw ModelError("egress without a destination class");
    Month(now).egressBytes[egressClass] += bytes;
}

void BucketAccount::OnOperation(const std::string& opClass, TickType now)
{
    Month(now).operations[opClass] += 1;
}

SpaceType BucketAccount::TotalEgress() const
{
    SpaceType total = 0;
    for (const MonthLedger& month : mMonths)
        for (const auto& [cls, bytes] : month.egressBytes)
            total += bytes;
    return total;
}

double BucketAccount::ByteSecondsTotal() const
{
    double total = 0.0;
    for (const MonthLedger& month : mMonths)
        total += month.byteSeconds;
    return total;
}

CostReport BucketAccount::ComputeCosts(const PricingSchedule& schedule, TickType horizon) const
{
    if (mLastEvent < horizon)
        throw ModelError("account not advanced to the requested horizon");

    const auto storageIt = schedule.storageClasses.find(mStorageClass);
    if (storageIt == schedule.storageClasses.end())
        throw ConfigError("pricing schedule lacks storage class " + mStorageClass);

    CostReport report;
    report.currency = schedule.currency;
    const std::size_t numMonths = static_cast<std::size_t>((horizon + SECONDS_PER_MONTH - 1) / SECONDS_PER_MONTH);
    report.months.resize(numMonths);

    for (std::size_t m = 0; m < numMonths; ++m)
    {
        MonthCosts& out = report.months[m];
        if (m >= mMonths.size())
            continue;
        const MonthLedger& ledger = mMonths[m];

        out.storedGBMonths = ledger.byteSeconds / (1e9 * static_cast<double>(SECONDS_PER_MONTH));
        out.storageCost = PricingSchedule::ApplyTiers(storageIt->second, out.storedGBMonths);

        for (const auto& [cls, bytes] : ledger.egressBytes)
        {
            const auto egressIt = schedule.egressClasses.find(cls);
            if (egressIt == schedule.egressClasses.end())
                throw ConfigError("pricing schedule lacks egress class " + cls);
            const double gib = static_cast<double>(bytes) / BYTES_PER_GIB;
            out.egressGiBByClass[cls] = gib;
            out.networkCost += PricingSchedule::ApplyTiers(egressIt->second, gib);
        }

        for (const auto& [cls, count] : ledger.operations)
        {
            const auto opIt = schedule.operationClasses.find(cls);
            if (opIt == schedule.operationClasses.end())
                throw ConfigError("pricing schedule lacks operation class " + cls);
            out.operationsCost += opIt->second * (static_cast<double>(count) / 1e4);
        }
    }
    return report;
}

double CostReport::TotalNetworkCost() const
{
    double total = 0.0;
    for (const MonthCosts& m : months)
        total += m.networkCost;
    return total;
}

double CostReport::TotalStorageCost() const
{
    double total = 0.0;
    for (const MonthCosts& m : months)
        total += m.storageCost;
    return total;
}

} // namespace storsim
