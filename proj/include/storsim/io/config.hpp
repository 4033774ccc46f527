#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "storsim/dist/random.hpp"
#include "storsim/infra/model.hpp"

namespace storsim
{

struct ElementConfig
{
    std::string name;
    StorageKind kind = StorageKind::Disk;
    std::optional<SpaceType> limitBytes;
    std::optional<DistSpec> accessLatency;
};

struct SiteConfig
{
    std::string name;
    std::vector<ElementConfig> elements;
};

struct LinkConfig
{
    std::string source;
    std::string destination;
    LinkMode mode = LinkMode::FixedThroughput;
    std::uint64_t rateBytesPerSec = 0;
    TickType durationSec = 0;
    std::optional<std::uint32_t> maxActive;
    std::string egressClass;
};

struct CloudConfig
{
    std::string bucket; // element name
    std::string pricingFile;
    std::string storageClass = "standard";
};

struct ValidationGenConfig
{
    std::vector<std::string> elements;
    std::uint32_t initialReplicasPerElement = 0;
    DistSpec fileSize;
    DistSpec transferCount;
};

struct HcdcSiteBinding
{
    std::string site;
    std::string tape;
    std::string disk;
    std::string worker;
    std::string output;
};

struct HcdcGenConfig
{
    std::string configuration; // "I" | "II" | "III"
    std::vector<HcdcSiteBinding> sites;
    std::string bucket; // element name, empty when the bucket is disabled
    std::uint32_t initialFilesPerSite = 0;
    DistSpec fileSize;
    DistSpec popularity;
    DistSpec jobCount;
    DistSpec jobDuration;
};

enum class GeneratorKind : std::uint8_t
{
    Validation,
    Hcdc,
};

struct ScenarioConfig
{
    std::string name;
    TickType durationSec = 0;
    std::uint64_t seed = 1;
    std::uint32_t runs = 1;
    TickType managerIntervalSec = 1;
    TickType generatorIntervalSec = 10;
    TickType timeseriesIntervalSec = 3600;
    bool writeRecords = true;

    std::vector<SiteConfig> sites;
    std::vector<LinkConfig> links;
    std::optional<CloudConfig> cloud;

    GeneratorKind generator = GeneratorKind::Validation;
    std::optional<ValidationGenConfig> validation;
    std::optional<HcdcGenConfig> hcdc;

    // directory of the config file, for resolving relative paths (pricing file)
    std::string baseDir;

    static ScenarioConfig Load(const std::string& path);
    static ScenarioConfig Parse(const nlohmann::json& doc, const std::string& baseDir = {});
    nlohmann::ordered_json Emit() const;

    std::string ResolvePath(const std::string& relative) const;

    // builds the infrastructure; element ids follow declaration order
    World BuildWorld() const;

    const ElementConfig* FindElement(const std::string& name) const;
};

nlohmann::ordered_json EmitDistSpec(const DistSpec& spec);
DistSpec ParseDistSpec(const nlohmann::json& node, const std::string& fieldPath);

} // namespace storsim
