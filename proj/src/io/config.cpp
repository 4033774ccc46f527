#include "storsim/io/config.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace storsim
{
namespace
{

double ScaleFromJson(const nlohmann::json& node, const std::string& fieldPath)
{
    if (node.is_number())
        return node.get<double>();
    const std::string name = node.get<std::string>();
    if (name == "GiB") return BYTES_PER_GIB;
    if (name == "GB") return BYTES_PER_GB;
    if (name == "MB") return BYTES_PER_MB;
    if (name == "minutes") return 60.0;
    if (name == "seconds" || name == "s") return 1.0;
    throw ConfigError(fieldPath + ".scale: unknown unit " + name);
}

std::string ScaleToJson(double scale, nlohmann::ordered_json& node)
{
    if (scale == BYTES_PER_GIB) { node["scale"] = "GiB"; return "GiB"; }
    if (scale == BYTES_PER_GB) { node["scale"] = "GB"; return "GB"; }
    if (scale == BYTES_PER_MB) { node["scale"] = "MB"; return "MB"; }
    if (scale == 60.0) { node["scale"] = "minutes"; return "minutes"; }
    if (scale != 1.0) node["scale"] = scale;
    return {};
}

class ErrorCollector
{
public:
    void Add(const std::string& message) { mErrors.push_back(message); }

    template <typename Fn>
    void Guard(Fn&& fn)
    {
        try
        {
            fn();
        }
        catch (const ConfigError& ex)
        {
            Add(ex.what());
        }
        catch (const nlohmann::json::exception& ex)
        {
            Add(ex.what());
        }
    }

    void Throw() const
    {
        if (mErrors.empty())
            return;
        std::string joined = "invalid scenario config:";
        for (const std::string& e : mErrors)
            joined += "\n  - " + e;
        throw ConfigError(joined);
    }

private:
    std::vector<std::string> mErrors;
};

} // namespace

DistSpec ParseDistSpec(const nlohmann::json& node, const std::string& fieldPath)
{
    if (!node.is_object())
        throw ConfigError(fieldPath + ": distribution must be an object");
    DistSpec spec;
    const std::string kind = node.value("kind", "");
    if (kind == "constant")
    {
        spec.kind = DistKind::Constant;
        spec.value = node.at("value").get<double>();
    }
    else if (kind == "exponential")
    {
        spec.kind = DistKind::Exponential;
        spec.lambda = node.at("lambda").get<double>();
    }
    else if (kind == "normal")
    {
        spec.kind = DistKind::Normal;
        spec.mu = node.at("mu").get<double>();
        spec.sigma = node.at("sigma").get<double>();
    }
    else if (kind == "geometric")
    {
        spec.kind = DistKind::Geometric;
        spec.p = node.at("p").get<double>();
    }
    else
        throw ConfigError(fieldPath + ".kind: unknown distribution " + kind);

    spec.shift = node.value("shift", 0.0);
    if (node.contains("scale"))
        spec.scale = ScaleFromJson(node.at("scale"), fieldPath);
    if (node.contains("min") && !node.at("min").is_null())
        spec.min = node.at("min").get<double>();
    if (node.contains("max") && !node.at("max").is_null())
        spec.max = node.at("max").get<double>();
    const std::string truncation = node.value("truncation", "rejection");
    if (truncation == "rejection")
        spec.truncation = TruncationPolicy::Rejection;
    else if (truncation == "clamp")
        spec.truncation = TruncationPolicy::Clamp;
    else
        throw ConfigError(fieldPath + ".truncation: must be rejection or clamp");

    try
    {
        ValueDist check(spec); // validates parameters and bound mass
    }
    catch (const ConfigError& ex)
    {
        throw ConfigError(fieldPath + ": " + ex.what());
    }
    return spec;
}

nlohmann::ordered_json EmitDistSpec(const DistSpec& spec)
{
    nlohmann::ordered_json node;
    switch (spec.kind)
    {
    case DistKind::Constant:
        node["kind"] = "constant";
        node["value"] = spec.value;
        break;
    case DistKind::Exponential:
        node["kind"] = "exponential";
        node["lambda"] = spec.lambda;
        break;
    case DistKind::Normal:
        node["kind"] = "normal";
        node["mu"] = spec.mu;
        node["sigma"] = spec.sigma;
        break;
    case DistKind::Geometric:
        node["kind"] = "geometric";
        node["p"] = spec.p;
        break;
    }
    if (spec.shift != 0.0)
        node["shift"] = spec.shift;
    ScaleToJson(spec.scale, node);
    if (spec.min)
        node["min"] = *spec.min;
    if (spec.max)
        node["max"] = *spec.max;
    if (spec.truncation == TruncationPolicy::Clamp)
        node["truncation"] = "clamp";
    return node;
}

ScenarioConfig ScenarioConfig::Load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    nlohmann::json doc;
    try
    {
        in >> doc;
    }
    catch (const nlohmann::json::exception& ex)
    {
        throw ConfigError("config file " + path + ": " + ex.what());
    }
    return Parse(doc, std::filesystem::path(path).parent_path().string());
}

ScenarioConfig ScenarioConfig::Parse(const nlohmann::json& doc, const std::string& baseDir)
{
    ScenarioConfig config;
    config.baseDir = baseDir;
    ErrorCollector errors;

    errors.Guard([&] {
        config.name = doc.value("name", "scenario");
        config.durationSec = doc.at("duration_s").get<TickType>();
        if (config.durationSec == 0)
            throw ConfigError("duration_s: must be positive");
        config.seed = doc.value("seed", 1ULL);
        config.runs = doc.value("runs", 1U);
    });

    errors.Guard([&] {
        if (doc.contains("intervals"))
        {
            const auto& intervals = doc.at("intervals");
            config.managerIntervalSec = intervals.value("transfer_manager_s", 1ULL);
            config.generatorIntervalSec = intervals.value("transfer_generator_s", 10ULL);
            config.timeseriesIntervalSec = intervals.value("timeseries_s", 3600ULL);
        }
        if (config.managerIntervalSec < 1 || config.generatorIntervalSec < 1 || config.timeseriesIntervalSec < 1)
            throw ConfigError("intervals: must be >= 1 s");
    });

    errors.Guard([&] {
        if (doc.contains("output"))
            config.writeRecords = doc.at("output").value("records", true);
    });

    std::unordered_set<std::string> elementNames;
    errors.Guard([&] {
        std::size_t siteIdx = 0;
        for (const auto& siteNode : doc.at("sites"))
        {
            SiteConfig site;
            site.name = siteNode.at("name").get<std::string>();
            std::size_t elemIdx = 0;
            for (const auto& elemNode : siteNode.at("elements"))
            {
                const std::string fieldPath = "sites[" + std::to_string(siteIdx) + "].elements[" + std::to_string(elemIdx) + "]";
                ElementConfig elem;
                elem.name = elemNode.at("name").get<std::string>();
                elem.kind = StorageKindFromString(elemNode.at("kind").get<std::string>());
                if (elemNode.contains("limit_bytes") && !elemNode.at("limit_bytes").is_null())
                    elem.limitBytes = elemNode.at("limit_bytes").get<SpaceType>();
                if (elem.kind == StorageKind::Worker && elem.limitBytes)
                    throw ConfigError(fieldPath + ".limit_bytes: worker storage elements must not have a limit");
                if (elemNode.contains("access_latency") && !elemNode.at("access_latency").is_null())
                    elem.accessLatency = ParseDistSpec(elemNode.at("access_latency"), fieldPath + ".access_latency");
                if (!elementNames.insert(elem.name).second)
                    throw ConfigError(fieldPath + ".name: duplicate element name " + elem.name);
                site.elements.push_back(std::move(elem));
                ++elemIdx;
            }
            config.sites.push_back(std::move(site));
            ++siteIdx;
        }
        if (config.sites.empty())
            throw ConfigError("sites: at least one site required");
    });

    errors.Guard([&] {
        std::size_t linkIdx = 0;
        for (const auto& linkNode : doc.at("links"))
        {
            const std::string fieldPath = "links[" + std::to_string(linkIdx) + "]";
            LinkConfig link;
            link.source = linkNode.at("source").get<std::string>();
            link.destination = linkNode.at("destination").get<std::string>();
            for (const std::string& endpoint : {link.source, link.destination})
                if (!elementNames.count(endpoint))
                    throw ConfigError(fieldPath + ": undefined element " + endpoint);

            const std::string mode = linkNode.value("mode", "fixed_throughput");
            if (mode == "fixed_throughput")
                link.mode = LinkMode::FixedThroughput;
            else if (mode == "shared_bandwidth")
                link.mode = LinkMode::SharedBandwidth;
            else if (mode == "fixed_duration")
                link.mode = LinkMode::FixedDuration;
            else
                throw ConfigError(fieldPath + ".mode: unknown mode " + mode);

            if (link.mode == LinkMode::FixedDuration)
            {
                link.durationSec = linkNode.at("duration_s").get<TickType>();
                if (link.durationSec == 0)
                    throw ConfigError(fieldPath + ".duration_s: must be positive");
            }
            else
            {
                link.rateBytesPerSec = linkNode.at("rate_bytes_per_s").get<std::uint64_t>();
                if (link.rateBytesPerSec == 0)
                    throw ConfigError(fieldPath + ".rate_bytes_per_s: must be positive");
            }
            if (linkNode.contains("max_active") && !linkNode.at("max_active").is_null())
                link.maxActive = linkNode.at("max_active").get<std::uint32_t>();
            link.egressClass = linkNode.value("egress_class", "");
            config.links.push_back(std::move(link));
            ++linkIdx;
        }
    });

    errors.Guard([&] {
        if (doc.contains("cloud") && !doc.at("cloud").is_null())
        {
            CloudConfig cloud;
            cloud.bucket = doc.at("cloud").at("bucket").get<std::string>();
            if (!elementNames.count(cloud.bucket))
                throw ConfigError("cloud.bucket: undefined element " + cloud.bucket);
            cloud.pricingFile = doc.at("cloud").at("pricing_file").get<std::string>();
            cloud.storageClass = doc.at("cloud").value("storage_class", "standard");
            config.cloud = std::move(cloud);
        }
    });

    errors.Guard([&] {
        const auto& gen = doc.at("generator");
        const std::string kind = gen.at("kind").get<std::string>();
        if (kind == "validation")
        {
            config.generator = GeneratorKind::Validation;
            ValidationGenConfig v;
            for (const auto& e : gen.at("elements"))
            {
                const std::string name = e.get<std::string>();
                if (!elementNames.count(name))
                    throw ConfigError("generator.elements: undefined element " + name);
                v.elements.push_back(name);
            }
            v.initialReplicasPerElement = gen.at("initial_replicas_per_element").get<std::uint32_t>();
            v.fileSize = ParseDistSpec(gen.at("file_size"), "generator.file_size");
            v.transferCount = ParseDistSpec(gen.at("transfer_count"), "generator.transfer_count");
            config.validation = std::move(v);
        }
        else if (kind == "hcdc")
        {
            config.generator = GeneratorKind::Hcdc;
            HcdcGenConfig h;
            h.configuration = gen.value("configuration", "");
            if (h.configuration != "I" && h.configuration != "II" && h.configuration != "III")
                throw ConfigError("generator.configuration: must be I, II or III");
            for (const auto& s : gen.at("sites"))
            {
                HcdcSiteBinding binding;
                binding.site = s.at("site").get<std::string>();
                binding.tape = s.at("tape").get<std::string>();
                binding.disk = s.at("disk").get<std::string>();
                binding.worker = s.at("worker").get<std::string>();
                binding.output = s.at("output").get<std::string>();
                for (const std::string& name : {binding.tape, binding.disk, binding.worker, binding.output})
                    if (!elementNames.count(name))
                        throw ConfigError("generator.sites: undefined element " + name);
                h.sites.push_back(std::move(binding));
            }
            if (h.sites.empty())
                throw ConfigError("generator.sites: at least one site binding required");
            if (gen.contains("bucket") && !gen.at("bucket").is_null())
            {
                h.bucket = gen.at("bucket").get<std::string>();
                if (!elementNames.count(h.bucket))
                    throw ConfigError("generator.bucket: undefined element " + h.bucket);
            }
            h.initialFilesPerSite = gen.at("initial_files_per_site").get<std::uint32_t>();
            h.fileSize = ParseDistSpec(gen.at("file_size"), "generator.file_size");
            h.popularity = ParseDistSpec(gen.at("popularity"), "generator.popularity");
            h.jobCount = ParseDistSpec(gen.at("job_count"), "generator.job_count");
            h.jobDuration = ParseDistSpec(gen.at("job_duration"), "generator.job_duration");
            config.hcdc = std::move(h);
        }
        else
            throw ConfigError("generator.kind: unknown generator " + kind);
    });

    errors.Guard([&] {
        if (config.cloud && !config.cloud->pricingFile.empty())
        {
            const std::string resolved = config.ResolvePath(config.cloud->pricingFile);
            if (!std::filesystem::exists(resolved))
                throw ConfigError("cloud.pricing_file: missing file " + resolved);
        }
    });

    errors.Throw();
    return config;
}

std::string ScenarioConfig::ResolvePath(const std::string& relative) const
{
    std::filesystem::path p(relative);
    if (p.is_absolute() || baseDir.empty())
        return relative;
    return (std::filesystem::path(baseDir) / p).string();
}

nlohmann::ordered_json ScenarioConfig::Emit() const
{
    nlohmann::ordered_json doc;
    doc["name"] = name;
    doc["duration_s"] = durationSec;
    doc["seed"] = seed;
    doc["runs"] = runs;
    doc["intervals"] = {
        {"transfer_manager_s", managerIntervalSec},
        {"transfer_generator_s", generatorIntervalSec},
        {"timeseries_s", timeseriesIntervalSec},
    };
    doc["output"] = {{"records", writeRecords}};

    doc["sites"] = nlohmann::ordered_json::array();
    for (const SiteConfig& site : sites)
    {
        nlohmann::ordered_json siteNode;
        siteNode["name"] = site.name;
        siteNode["elements"] = nlohmann::ordered_json::array();
        for (const ElementConfig& elem : site.elements)
        {
            nlohmann::ordered_json elemNode;
            elemNode["name"] = elem.name;
            elemNode["kind"] = ToString(elem.kind);
            if (elem.limitBytes)
                elemNode["limit_bytes"] = *elem.limitBytes;
            if (elem.accessLatency)
                elemNode["access_latency"] = EmitDistSpec(*elem.accessLatency);
            siteNode["elements"].push_back(std::move(elemNode));
        }
        doc["sites"].push_back(std::move(siteNode));
    }

    doc["links"] = nlohmann::ordered_json::array();
    for (const LinkConfig& link : links)
    {
        nlohmann::ordered_json linkNode;
        linkNode["source"] = link.source;
        linkNode["destination"] = link.destination;
        switch (link.mode)
        {
        case LinkMode::FixedThroughput:
            linkNode["mode"] = "fixed_throughput";
            linkNode["rate_bytes_per_s"] = link.rateBytesPerSec;
            break;
        case LinkMode::SharedBandwidth:
            linkNode["mode"] = "shared_bandwidth";
            linkNode["rate_bytes_per_s"] = link.rateBytesPerSec;
            break;
        case LinkMode::FixedDuration:
            linkNode["mode"] = "fixed_duration";
            linkNode["duration_s"] = link.durationSec;
            break;
        }
        if (link.maxActive)
            linkNode["max_active"] = *link.maxActive;
        if (!link.egressClass.empty())
            linkNode["egress_class"] = link.egressClass;
        doc["links"].push_back(std::move(linkNode));
    }

    if (cloud)
    {
        doc["cloud"] = {
            {"bucket", cloud->bucket},
            {"pricing_file", cloud->pricingFile},
            {"storage_class", cloud->storageClass},
        };
    }

    nlohmann::ordered_json gen;
    if (generator == GeneratorKind::Validation)
    {
        gen["kind"] = "validation";
        gen["elements"] = validation->elements;
        gen["initial_replicas_per_element"] = validation->initialReplicasPerElement;
        gen["file_size"] = EmitDistSpec(validation->fileSize);
        gen["transfer_count"] = EmitDistSpec(validation->transferCount);
    }
    else
    {
        gen["kind"] = "hcdc";
        gen["configuration"] = hcdc->configuration;
        gen["sites"] = nlohmann::ordered_json::array();
        for (const HcdcSiteBinding& binding : hcdc->sites)
        {
            gen["sites"].push_back({
                {"site", binding.site},
                {"tape", binding.tape},
                {"disk", binding.disk},
                {"worker", binding.worker},
                {"output", binding.output},
            });
        }
        if (!hcdc->bucket.empty())
            gen["bucket"] = hcdc->bucket;
        gen["initial_files_per_site"] = hcdc->initialFilesPerSite;
        gen["file_size"] = EmitDistSpec(hcdc->fileSize);
        gen["popularity"] = EmitDistSpec(hcdc->popularity);
        gen["job_count"] = EmitDistSpec(hcdc->jobCount);
        gen["job_duration"] = EmitDistSpec(hcdc->jobDuration);
    }
    doc["generator"] = std::move(gen);
    return doc;
}

World ScenarioConfig::BuildWorld() const
{
    World world;
    for (std::size_t siteIdx = 0; siteIdx < sites.size(); ++siteIdx)
    {
        world.mSites.push_back(Site{sites[siteIdx].name, {}});
        for (const ElementConfig& elem : sites[siteIdx].elements)
            world.AddElement(static_cast<std::uint32_t>(siteIdx), elem.name, elem.kind, elem.limitBytes, elem.accessLatency);
    }

    auto findElement = [&](const std::string& name) -> ElementId {
        for (ElementId id = 0; id < world.ElementCount(); ++id)
            if (world.Element(id).mName == name)
                return id;
        throw ConfigError("undefined element " + name);
    };

    for (const LinkConfig& link : links)
        world.AddLink(findElement(link.source), findElement(link.destination), link.mode,
                      link.rateBytesPerSec, link.durationSec, link.maxActive, link.egressClass);
    return world;
}

const ElementConfig* ScenarioConfig::FindElement(const std::string& name) const
{
    for (const SiteConfig& site : sites)
        for (const ElementConfig& elem : site.elements)
            if (elem.name == name)
                return &elem;
    return nullptr;
}

} // namespace storsim
