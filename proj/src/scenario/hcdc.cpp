#include "storsim/scenario/hcdc.hpp"

#include <cassert>
#include <cmath>

namespace storsim
{

HcdcScenario::HcdcScenario(World& world, TransferManager& manager, Rng& rng,
                           const ScenarioConfig& config, RecordStreams& streams)
    : mWorld(world), mManager(manager), mRng(rng), mConfig(config), mStreams(streams),
      mFileSize(config.hcdc->fileSize), mPopularity(config.hcdc->popularity),
      mJobCount(config.hcdc->jobCount), mJobDuration(config.hcdc->jobDuration),
      mAccount(config.cloud ? config.cloud->storageClass : "standard")
{
    mManager.SetListener(this);
    mManager.SetCloudListener(this);
}

void HcdcScenario::Initialize()
{
    const HcdcGenConfig& gen = *mConfig.hcdc;

    auto findElement = [&](const std::string& name) -> ElementId {
        for (ElementId id = 0; id < mWorld.ElementCount(); ++id)
            if (mWorld.Element(id).mName == name)
                return id;
        throw ConfigError("undefined element " + name);
    };

    if (!gen.bucket.empty())
        mBucketElem = findElement(gen.bucket);

    const std::size_t totalFiles = static_cast<std::size_t>(gen.initialFilesPerSite) * gen.sites.size();
    mFileState.assign(totalFiles, FileState::None);
    mFileRefCount.assign(totalFiles, 0);
    mFileBudget.assign(totalFiles, 0);
    mFileClass.assign(totalFiles, 0);
    mFilePosInClass.assign(totalFiles, 0);
    mFileUses.assign(totalFiles, 0);

    for (const HcdcSiteBinding& binding : gen.sites)
    {
        SiteRuntime site;
        site.name = binding.site;
        site.tape = findElement(binding.tape);
        site.disk = findElement(binding.disk);
        site.worker = findElement(binding.worker);
        site.output = findElement(binding.output);
        site.tapeToDisk = mWorld.FindLink(site.tape, site.disk);
        site.diskToWorker = mWorld.FindLink(site.disk, site.worker);
        if (mBucketElem)
        {
            if (mWorld.HasLink(*mBucketElem, site.disk))
                site.bucketToDisk = mWorld.FindLink(*mBucketElem, site.disk);
            if (mWorld.HasLink(site.disk, *mBucketElem))
                site.diskToBucket = mWorld.FindLink(site.disk, *mBucketElem);
        }

        site.fileBase = static_cast<FileId>(mWorld.FileCount());
        site.fileCount = gen.initialFilesPerSite;
        StorageElement& tape = mWorld.Element(site.tape);

        // classes keyed by popularity value; files grouped at creation
        std::map<std::uint32_t, std::vector<FileId>> byPopularity;
        for (std::uint32_t i = 0; i < gen.initialFilesPerSite; ++i)
        {
            const SpaceType size = static_cast<SpaceType>(std::llround(mFileSize.Sample(mRng)));
            const std::uint32_t popularity = static_cast<std::uint32_t>(std::llround(mPopularity.Sample(mRng)));
            const FileId file = mWorld.CreateFile(size, popularity);
            tape.CreateReplica(file, size, size);
            byPopularity[popularity].push_back(file);
            mFileBudget[file] = static_cast<std::uint8_t>(std::min<std::uint32_t>(popularity, 255));
        }
        for (auto& [popularity, files] : byPopularity)
        {
            const std::uint8_t classIdx = static_cast<std::uint8_t>(site.classes.size());
            for (std::size_t pos = 0; pos < files.size(); ++pos)
            {
                mFileClass[files[pos]] = classIdx;
                mFilePosInClass[files[pos]] = static_cast<std::uint32_t>(pos);
            }
            site.classWeightTotal += popularity;
            site.classes.push_back(PopularityClass{popularity, std::move(files)});
        }

        site.waitingHist1h.assign(mConfig.durationSec / SECONDS_PER_HOUR + 2, 0);
        mSites.push_back(std::move(site));
    }
}

std::uint32_t HcdcScenario::AllocJob()
{
    if (!mFreeJobs.empty())
    {
        const std::uint32_t slot = mFreeJobs.back();
        mFreeJobs.pop_back();
        mJobPool[slot] = Job{};
        return slot;
    }
    mJobPool.emplace_back();
    return static_cast<std::uint32_t>(mJobPool.size() - 1);
}

void HcdcScenario::FreeJob(std::uint32_t slot)
{
    mJobPool[slot].state = JobState::Finished;
    mFreeJobs.push_back(slot);
}

HcdcScenario::SiteRuntime& HcdcScenario::SiteOfFile(FileId file)
{
    for (SiteRuntime& site : mSites)
        if (file >= site.fileBase && file < site.fileBase + site.fileCount)
            return site;
    throw ModelError("file " + std::to_string(file) + " belongs to no site");
}

FileId HcdcScenario::SelectInputFile(SiteRuntime& site)
{
    assert(site.classWeightTotal > 0);

    for (int attempt = 0; attempt < 128; ++attempt)
    {
        std::uint64_t pick = mRng.Below(site.classWeightTotal);
        std::size_t classIdx = 0;
        for (; classIdx < site.classes.size(); ++classIdx)
        {
            const PopularityClass& cls = site.classes[classIdx];
            if (cls.files.empty())
                continue;
            if (pick < cls.weight)
                break;
            pick -= cls.weight;
        }
        assert(classIdx < site.classes.size());

        PopularityClass& cls = site.classes[classIdx];
        const FileId file = cls.files[mRng.Below(cls.files.size())];
        if (mFileState[file] == FileState::Migrating)
        {
            // replica is on its way out of the disk; pick something else
            ++mSelectionRedraws;
            continue;
        }
        return file;
    }

    // extremely unlikely: fall back to the first selectable file
    for (PopularityClass& cls : site.classes)
        for (FileId file : cls.files)
            if (mFileState[file] != FileState::Migrating)
                return file;
    throw ModelError("no selectable input file at site " + site.name);
}

void HcdcScenario::SubmitJobs(SiteRuntime& site, TickType now)
{
    const std::uint64_t toSubmit = site.jobCountAcc.Draw(mJobCount, mRng);
    for (std::uint64_t i = 0; i < toSubmit; ++i)
    {
        const FileId file = SelectInputFile(site);

        // consume one use of the file's popularity budget
        mFileUses[file] += 1;
        assert(mFileBudget[file] > 0);
        if (--mFileBudget[file] == 0)
        {
            PopularityClass& cls = site.classes[mFileClass[file]];
            const std::uint32_t pos = mFilePosInClass[file];
            cls.files[pos] = cls.files.back();
            mFilePosInClass[cls.files[pos]] = pos;
            cls.files.pop_back();
            if (cls.files.empty())
                site.classWeightTotal -= cls.weight;
        }

        const std::uint32_t slot = AllocJob();
        Job& job = mJobPool[slot];
        job.id = mNextJobId++;
        job.file = file;
        job.siteIdx = static_cast<std::uint32_t>(&site - mSites.data());
        job.submittedAt = now;
        job.durationS = static_cast<std::uint32_t>(std::llround(mJobDuration.Sample(mRng)));
        mFileRefCount[file] += 1;
        site.jobsSubmitted += 1;
        mJobsSubmittedTotal += 1;

        switch (mFileState[file])
        {
        case FileState::OnDisk:
            job.state = JobState::Queued;
            job.queuedAt = now;
            site.queuedJobs.push_back(slot);
            site.enteredQueued += 1;
            break;
        case FileState::Staging:
            job.state = JobState::Transferring;
            site.transferringByFile[file].push_back(slot);
            break;
        case FileState::None:
            job.state = JobState::Waiting;
            site.waitingJobs.emplace_back(slot, job.id);
            site.waitingByFile[file].push_back(slot);
            break;
        default:
            throw ModelError("job submitted for file in unexpected state");
        }
    }
}

void HcdcScenario::EvictProcessed(SiteRuntime& site, TickType now)
{
    if (site.evictionQueue.empty())
        return;

    StorageElement& disk = mWorld.Element(site.disk);
    for (FileId file : site.evictionQueue)
    {
        if (mFileState[file] != FileState::EvictQueued || mFileRefCount[file] != 0)
            continue; // rescued in the meantime
        const SpaceType size = mWorld.GetFile(file).size;

        bool migrate = false;
        if (mBucketElem && site.diskToBucket)
        {
            StorageElement& bucket = mWorld.Element(*mBucketElem);
            const Replica* bucketReplica = bucket.FindReplica(file);
            if (bucketReplica)
            {
                assert(bucketReplica->current == size);
                migrate = false; // already safe on the bucket
            }
            else if (bucket.CanStore(size))
            {
                migrate = true;
            }
        }

        if (migrate)
        {
            mManager.Enqueue(file, site.disk, *mBucketElem, now, TRANSFER_MIGRATION, file);
            mFileState[file] = FileState::Migrating;
        }
        else
        {
            disk.DeleteReplica(file, size);
            mFileState[file] = FileState::None;
        }
    }
    site.evictionQueue.clear();
}

void HcdcScenario::FinishJob(SiteRuntime& site, std::uint32_t slot, TickType now)
{
    Job& job = mJobPool[slot];

    // output volume is not modelled: one zero-byte upload record per job,
    // completing within the same tick
    if (mStreams.Enabled())
    {
        mStreams.WriteUpload(job.id, site.name, 0, now);
        mStreams.WriteJob(job.id, site.name, job.submittedAt, job.queuedAt, job.startedAt, now);
    }

    const TickType waited = job.queuedAt - job.submittedAt;
    site.waitingSumS += waited;
    site.waitingMaxS = std::max(site.waitingMaxS, waited);
    site.waitingHist1h[waited / SECONDS_PER_HOUR] += 1;

    site.jobsFinished += 1;
    mJobsFinishedTotal += 1;

    const FileId file = job.file;
    assert(mFileRefCount[file] > 0);
    mFileRefCount[file] -= 1;
    if (mFileRefCount[file] == 0 && mFileState[file] == FileState::OnDisk &&
        mWorld.Element(site.disk).mLimit)
    {
        mFileState[file] = FileState::EvictQueued;
        site.evictionQueue.push_back(file);
    }

    FreeJob(slot);
}

void HcdcScenario::AdvanceRunning(SiteRuntime& site, TickType now)
{
    auto it = site.runningUntil.begin();
    while (it != site.runningUntil.end() && it->first <= now)
    {
        for (std::uint32_t slot : it->second)
            FinishJob(site, slot, now);
        it = site.runningUntil.erase(it);
    }
}

void HcdcScenario::AdvanceDownloads(SiteRuntime& site, TickType now, TickType dt)
{
    if (site.downloads.empty() || dt == 0)
        return;

    NetworkLink& link = mWorld.Link(site.diskToWorker);
    const SpaceType step = link.mRateBytesPerSec * dt;

    for (std::size_t i = 0; i < site.downloads.size();)
    {
        const std::uint32_t slot = site.downloads[i];
        Job& job = mJobPool[slot];
        const SpaceType size = mWorld.GetFile(job.file).size;

        const SpaceType remaining = size - job.downloadedBytes;
        const SpaceType moved = std::min(step, remaining);
        job.downloadedBytes += moved;
        link.mTrafficBytes += moved;

        if (job.downloadedBytes == size)
        {
            link.mDoneTransfers += 1;
            site.downloadsDone += 1;
            site.downloadVolume += size;
            if (mStreams.Enabled())
                mStreams.WriteDownload(job.id, site.name, job.file, size, job.startedAt, now);

            job.state = JobState::Running;
            site.enteredRunning += 1;
            site.runningUntil[now + job.durationS].push_back(slot);

            site.downloads[i] = site.downloads.back();
            site.downloads.pop_back();
            continue;
        }
        ++i;
    }
}

void HcdcScenario::AdvanceQueued(SiteRuntime& site, TickType now)
{
    // job slots are not limited: queued jobs activate immediately
    for (std::uint32_t slot : site.queuedJobs)
    {
        Job& job = mJobPool[slot];
        assert(job.state == JobState::Queued);
        job.state = JobState::Active;
        job.startedAt = now;
        site.enteredActive += 1;
        site.downloads.push_back(slot);
    }
    site.queuedJobs.clear();
}

void HcdcScenario::DrainWaiting(SiteRuntime& site, TickType now)
{
    StorageElement& disk = mWorld.Element(site.disk);
    StorageElement* bucket = mBucketElem ? &mWorld.Element(*mBucketElem) : nullptr;

    while (!site.waitingJobs.empty())
    {
        const auto [slot, id] = site.waitingJobs.front();
        if (mJobPool[slot].id != id || mJobPool[slot].state != JobState::Waiting)
        {
            site.waitingJobs.pop_front(); // served earlier via its file group
            continue;
        }

        const FileId file = mJobPool[slot].file;
        const SpaceType size = mWorld.GetFile(file).size;
        if (!disk.CanStore(size))
            break; // waiting jobs are served strictly first in, first out

        assert(mFileState[file] == FileState::None);

        // prefer the bucket whenever it holds a complete replica
        ElementId source = site.tape;
        if (bucket)
        {
            const Replica* bucketReplica = bucket->FindReplica(file);
            if (bucketReplica && bucketReplica->current == size)
                source = *mBucketElem;
        }

        mManager.Enqueue(file, source, site.disk, now, TRANSFER_STAGING, file);
        mFileState[file] = FileState::Staging;

        auto group = site.waitingByFile.find(file);
        assert(group != site.waitingByFile.end());
        std::vector<std::uint32_t>& transferring = site.transferringByFile[file];
        for (std::uint32_t member : group->second)
        {
            assert(mJobPool[member].state == JobState::Waiting);
            mJobPool[member].state = JobState::Transferring;
            transferring.push_back(member);
        }
        site.waitingByFile.erase(group);
        site.waitingJobs.pop_front();
    }
}

void HcdcScenario::Tick(TickType now)
{
    const TickType dt = now - mLastTick;
    for (SiteRuntime& site : mSites)
    {
        EvictProcessed(site, now);
        SubmitJobs(site, now);

        AdvanceRunning(site, now);
        AdvanceDownloads(site, now, dt);
        AdvanceQueued(site, now);
        DrainWaiting(site, now);
    }
    mLastTick = now;
}

void HcdcScenario::OnTransferComplete(const Transfer& transfer, TickType now)
{
    const NetworkLink& link = mWorld.Link(transfer.link);
    if (mStreams.Enabled())
        mStreams.WriteTransfer(transfer, mWorld.Element(link.mSrc).mName + ">" + mWorld.Element(link.mDst).mName);

    const FileId file = transfer.context;
    SiteRuntime& site = SiteOfFile(file);

    if (transfer.kind == TRANSFER_STAGING)
    {
        assert(mFileState[file] == FileState::Staging);
        mFileState[file] = FileState::OnDisk;

        auto group = site.transferringByFile.find(file);
        if (group != site.transferringByFile.end())
        {
            for (std::uint32_t slot : group->second)
            {
                Job& job = mJobPool[slot];
                assert(job.state == JobState::Transferring);
                job.state = JobState::Queued;
                job.queuedAt = now;
                site.queuedJobs.push_back(slot);
                site.enteredQueued += 1;
            }
            site.transferringByFile.erase(group);
        }
    }
    else if (transfer.kind == TRANSFER_MIGRATION)
    {
        assert(mFileState[file] == FileState::Migrating);
        assert(mFileRefCount[file] == 0);
        StorageElement& disk = mWorld.Element(site.disk);
        disk.DeleteReplica(file, transfer.size);
        mFileState[file] = FileState::None;
    }
    else
        throw ModelError("transfer completed with unknown kind");
}

void HcdcScenario::OnBucketBytesIn(ElementId bucket, SpaceType bytes, TickType now)
{
    assert(mBucketElem && bucket == *mBucketElem);
    mAccount.OnStore(bytes, now);
    mAccount.OnIngress(bytes, now);
}

void HcdcScenario::OnBucketBytesOut(ElementId bucket, const std::string& egressClass, SpaceType bytes, TickType now)
{
    assert(mBucketElem && bucket == *mBucketElem);
    mAccount.OnEgress(bytes, egressClass, now);
}

void HcdcScenario::OnBucketOperation(ElementId bucket, bool isWrite, TickType now)
{
    assert(mBucketElem && bucket == *mBucketElem);
    mAccount.OnOperation(isWrite ? "class-a" : "class-b", now);
}

void HcdcScenario::Finalize(TickType now)
{
    mAccount.Advance(now);
}

std::vector<std::string> HcdcScenario::TimeseriesColumns() const
{
    std::vector<std::string> columns;
    for (const SiteRuntime& site : mSites)
    {
        columns.push_back(site.name + ".disk_used_bytes");
        columns.push_back(site.name + ".tape_to_disk_done");
        columns.push_back(site.name + ".bucket_to_disk_done");
        columns.push_back(site.name + ".waiting_jobs");
    }
    columns.push_back("bucket.volume_bytes");
    return columns;
}

std::vector<double> HcdcScenario::TimeseriesValues() const
{
    std::vector<double> values;
    for (const SiteRuntime& site : mSites)
    {
        values.push_back(static_cast<double>(mWorld.Element(site.disk).UsedBytes()));
        values.push_back(static_cast<double>(mWorld.Link(site.tapeToDisk).mDoneTransfers));
        values.push_back(site.bucketToDisk ? static_cast<double>(mWorld.Link(*site.bucketToDisk).mDoneTransfers) : 0.0);
        values.push_back(static_cast<double>(site.waitingJobs.size()));
    }
    values.push_back(static_cast<double>(mAccount.CurrentVolume()));
    return values;
}

nlohmann::ordered_json HcdcScenario::Summary(TickType duration) const
{
    nlohmann::ordered_json out;
    out["configuration"] = mConfig.hcdc->configuration;

    nlohmann::ordered_json jobs;
    jobs["submitted_total"] = mJobsSubmittedTotal;
    jobs["finished_total"] = mJobsFinishedTotal;
    nlohmann::ordered_json perSiteFinished, perSiteSubmitted;
    for (const SiteRuntime& site : mSites)
    {
        perSiteFinished[site.name] = site.jobsFinished;
        perSiteSubmitted[site.name] = site.jobsSubmitted;
    }
    jobs["finished"] = std::move(perSiteFinished);
    jobs["submitted"] = std::move(perSiteSubmitted);
    out["jobs"] = std::move(jobs);

    nlohmann::ordered_json downloads;
    SpaceType downloadTotal = 0;
    nlohmann::ordered_json perSiteVolume, perSiteCount;
    for (const SiteRuntime& site : mSites)
    {
        perSiteVolume[site.name] = site.downloadVolume;
        perSiteCount[site.name] = site.downloadsDone;
        downloadTotal += site.downloadVolume;
    }
    downloads["volume_bytes_total"] = downloadTotal;
    downloads["volume_bytes"] = std::move(perSiteVolume);
    downloads["count"] = std::move(perSiteCount);
    out["downloads"] = std::move(downloads);

    nlohmann::ordered_json transfers;
    SpaceType bucketToDiskBytes = 0, diskToBucketBytes = 0;
    std::uint64_t bucketToDiskCount = 0;
    nlohmann::ordered_json tapeBytes, tapeCount;
    for (const SiteRuntime& site : mSites)
    {
        const NetworkLink& tape = mWorld.Link(site.tapeToDisk);
        tapeBytes[site.name] = tape.mTrafficBytes;
        tapeCount[site.name] = tape.mDoneTransfers;
        if (site.bucketToDisk)
        {
            bucketToDiskBytes += mWorld.Link(*site.bucketToDisk).mTrafficBytes;
            bucketToDiskCount += mWorld.Link(*site.bucketToDisk).mDoneTransfers;
        }
        if (site.diskToBucket)
            diskToBucketBytes += mWorld.Link(*site.diskToBucket).mTrafficBytes;
    }
    transfers["tape_to_disk_bytes"] = std::move(tapeBytes);
    transfers["tape_to_disk_count"] = std::move(tapeCount);
    transfers["bucket_to_disk_bytes_total"] = bucketToDiskBytes;
    transfers["bucket_to_disk_count_total"] = bucketToDiskCount;
    transfers["disk_to_bucket_bytes_total"] = diskToBucketBytes;
    out["transfers"] = std::move(transfers);

    if (mBucketElem)
    {
        const StorageElement& bucket = mWorld.Element(*mBucketElem);
        SpaceType neverEgressed = 0;
        bucket.ForEachReplica([&](FileId file, const Replica& replica) {
            if (replica.current == mWorld.GetFile(file).size && replica.egressCount == 0)
                neverEgressed += replica.current;
        });
        nlohmann::ordered_json bucketOut;
        bucketOut["end_volume_bytes"] = mAccount.CurrentVolume();
        bucketOut["never_egressed_bytes"] = neverEgressed;
        bucketOut["ingress_bytes_total"] = mAccount.TotalIngress();
        bucketOut["egress_bytes_total"] = mAccount.TotalEgress();
        bucketOut["replica_count"] = bucket.ReplicaCount();
        out["bucket"] = std::move(bucketOut);
    }

    nlohmann::ordered_json waiting;
    for (const SiteRuntime& site : mSites)
    {
        nlohmann::ordered_json w;
        w["mean_h"] = site.jobsFinished
                          ? static_cast<double>(site.waitingSumS) / static_cast<double>(site.jobsFinished) / 3600.0
                          : 0.0;
        w["max_h"] = static_cast<double>(site.waitingMaxS) / 3600.0;
        w["hist_1h"] = site.waitingHist1h;
        waiting[site.name] = std::move(w);
    }
    out["waiting_time"] = std::move(waiting);

    nlohmann::ordered_json safety;
    std::uint64_t enteredQueued = 0, enteredActive = 0, enteredRunning = 0;
    for (const SiteRuntime& site : mSites)
    {
        enteredQueued += site.enteredQueued;
        enteredActive += site.enteredActive;
        enteredRunning += site.enteredRunning;
    }
    safety["entered_queued"] = enteredQueued;
    safety["entered_active"] = enteredActive;
    safety["entered_running"] = enteredRunning;
    safety["selection_redraws"] = mSelectionRedraws;
    out["state_machine"] = std::move(safety);

    nlohmann::ordered_json conservation;
    conservation["moved_total_bytes"] = mManager.MovedBytesTotal();
    conservation["delivered_total_bytes"] = mManager.DoneBytesTotal() + mManager.InFlightBytes();
    out["flow_conservation"] = std::move(conservation);

    (void)duration;
    return out;
}

} // namespace storsim
