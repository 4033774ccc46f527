#include "storsim/sim/engine.hpp"

#include <cassert>
#include <string>

namespace storsim
{

void Simulation::Push(TickType fireAt, std::shared_ptr<EventRecord> record)
{
    mQueue.push(QueueEntry{fireAt, mNextSeq++, std::move(record)});
}

EventId Simulation::Schedule(TickType fireAt, EventAction action)
{
    if (fireAt < mClock)
        throw SimError("schedule: fire time " + std::to_string(fireAt) + " is before current tick " + std::to_string(mClock));

    auto record = std::make_shared<EventRecord>();
    record->action = std::move(action);
    record->id = mNextId++;
    mPending[record->id] = record;
    Push(fireAt, record);
    return record->id;
}

EventId Simulation::ScheduleRecurring(TickType firstAt, TickType interval, EventAction action)
{
    if (interval == 0)
        throw SimError("schedule: recurring event needs a non-zero interval");
    if (firstAt < mClock)
        throw SimError("schedule: fire time " + std::to_string(firstAt) + " is before current tick " + std::to_string(mClock));

    auto record = std::make_shared<EventRecord>();
    record->action = std::move(action);
    record->interval = interval;
    record->id = mNextId++;
    mPending[record->id] = record;
    Push(firstAt, record);
    return record->id;
}

void Simulation::Cancel(EventId id)
{
    auto it = mPending.find(id);
    if (it == mPending.end())
        return;
    it->second->cancelled = true;
    mPending.erase(it);
}

RunSummary Simulation::Run(TickType until)
{
    RunSummary summary;
    while (!mQueue.empty() && mQueue.top().fireAt <= until)
    {
        QueueEntry entry = mQueue.top();
        mQueue.pop();

        EventRecord& record = *entry.record;
        if (record.cancelled)
            continue;

        assert(entry.fireAt >= mClock);
        mClock = entry.fireAt;

        try
        {
            record.action(*this, mClock);
        }
        catch (const std::exception& ex)
        {
            throw SimError("event " + std::to_string(record.id) + " at tick " + std::to_string(mClock) + " failed: " + ex.what());
        }
        ++summary.executedEvents;

        if (record.interval > 0 && !record.cancelled)
            Push(entry.fireAt + record.interval, entry.record);
        else
            mPending.erase(record.id);
    }

    mClock = until;
    summary.finalClock = mClock;
    return summary;
}

} // namespace storsim
