#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <unordered_map>
#include <vector>

#include "storsim/common/types.hpp"

namespace storsim
{

class Simulation;

// executed when the event fires; may schedule further events
using EventAction = std::function<void(Simulation&, TickType)>;

using EventId = std::uint64_t;

struct RunSummary
{
    std::uint64_t executedEvents = 0;
    TickType finalClock = 0;
};

/// Discrete event engine with a one second clock resolution. Events fire in
/// (tick, insertion order); the clock jumps directly between occupied ticks.
class Simulation
{
public:
    Simulation() = default;
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    // one-shot event; fireAt must not be in the past
    EventId Schedule(TickType fireAt, EventAction action);

    // recurring event; reschedules itself at fireAt + k*interval, drift-free
    EventId ScheduleRecurring(TickType firstAt, TickType interval, EventAction action);

    // cancels a pending event; no effect if it already ran
    void Cancel(EventId id);

    TickType Now() const { return mClock; }

    // executes every event with fireAt <= until, then advances the clock to until
    RunSummary Run(TickType until);

private:
    struct EventRecord
    {
        EventAction action;
        TickType interval = 0; // 0 = one-shot
        EventId id = 0;
        bool cancelled = false;
    };

    struct QueueEntry
    {
        TickType fireAt;
        std::uint64_t seq;
        std::shared_ptr<EventRecord> record;
    };

    struct EntryOrder
    {
        bool operator()(const QueueEntry& a, const QueueEntry& b) const
        {
            if (a.fireAt != b.fireAt)
                return a.fireAt > b.fireAt;
            return a.seq > b.seq;
        }
    };

    void Push(TickType fireAt, std::shared_ptr<EventRecord> record);

    std::priority_queue<QueueEntry, std::vector<QueueEntry>, EntryOrder> mQueue;
    std::unordered_map<EventId, std::shared_ptr<EventRecord>> mPending;
    TickType mClock = 0;
    std::uint64_t mNextSeq = 0;
    EventId mNextId = 1;
};

} // namespace storsim
