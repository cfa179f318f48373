#include "harborsim/dtn.hpp"

#include "harborsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace harborsim::dtn {

const char* to_string(JobState s) {
    switch (s) {
    case JobState::queued: return "queued";
    case JobState::active: return "active";
    case JobState::suspended: return "suspended";
    case JobState::completed: return "completed";
    case JobState::fallback_completed: return "fallback_completed";
    case JobState::failed_deadline: return "failed_deadline";
    }
    return "?";
}

std::int64_t tick_budget_bytes(double rate_bps, double dt_s) {
    if (rate_bps < 0.0) throw std::domain_error("available rate must be >= 0");
    return static_cast<std::int64_t>(std::floor(rate_bps * dt_s / 8.0 + 1e-9));
}

namespace {

bool queue_before(const TransferJob& a, const TransferJob& b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    if (a.created != b.created) return a.created < b.created;
    return a.id < b.id;
}

} // namespace

void TransferQueue::enqueue(TransferJob job) {
    if (job.size <= 0) {
        throw ValidationError("job \"" + job.id + "\": size = " + std::to_string(job.size) +
                              " violates: size > 0");
    }
    if (!(job.deadline > job.created)) {
        throw ValidationError("job \"" + job.id + "\": deadline " + std::to_string(job.deadline) +
                              " violates: deadline > created");
    }
    for (const auto& existing : jobs_) {
        if (existing.id == job.id) {
            throw ValidationError("job \"" + job.id + "\" violates: unique job id");
        }
    }
    job.state = JobState::queued;
    job.bytes_done = 0;
    job.ledger = {};
    job.fallback = false;
    job.completed_at.reset();
    auto pos = std::upper_bound(jobs_.begin(), jobs_.end(), job, queue_before);
    jobs_.insert(pos, std::move(job));
}

TransferJob* TransferQueue::mesh_head() {
    for (auto& job : jobs_) {
        if (!job.terminal() && !job.fallback) return &job;
    }
    return nullptr;
}

const TransferJob* TransferQueue::head() const {
    for (const auto& job : jobs_) {
        if (!job.terminal() && !job.fallback) return &job;
    }
    return nullptr;
}

bool TransferQueue::all_terminal() const {
    return std::all_of(jobs_.begin(), jobs_.end(),
                       [](const TransferJob& j) { return j.terminal(); });
}

std::vector<ServiceSlice> TransferQueue::tick_transfer(bool connected, connman::Interface iface,
                                                       double available_rate, double dt_s,
                                                       double now) {
    std::vector<ServiceSlice> slices;
    if (!connected) {
        for (auto& job : jobs_) {
            if (!job.terminal() && !job.fallback) job.state = JobState::suspended;
        }
        return slices;
    }

    std::int64_t budget = tick_budget_bytes(available_rate, dt_s);
    while (budget > 0) {
        TransferJob* job = mesh_head();
        if (!job) break;
        job->state = JobState::active;
        const std::int64_t moved = std::min(budget, job->remaining());
        if (moved <= 0) break;
        job->bytes_done += moved;
        job->ledger[static_cast<int>(iface)] += moved;
        budget -= moved;
        ServiceSlice slice{job->id, iface, moved, available_rate, false};
        if (job->remaining() == 0) {
            job->state = JobState::completed;
            job->completed_at = now + dt_s;
            slice.completed = true;
        }
        slices.push_back(std::move(slice));
    }

    // Waiters keep their resume point visible: touched jobs sit suspended,
    // untouched ones stay queued.
    bool head_seen = false;
    for (auto& job : jobs_) {
        if (job.terminal() || job.fallback) continue;
        if (!head_seen && job.state == JobState::active) {
            head_seen = true;
            continue;
        }
        job.state = job.bytes_done > 0 ? JobState::suspended : JobState::queued;
    }
    return slices;
}

std::vector<ServiceSlice> TransferQueue::deadline_fallback(double now, double dt_s,
                                                           double cellular_rate,
                                                           bool cellular_enabled) {
    std::vector<ServiceSlice> slices;
    for (auto& job : jobs_) {
        if (job.terminal() || job.fallback) continue;
        if (job.deadline <= now && job.remaining() > 0) {
            if (cellular_enabled) {
                job.fallback = true;
                job.state = JobState::suspended;
            } else {
                job.state = JobState::failed_deadline;
            }
        }
    }
    if (!cellular_enabled) return slices;

    std::int64_t budget = tick_budget_bytes(cellular_rate, dt_s);
    for (auto& job : jobs_) {
        if (budget <= 0) break;
        if (!job.fallback || job.terminal()) continue;
        job.state = JobState::active;
        const std::int64_t moved = std::min(budget, job.remaining());
        if (moved <= 0) continue;
        job.bytes_done += moved;
        job.ledger[static_cast<int>(connman::Interface::cellular)] += moved;
        budget -= moved;
        ServiceSlice slice{job.id, connman::Interface::cellular, moved, cellular_rate, false};
        if (job.remaining() == 0) {
            job.state = JobState::fallback_completed;
            job.completed_at = now + dt_s;
            slice.completed = true;
        }
        slices.push_back(std::move(slice));
    }
    return slices;
}

InterfaceTotals interface_accounting(std::span<const trace::TransferRecord> records) {
    InterfaceTotals totals;
    for (const auto& rec : records) {
        totals.by_interface[rec.iface] += rec.bytes;
        if (rec.gateway) totals.by_gateway[*rec.gateway] += rec.bytes;
    }
    return totals;
}

} // namespace harborsim::dtn
