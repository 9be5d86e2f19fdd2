/* Copyright 2026 The DeltaZip Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "deltazip/scheduler/scheduler.h"

#include <algorithm>
#include <set>
#include <string>

#include "deltazip/errors.h"

namespace deltazip::scheduler {
namespace {

bool arrives_before(const Request& a, const Request& b) {
  return a.arrival < b.arrival || (a.arrival == b.arrival && a.id < b.id);
}

}  // namespace

std::string_view to_string(RequestState s) {
  switch (s) {
    case RequestState::kQueued:
      return "queued";
    case RequestState::kLoading:
      return "loading";
    case RequestState::kPrefill:
      return "prefill";
    case RequestState::kDecoding:
      return "decoding";
    case RequestState::kPreempted:
      return "preempted";
    case RequestState::kFinished:
      return "finished";
  }
  return "unknown";
}

void SchedulerConfig::validate() const {
  if (max_requests < 1) throw ArgumentError("scheduler: K (max_requests) must be >= 1");
  if (max_deltas < 1) throw ArgumentError("scheduler: N (max_deltas) must be >= 1");
}

SchedulerState::SchedulerState(SchedulerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void SchedulerState::enqueue(Request r) {
  if (r.tokens_emitted < 0 || r.tokens_emitted > r.decode_tokens) {
    throw ArgumentError("request " + std::to_string(r.id) + " has tokens_emitted outside [0, " +
                        std::to_string(r.decode_tokens) + "]");
  }
  if (running_.contains(r.id) ||
      std::any_of(queue_.begin(), queue_.end(), [&](const Request& q) { return q.id == r.id; })) {
    throw ArgumentError("request " + std::to_string(r.id) + " is already scheduled");
  }
  if (r.state != RequestState::kPreempted) r.state = RequestState::kQueued;
  r.skipped_line = false;
  r.parent_id.reset();
  insert_sorted(std::move(r));
}

void SchedulerState::insert_sorted(Request r) {
  const auto pos = std::upper_bound(queue_.begin(), queue_.end(), r, arrives_before);
  queue_.insert(pos, std::move(r));
}

Request& SchedulerState::running_request(std::int64_t id) {
  const auto it = running_.find(id);
  if (it == running_.end()) throw LookupError("request " + std::to_string(id) + " is not running");
  return it->second;
}

void SchedulerState::touch_delta(int delta) {
  const auto it = std::find(loaded_.begin(), loaded_.end(), delta);
  if (it != loaded_.end()) loaded_.erase(it);
  loaded_.push_back(delta);
}

BatchDecision select_batch(SchedulerState& state) {
  const SchedulerConfig& cfg = state.cfg_;
  BatchDecision out;

  // Members already running, in arrival order; they keep their slots.
  std::vector<const Request*> members;
  for (const auto& [id, r] : state.running_) members.push_back(&r);
  std::sort(members.begin(), members.end(),
            [](const Request* a, const Request* b) { return arrives_before(*a, *b); });

  std::vector<int> selected;  // in first-use order
  auto is_selected = [&](int d) {
    return std::find(selected.begin(), selected.end(), d) != selected.end();
  };
  for (const Request* r : members) {
    if (!is_selected(r->model_id)) selected.push_back(r->model_id);
  }
  std::size_t batch_size = members.size();

  std::vector<Request> kept;
  std::vector<Request> admitted;
  bool passed_over = false;
  for (Request& r : state.queue_) {
    const bool fits = batch_size < cfg.max_requests;
    const bool delta_ok = is_selected(r.model_id) || selected.size() < cfg.max_deltas;
    if (!(fits && delta_ok)) {
      passed_over = true;
      kept.push_back(std::move(r));
      continue;
    }
    if (!is_selected(r.model_id)) selected.push_back(r.model_id);
    ++batch_size;
    if (passed_over && cfg.allow_preemption) {
      // Earliest earlier-arriving member of the same delta, running or new.
      const Request* parent = nullptr;
      for (const Request* m : members) {
        if (m->model_id == r.model_id && arrives_before(*m, r)) {
          parent = m;
          break;
        }
      }
      for (const Request& a : admitted) {
        if (a.model_id == r.model_id && arrives_before(a, r) &&
            (parent == nullptr || arrives_before(a, *parent))) {
          parent = &a;
          break;
        }
      }
      if (parent != nullptr) {
        r.skipped_line = true;
        r.parent_id = parent->id;
      }
    }
    admitted.push_back(std::move(r));
  }
  state.queue_ = std::move(kept);

  // Residency: keep selected deltas, evict idle ones least recently used
  // first when the new ones would not fit, or all of them when eager.
  std::set<int> resident(state.loaded_.begin(), state.loaded_.end());
  for (int d : selected) {
    if (!resident.contains(d)) out.deltas_to_load.push_back(d);
  }
  std::size_t total = state.loaded_.size() + out.deltas_to_load.size();
  std::vector<int> still_loaded;
  for (int d : state.loaded_) {
    const bool idle = !is_selected(d);
    if (idle && (cfg.eager_evict || total > cfg.max_deltas)) {
      out.evicted.push_back(d);
      --total;
    } else {
      still_loaded.push_back(d);
    }
  }
  state.loaded_ = std::move(still_loaded);
  for (int d : selected) state.touch_delta(d);

  for (Request& r : admitted) {
    out.admitted.push_back(r.id);
    const bool needs_load = std::find(out.deltas_to_load.begin(), out.deltas_to_load.end(),
                                      r.model_id) != out.deltas_to_load.end();
    r.state = needs_load ? RequestState::kLoading
                         : (r.prefilled ? RequestState::kDecoding : RequestState::kPrefill);
    const std::int64_t id = r.id;
    state.running_.emplace(id, std::move(r));
  }

  std::vector<const Request*> all;
  for (const auto& [id, r] : state.running_) all.push_back(&r);
  std::sort(all.begin(), all.end(),
            [](const Request* a, const Request* b) { return arrives_before(*a, *b); });
  for (const Request* r : all) out.batch.push_back(r->id);
  return out;
}

std::vector<Request> on_request_finished(SchedulerState& state, std::int64_t id) {
  const auto it = state.running_.find(id);
  if (it == state.running_.end()) {
    throw LookupError("finished request " + std::to_string(id) + " is not running");
  }
  state.running_.erase(it);

  std::vector<Request> preempted;
  for (auto jt = state.running_.begin(); jt != state.running_.end();) {
    if (jt->second.parent_id == id) {
      Request r = std::move(jt->second);
      jt = state.running_.erase(jt);
      r.state = RequestState::kPreempted;
      r.skipped_line = false;
      r.parent_id.reset();
      preempted.push_back(r);
      state.insert_sorted(std::move(r));
    } else {
      ++jt;
    }
  }
  std::sort(preempted.begin(), preempted.end(), arrives_before);
  return preempted;
}

std::size_t sweep_profile(const std::map<std::size_t, double>& latencies) {
  if (latencies.empty()) throw ArgumentError("sweep_profile: empty latency profile");
  auto best = latencies.begin();
  for (auto it = latencies.begin(); it != latencies.end(); ++it) {
    if (it->second < best->second) best = it;
  }
  return best->first;
}

}  // namespace deltazip::scheduler
