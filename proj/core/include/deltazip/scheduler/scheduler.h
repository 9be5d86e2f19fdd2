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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace deltazip::scheduler {

enum class RequestState { kQueued, kLoading, kPrefill, kDecoding, kPreempted, kFinished };

std::string_view to_string(RequestState s);

struct Request {
  std::int64_t id = 0;
  double arrival = 0.0;
  int model_id = 0;
  int prompt_tokens = 1;
  int decode_tokens = 1;
  RequestState state = RequestState::kQueued;
  // Admitted ahead of an earlier queued request because an earlier request
  // of the same delta was already in the batch; that request is the parent.
  bool skipped_line = false;
  std::optional<std::int64_t> parent_id;
  int tokens_emitted = 0;
  // Set once the prompt has been processed; a resumed request skips prefill.
  bool prefilled = false;

  bool operator==(const Request&) const = default;
};

struct SchedulerConfig {
  std::size_t max_requests = 32;  // K: requests served concurrently
  std::size_t max_deltas = 3;     // N: deltas resident concurrently
  // Evict idle deltas as soon as a batch no longer needs them, instead of
  // only when a new delta would exceed max_deltas.
  bool eager_evict = false;
  // When off, nothing is ever marked as skipping the line, so finishing
  // requests never preempt others.
  bool allow_preemption = true;

  // Throws ArgumentError unless both limits are >= 1.
  void validate() const;
};

struct BatchDecision {
  // Every running request after admission, ordered by (arrival, id).
  std::vector<std::int64_t> batch;
  // Requests admitted by this call, in queue order.
  std::vector<std::int64_t> admitted;
  std::vector<int> deltas_to_load;
  std::vector<int> evicted;
};

// Queue, running set and resident deltas of one base-model group.
class SchedulerState {
 public:
  explicit SchedulerState(SchedulerConfig cfg);

  const SchedulerConfig& config() const { return cfg_; }

  // Inserts by (arrival, id). Throws ArgumentError on a duplicate id or a
  // request that violates tokens_emitted <= decode_tokens.
  void enqueue(Request r);

  const std::vector<Request>& queue() const { return queue_; }
  const std::map<std::int64_t, Request>& running() const { return running_; }
  // Throws LookupError if id is not running.
  Request& running_request(std::int64_t id);
  // Resident deltas, least recently used first.
  const std::vector<int>& loaded_deltas() const { return loaded_; }
  bool idle() const { return queue_.empty() && running_.empty(); }

 private:
  friend BatchDecision select_batch(SchedulerState& state);
  friend std::vector<Request> on_request_finished(SchedulerState& state, std::int64_t id);

  void insert_sorted(Request r);
  void touch_delta(int delta);

  SchedulerConfig cfg_;
  std::vector<Request> queue_;
  std::map<std::int64_t, Request> running_;
  std::vector<int> loaded_;
};

// Walks the queue head first on top of the requests already running. A
// queued request is admitted while fewer than K requests are in the batch
// and its delta is either already selected or fewer than N deltas are.
// An admitted request that passed over a non-admitted one is marked as
// skipping the line, with the earliest same-delta batch member as parent.
// Admitted requests move to the running set; deltas the batch needs but that
// are not resident are returned for loading, evicting idle deltas
// (least recently used first) to stay within N.
BatchDecision select_batch(SchedulerState& state);

// Retires a running request. Every running request whose parent it was is
// preempted and goes back into the queue at its arrival position, keeping
// its emitted tokens. Throws LookupError if id is not running.
std::vector<Request> on_request_finished(SchedulerState& state, std::int64_t id);

// N with the lowest latency; ties go to the smaller N. Throws ArgumentError
// on an empty profile.
std::size_t sweep_profile(const std::map<std::size_t, double>& latencies);

}  // namespace deltazip::scheduler
