#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace noisebench {

/// Tallies of scalar arithmetic performed on the estimator path.
struct OpCounts {
  std::uint64_t add = 0;
  std::uint64_t mul = 0;
  std::uint64_t cmp = 0;
  std::uint64_t transcendental = 0;

  std::uint64_t total() const noexcept { return add + mul + cmp + transcendental; }

  OpCounts& operator+=(const OpCounts& other) noexcept {
    add += other.add;
    mul += other.mul;
    cmp += other.cmp;
    transcendental += other.transcendental;
    return *this;
  }
};

/// Per-run accumulator. Counts land in the running total and in the
/// currently open stage (see OpStage). Not thread-safe: one per run.
class OpCounter {
 public:
  void add(std::uint64_t n = 1) { bump(&OpCounts::add, n); }
  void mul(std::uint64_t n = 1) { bump(&OpCounts::mul, n); }
  void cmp(std::uint64_t n = 1) { bump(&OpCounts::cmp, n); }
  void transcendental(std::uint64_t n = 1) { bump(&OpCounts::transcendental, n); }

  const OpCounts& total() const noexcept { return total_; }
  const std::map<std::string, OpCounts>& stages() const noexcept { return stages_; }

  const std::string& current_stage() const noexcept { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  void bump(std::uint64_t OpCounts::*field, std::uint64_t n) {
    total_.*field += n;
    if (!stage_.empty()) stages_[stage_].*field += n;
  }

  OpCounts total_;
  std::map<std::string, OpCounts> stages_;
  std::string stage_;
};

/// Scoped stage label; restores the enclosing label on exit. Null-safe.
class OpStage {
 public:
  OpStage(OpCounter* counter, std::string name) : counter_(counter) {
    if (counter_) {
      previous_ = counter_->current_stage();
      counter_->set_stage(std::move(name));
    }
  }
  ~OpStage() {
    if (counter_) counter_->set_stage(std::move(previous_));
  }
  OpStage(const OpStage&) = delete;
  OpStage& operator=(const OpStage&) = delete;

 private:
  OpCounter* counter_;
  std::string previous_;
};

// Null-safe tally helpers used throughout the estimator path.
inline void count_add(OpCounter* c, std::uint64_t n = 1) { if (c) c->add(n); }
inline void count_mul(OpCounter* c, std::uint64_t n = 1) { if (c) c->mul(n); }
inline void count_cmp(OpCounter* c, std::uint64_t n = 1) { if (c) c->cmp(n); }
inline void count_transcendental(OpCounter* c, std::uint64_t n = 1) {
  if (c) c->transcendental(n);
}

}  // namespace noisebench
