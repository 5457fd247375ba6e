#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "stackelberg/game.hpp"

namespace stackelberg {

struct StepRecord {
  long t = 0;
  Vec x;
  Vec y;
  double objective = 0.0;   // f at the recorded profile
  double lagrangian = 0.0;  // Lagrangian value at the point the step was taken from
  double eta = 0.0;
  double inner_residual = 0.0;  // nested solvers only
};

// Time-indexed solver output with exact running averages.
//
// Records are kept in full up to max_records; past that, storage is thinned
// by doubling the keep-stride, while the running sums still include every
// step.
class IterateTrace {
 public:
  static constexpr std::size_t kDefaultMaxRecords = 1'000'000;

  explicit IterateTrace(std::size_t max_records = kDefaultMaxRecords);

  void Push(StepRecord record);

  long steps() const { return steps_; }
  bool thinned() const { return stride_ > 1; }
  long stride() const { return stride_; }
  const std::vector<StepRecord>& records() const { return records_; }

  // (1/T) sum_t x_t and (1/T) sum_t y_t over every pushed step.
  StrategyProfile Average() const;

  // Feasible certificate for the average inner iterate, set by solvers that
  // offer one.
  std::optional<Vec> certified_y;
  // Raised by the Lagrangian solver when grad_y L vanished on every step of
  // its opening window.
  bool degenerate = false;

 private:
  std::size_t max_records_;
  long steps_ = 0;
  long last_t_ = 0;
  long stride_ = 1;
  Vec sum_x_;
  Vec sum_y_;
  std::vector<StepRecord> records_;
};

// Exact arithmetic mean of the first `upto` profiles. Requires an unthinned
// trace unless upto covers the whole run.
StrategyProfile AverageIterate(const IterateTrace& trace, long upto);

}  // namespace stackelberg
