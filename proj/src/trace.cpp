#include "stackelberg/trace.hpp"

#include <sstream>

namespace stackelberg {

IterateTrace::IterateTrace(std::size_t max_records)
    : max_records_(max_records < 2 ? 2 : max_records) {}

void IterateTrace::Push(StepRecord record) {
  if (record.t <= last_t_) {
    throw Error(ErrorKind::kInvalidArgument, "trace steps must be strictly increasing");
  }
  last_t_ = record.t;
  if (steps_ == 0) {
    sum_x_ = Vec::Zero(record.x.size());
    sum_y_ = Vec::Zero(record.y.size());
  } else if (record.x.size() != sum_x_.size() || record.y.size() != sum_y_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "trace record dimensions changed");
  }
  sum_x_ += record.x;
  sum_y_ += record.y;
  ++steps_;
  if ((steps_ - 1) % stride_ != 0) return;
  records_.push_back(std::move(record));
  if (records_.size() > max_records_) {
    std::vector<StepRecord> kept;
    kept.reserve(records_.size() / 2 + 1);
    for (std::size_t i = 0; i < records_.size(); i += 2) kept.push_back(std::move(records_[i]));
    records_ = std::move(kept);
    stride_ *= 2;
  }
}

StrategyProfile IterateTrace::Average() const {
  if (steps_ == 0) throw Error(ErrorKind::kInvalidArgument, "empty trace has no average");
  const double n = static_cast<double>(steps_);
  return {sum_x_ / n, sum_y_ / n};
}

StrategyProfile AverageIterate(const IterateTrace& trace, long upto) {
  if (upto < 1 || upto > trace.steps()) {
    std::ostringstream os;
    os << "average index " << upto << " outside [1, " << trace.steps() << "]";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  if (upto == trace.steps()) return trace.Average();
  if (trace.thinned()) {
    throw Error(ErrorKind::kUnsupported,
                "prefix averages are unavailable once the trace is thinned");
  }
  const auto& records = trace.records();
  Vec sx = Vec::Zero(records.front().x.size());
  Vec sy = Vec::Zero(records.front().y.size());
  for (long i = 0; i < upto; ++i) {
    sx += records[i].x;
    sy += records[i].y;
  }
  const double n = static_cast<double>(upto);
  return {sx / n, sy / n};
}

}  // namespace stackelberg
