#include "stackelberg/regret.hpp"

#include <cmath>
#include <limits>

namespace stackelberg {

namespace {

const std::vector<StepRecord>& FullRecords(const IterateTrace& trace) {
  if (trace.steps() == 0) throw Error(ErrorKind::kInvalidArgument, "empty trace has no regret");
  if (trace.thinned()) {
    throw Error(ErrorKind::kUnsupported, "regret needs an unthinned trace");
  }
  return trace.records();
}

bool IsOuter(RegretKind kind) {
  return kind == RegretKind::kVanillaX || kind == RegretKind::kAsymmetric ||
         kind == RegretKind::kLagrangianX || kind == RegretKind::kOnline;
}

// Searches a box of dimension 1 or 2 on a uniform grid; sign = +1 minimizes,
// -1 maximizes.
Comparator GridSearch(const FeasibleSet& box, double resolution, double sign) {
  if (box.kind() != FeasibleSet::Kind::kBox) {
    throw Error(ErrorKind::kUnsupported, "grid comparators need a box");
  }
  if (box.dim() < 1 || box.dim() > 2) {
    throw Error(ErrorKind::kUnsupported, "grid comparators handle dimension 1 or 2 only");
  }
  if (!(resolution > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "grid resolution must be positive");
  }
  return [box, resolution, sign](const LossFn& loss) {
    const int dim = box.dim();
    std::vector<long> counts(dim);
    for (int d = 0; d < dim; ++d) {
      const double width = box.upper()[d] - box.lower()[d];
      counts[d] = static_cast<long>(std::ceil(width / resolution - 1e-9)) + 1;
    }
    auto coord = [&](int d, long i) {
      if (counts[d] == 1) return box.lower()[d];
      const double frac = static_cast<double>(i) / static_cast<double>(counts[d] - 1);
      return box.lower()[d] + frac * (box.upper()[d] - box.lower()[d]);
    };
    Vec best;
    double best_value = std::numeric_limits<double>::infinity();
    Vec point(dim);
    const long outer = dim == 2 ? counts[1] : 1;
    for (long j = 0; j < outer; ++j) {
      if (dim == 2) point[1] = coord(1, j);
      for (long i = 0; i < counts[0]; ++i) {
        point[0] = coord(0, i);
        const double v = sign * loss(point);
        if (v < best_value) {
          best_value = v;
          best = point;
        }
      }
    }
    return best;
  };
}

// Fills realized/comparator from per-round losses. `average` evaluates the
// average loss of a fixed action.
RegretLedger Settle(RegretKind kind, long steps, double realized_sum,
                    const LossFn& average, const Comparator& comparator) {
  RegretLedger ledger;
  ledger.kind = kind;
  ledger.steps = steps;
  ledger.realized = realized_sum / static_cast<double>(steps);
  ledger.best_action = comparator(average);
  ledger.comparator = average(ledger.best_action);
  return ledger;
}

}  // namespace

const char* ToString(RegretKind kind) {
  switch (kind) {
    case RegretKind::kVanillaX: return "vanilla-x";
    case RegretKind::kVanillaY: return "vanilla-y";
    case RegretKind::kAsymmetric: return "asymmetric";
    case RegretKind::kLagrangianX: return "lagrangian-x";
    case RegretKind::kLagrangianY: return "lagrangian-y";
    case RegretKind::kOnline: return "online";
  }
  return "unknown";
}

double RegretLedger::Regret() const {
  return IsOuter(kind) ? realized - comparator : comparator - realized;
}

Comparator FixedComparator(Vec point) {
  return [point = std::move(point)](const LossFn&) { return point; };
}

Comparator GridArgmin(const FeasibleSet& box, double resolution) {
  return GridSearch(box, resolution, 1.0);
}

Comparator GridArgmax(const FeasibleSet& box, double resolution) {
  return GridSearch(box, resolution, -1.0);
}

RegretLedger AsymmetricRegret(const IterateTrace& trace, const Game& game,
                              const Comparator& comparator) {
  if (!game.best_response_oracle) {
    throw Error(ErrorKind::kUnsupported, "asymmetric regret needs a best-response oracle");
  }
  const auto& records = FullRecords(trace);
  double realized = 0.0;
  for (const StepRecord& r : records) realized += ValueFunction(game, r.x);
  // The average of a time-invariant loss is the loss itself.
  const LossFn average = [&game](const Vec& x) { return ValueFunction(game, x); };
  return Settle(RegretKind::kAsymmetric, trace.steps(), realized, average, comparator);
}

RegretLedger LagrangianRegret(const IterateTrace& trace, const Game& game,
                              const Vec& lambda_star, Side side,
                              const Comparator& comparator) {
  if (lambda_star.size() != game.num_constraints) {
    throw Error(ErrorKind::kDimensionMismatch, "multiplier has the wrong dimension");
  }
  if ((lambda_star.array() < 0.0).any()) {
    throw Error(ErrorKind::kInvalidArgument, "multipliers must be nonnegative");
  }
  const auto& records = FullRecords(trace);
  auto lagrangian = [&game, &lambda_star](const Vec& x, const Vec& y) {
    double v = game.objective(x, y);
    if (game.num_constraints > 0) v += lambda_star.dot(game.constraints(x, y));
    return v;
  };
  double realized = 0.0;
  for (const StepRecord& r : records) realized += lagrangian(r.x, r.y);
  const double n = static_cast<double>(records.size());
  LossFn average;
  if (side == Side::kX) {
    average = [&](const Vec& x) {
      double s = 0.0;
      for (const StepRecord& r : records) s += lagrangian(x, r.y);
      return s / n;
    };
  } else {
    average = [&](const Vec& y) {
      double s = 0.0;
      for (const StepRecord& r : records) s += lagrangian(r.x, y);
      return s / n;
    };
  }
  const RegretKind kind = side == Side::kX ? RegretKind::kLagrangianX : RegretKind::kLagrangianY;
  return Settle(kind, trace.steps(), realized, average, comparator);
}

RegretLedger VanillaRegret(const IterateTrace& trace, const Game& game, Side side,
                           const Comparator& comparator) {
  const auto& records = FullRecords(trace);
  double realized = 0.0;
  for (const StepRecord& r : records) realized += game.objective(r.x, r.y);
  const double n = static_cast<double>(records.size());
  LossFn average;
  if (side == Side::kX) {
    average = [&](const Vec& x) {
      double s = 0.0;
      for (const StepRecord& r : records) s += game.objective(x, r.y);
      return s / n;
    };
  } else {
    average = [&](const Vec& y) {
      double s = 0.0;
      for (const StepRecord& r : records) s += game.objective(r.x, y);
      return s / n;
    };
  }
  const RegretKind kind = side == Side::kX ? RegretKind::kVanillaX : RegretKind::kVanillaY;
  return Settle(kind, trace.steps(), realized, average, comparator);
}

RegretLedger OnlineRegret(const IterateTrace& trace, const Vec& x0,
                          const OnlineLoss& loss, const Comparator& comparator) {
  const auto& records = FullRecords(trace);
  const long steps = trace.steps();
  double realized = loss(1, x0);
  for (long t = 2; t <= steps; ++t) realized += loss(t, records[t - 2].x);
  const LossFn average = [&loss, steps](const Vec& x) {
    double s = 0.0;
    for (long t = 1; t <= steps; ++t) s += loss(t, x);
    return s / static_cast<double>(steps);
  };
  return Settle(RegretKind::kOnline, steps, realized, average, comparator);
}

}  // namespace stackelberg
