#include "stackelberg/experiment/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "stackelberg/fisher_io.hpp"

namespace stackelberg {

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::kStackelbergSolve, "stackelberg-solve"},
    {ExperimentKind::kFisherStatic, "fisher-static"},
    {ExperimentKind::kFisherOnline, "fisher-online"},
    {ExperimentKind::kRobustnessAsym, "robustness-asym"},
    {ExperimentKind::kRobustnessSym, "robustness-sym"},
    {ExperimentKind::kRegretReport, "regret-report"},
};

constexpr std::pair<StackelbergSolver, const char*> kSolverNames[] = {
    {StackelbergSolver::kMaxOracle, "max-oracle"},
    {StackelbergSolver::kNested, "nested"},
    {StackelbergSolver::kLagrangian, "lagrangian"},
    {StackelbergSolver::kVanilla, "vanilla"},
};

const char* const kLossNames[] = {"box-linear", "box-quadratic", "simplex-linear"};

// Collects schema errors with line context instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  void Fail(const YAML::Node& node, const std::string& message) {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": " << message;
    errors_.push_back(os.str());
  }

  const std::vector<std::string>& errors() const { return errors_; }

  // Rejects keys outside `allowed`, naming each.
  void Keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& kv : map) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) Fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  bool Map(const YAML::Node& node, const std::string& where) {
    if (node.IsMap()) return true;
    Fail(node, where + " must be a mapping");
    return false;
  }

  template <class T>
  bool Get(const YAML::Node& map, const char* key, T& out) {
    const YAML::Node node = map[key];
    if (!node.IsDefined()) return false;
    try {
      if (!node.IsScalar()) throw YAML::BadConversion(node.Mark());
      out = node.as<T>();
      return true;
    } catch (const YAML::Exception&) {
      Fail(node, std::string("'") + key + "' has the wrong type");
      return false;
    }
  }

  bool GetPositive(const YAML::Node& map, const char* key, double& out) {
    double v = out;
    if (!Get(map, key, v)) return false;
    if (!(v > 0.0) || !std::isfinite(v)) {
      Fail(map[key], std::string("'") + key + "' must be positive and finite");
      return false;
    }
    out = v;
    return true;
  }

  bool GetVector(const YAML::Node& map, const char* key, Vec& out) {
    const YAML::Node node = map[key];
    if (!node.IsDefined()) return false;
    return ToVector(node, key, out);
  }

  bool ToVector(const YAML::Node& node, const std::string& what, Vec& out) {
    if (!node.IsSequence() || node.size() == 0) {
      Fail(node, "'" + what + "' must be a nonempty list of numbers");
      return false;
    }
    Vec v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) {
      try {
        v[static_cast<Eigen::Index>(i)] = node[i].as<double>();
      } catch (const YAML::Exception&) {
        Fail(node[i], "'" + what + "' must be a nonempty list of numbers");
        return false;
      }
      if (!std::isfinite(v[static_cast<Eigen::Index>(i)])) {
        Fail(node[i], "'" + what + "' entries must be finite");
        return false;
      }
    }
    out = std::move(v);
    return true;
  }

  bool GetMatrix(const YAML::Node& map, const char* key, Mat& out) {
    const YAML::Node node = map[key];
    if (!node.IsDefined()) return false;
    if (!node.IsSequence() || node.size() == 0) {
      Fail(node, std::string("'") + key + "' must be a nonempty list of rows");
      return false;
    }
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < node.size(); ++i) {
      Vec row;
      if (!ToVector(node[i], std::string(key) + " row", row)) return false;
      if (!rows.empty() && row.size() != rows.front().size()) {
        Fail(node[i], std::string("rows of '") + key + "' differ in length");
        return false;
      }
      rows.push_back(std::move(row));
    }
    Mat m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
    out = std::move(m);
    return true;
  }

  // A scalar or a list of scalars.
  bool GetNames(const YAML::Node& map, const char* key, std::vector<std::string>& out) {
    const YAML::Node node = map[key];
    if (!node.IsDefined()) return false;
    std::vector<std::string> names;
    try {
      if (node.IsScalar()) {
        names.push_back(node.as<std::string>());
      } else if (node.IsSequence() && node.size() > 0) {
        for (const auto& item : node) names.push_back(item.as<std::string>());
      } else {
        throw YAML::BadConversion(node.Mark());
      }
    } catch (const YAML::Exception&) {
      Fail(node, std::string("'") + key + "' must be a name or a nonempty list of names");
      return false;
    }
    out = std::move(names);
    return true;
  }

  bool GetRange(const YAML::Node& map, const char* key, double& lo, double& hi) {
    Vec v;
    if (!GetVector(map, key, v)) return false;
    if (v.size() != 2 || !(v[0] <= v[1])) {
      Fail(map[key], std::string("'") + key + "' must be [lo, hi] with lo <= hi");
      return false;
    }
    lo = v[0];
    hi = v[1];
    return true;
  }

 private:
  std::string source_;
  std::vector<std::string> errors_;
};

void ReadSchedule(Reader& r, const YAML::Node& node, const std::string& where, ScheduleSpec& out) {
  if (!r.Map(node, where)) return;
  std::string kind;
  if (!r.Get(node, "kind", kind)) {
    r.Fail(node, where + " needs a 'kind'");
    return;
  }
  const char* scale_key = nullptr;
  if (kind == "constant") {
    out.kind = StepSchedule::Kind::kConstant;
    scale_key = "eta";
  } else if (kind == "inverse-sqrt") {
    out.kind = StepSchedule::Kind::kInverseSqrt;
    scale_key = "a";
  } else if (kind == "fixed-horizon") {
    out.kind = StepSchedule::Kind::kFixedHorizon;
    scale_key = "c";
  } else {
    r.Fail(node["kind"], "unknown schedule kind '" + kind +
                             "' (constant, inverse-sqrt, fixed-horizon)");
    return;
  }
  std::set<std::string> allowed = {"kind", scale_key};
  if (out.kind == StepSchedule::Kind::kFixedHorizon) allowed.insert("lipschitz");
  r.Keys(node, allowed, where);
  if (!node[scale_key].IsDefined()) r.Fail(node, where + " needs '" + scale_key + "'");
  r.GetPositive(node, scale_key, out.scale);
  if (out.kind == StepSchedule::Kind::kFixedHorizon && !node["lipschitz"].IsDefined()) {
    r.Fail(node, where + " needs 'lipschitz'");
  }
  r.GetPositive(node, "lipschitz", out.lipschitz);
}

void ReadRanges(Reader& r, const YAML::Node& node, const std::string& where, MarketRanges& out) {
  if (!r.Map(node, where)) return;
  r.Keys(node, {"budget", "valuation", "supply"}, where);
  for (auto [key, range] : {std::pair{"budget", &out.budget}, std::pair{"valuation", &out.valuation},
                            std::pair{"supply", &out.supply}}) {
    if (r.GetRange(node, key, range->lo, range->hi) && !(range->lo > 0.0)) {
      r.Fail(node[key], where + "." + key + " needs lo > 0");
    }
  }
}

void ReadWindow(Reader& r, const YAML::Node& map, const char* key, long& from, long& to) {
  double lo = 0.0;
  double hi = 0.0;
  if (!r.GetRange(map, key, lo, hi)) return;
  if (lo < 1 || lo != std::floor(lo) || hi != std::floor(hi)) {
    r.Fail(map[key], std::string("'") + key + "' must hold 1-based step indices");
    return;
  }
  from = static_cast<long>(lo);
  to = static_cast<long>(hi);
}

void ReadStackelberg(Reader& r, const YAML::Node& node, StackelbergSpec& s) {
  if (!r.Map(node, "stackelberg")) return;
  r.Keys(node,
         {"game", "solver", "regularizer", "schedule", "schedule_y", "x0", "y0", "inner_steps",
          "multiplier", "degeneracy_window", "check_bound", "radius"},
         "stackelberg");
  if (r.Get(node, "game", s.game) && s.game != "G0" && s.game != "G1") {
    r.Fail(node["game"], "unknown game '" + s.game + "' (G0, G1)");
  }
  std::string solver;
  if (r.Get(node, "solver", solver)) {
    bool found = false;
    for (auto [value, name] : kSolverNames) {
      if (solver == name) {
        s.solver = value;
        found = true;
      }
    }
    if (!found) {
      r.Fail(node["solver"],
             "unknown solver '" + solver + "' (max-oracle, nested, lagrangian, vanilla)");
    }
  }
  std::string reg;
  if (r.Get(node, "regularizer", reg)) {
    if (reg == "euclidean") {
      s.reg = Regularizer::kEuclidean;
    } else if (reg == "negative-entropy") {
      s.reg = Regularizer::kNegativeEntropy;
    } else {
      r.Fail(node["regularizer"], "unknown regularizer '" + reg + "'");
    }
  }
  if (node["schedule"].IsDefined()) ReadSchedule(r, node["schedule"], "stackelberg.schedule", s.schedule_x);
  if (node["schedule_y"].IsDefined()) {
    ScheduleSpec y;
    ReadSchedule(r, node["schedule_y"], "stackelberg.schedule_y", y);
    s.schedule_y = y;
  }
  r.GetVector(node, "x0", s.x0);
  r.GetVector(node, "y0", s.y0);
  if (r.Get(node, "inner_steps", s.inner_steps) && s.inner_steps < 0) {
    r.Fail(node["inner_steps"], "'inner_steps' must be nonnegative");
  }
  Vec lambda;
  if (r.GetVector(node, "multiplier", lambda)) s.multiplier = lambda;
  if (r.Get(node, "degeneracy_window", s.degeneracy_window) && s.degeneracy_window < 1) {
    r.Fail(node["degeneracy_window"], "'degeneracy_window' must be at least 1");
  }
  r.Get(node, "check_bound", s.check_bound);
  r.GetPositive(node, "radius", s.radius);
}

void ReadFisher(Reader& r, const YAML::Node& node, bool online, const std::string& base_dir,
                FisherSpec& f) {
  if (!r.Map(node, "fisher")) return;
  std::set<std::string> allowed = {"dynamics", "p0", "p0_range", "tatonnement", "myopic"};
  if (online) {
    allowed.insert({"utilities", "buyers", "goods", "early_window", "late_window"});
  } else {
    allowed.insert({"market", "market_file"});
  }
  r.Keys(node, allowed, "fisher");

  std::vector<std::string> names;
  if (r.GetNames(node, "utilities", names)) {
    f.utilities.clear();
    for (const auto& name : names) {
      try {
        f.utilities.push_back(ParseUtilityKind(name));
      } catch (const Error&) {
        r.Fail(node["utilities"], "unknown utility kind '" + name + "'");
      }
    }
  }
  if (r.GetNames(node, "dynamics", names)) {
    f.dynamics.clear();
    for (const auto& name : names) {
      if (name == "tatonnement") {
        f.dynamics.push_back(FisherDynamics::kTatonnement);
      } else if (name == "myopic") {
        f.dynamics.push_back(FisherDynamics::kMyopic);
      } else {
        r.Fail(node["dynamics"], "unknown dynamics '" + name + "' (tatonnement, myopic)");
      }
    }
  }

  if (!online) {
    const YAML::Node market = node["market"];
    const YAML::Node file = node["market_file"];
    if (market.IsDefined() == file.IsDefined()) {
      r.Fail(node, "fisher-static needs exactly one of 'market' and 'market_file'");
    } else if (file.IsDefined()) {
      std::string path;
      if (r.Get(node, "market_file", path)) {
        std::filesystem::path p(path);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        try {
          f.market = LoadMarket(p.string());
        } catch (const Error& e) {
          r.Fail(file, e.what());
        }
      }
    } else if (r.Map(market, "fisher.market")) {
      r.Keys(market, {"utility", "valuations", "budgets", "supplies"}, "fisher.market");
      std::string kind;
      Mat v;
      Vec b;
      Vec s;
      const bool ok = r.Get(market, "utility", kind) & r.GetMatrix(market, "valuations", v) &
                      r.GetVector(market, "budgets", b) & r.GetVector(market, "supplies", s);
      if (!ok) {
        r.Fail(market, "fisher.market needs utility, valuations, budgets and supplies");
      } else {
        try {
          f.market = FisherMarket(ParseUtilityKind(kind), v, b, s);
        } catch (const Error& e) {
          r.Fail(market, e.what());
        }
      }
    }
  }

  long count = 0;
  if (r.Get(node, "buyers", count)) {
    if (count < 1) r.Fail(node["buyers"], "'buyers' must be at least 1");
    f.buyers = static_cast<int>(count);
  }
  if (r.Get(node, "goods", count)) {
    if (count < 1) r.Fail(node["goods"], "'goods' must be at least 1");
    f.goods = static_cast<int>(count);
  }
  Vec p0;
  if (r.GetVector(node, "p0", p0)) {
    if ((p0.array() < 0.0).any()) r.Fail(node["p0"], "'p0' must be nonnegative");
    f.p0 = p0;
  }
  if (r.GetRange(node, "p0_range", f.p0_range.lo, f.p0_range.hi) && f.p0_range.lo < 0.0) {
    r.Fail(node["p0_range"], "'p0_range' must be nonnegative");
  }
  ReadWindow(r, node, "early_window", f.early_from, f.early_to);
  ReadWindow(r, node, "late_window", f.late_from, f.late_to);

  if (const YAML::Node t = node["tatonnement"]; t.IsDefined() && r.Map(t, "fisher.tatonnement")) {
    r.Keys(t, {"schedule", "ranges"}, "fisher.tatonnement");
    if (t["schedule"].IsDefined()) {
      ReadSchedule(r, t["schedule"], "fisher.tatonnement.schedule", f.tatonnement.schedule);
    }
    if (t["ranges"].IsDefined()) {
      ReadRanges(r, t["ranges"], "fisher.tatonnement.ranges", f.tatonnement.ranges);
    }
  }
  if (const YAML::Node m = node["myopic"]; m.IsDefined() && r.Map(m, "fisher.myopic")) {
    r.Keys(m, {"price_schedule", "allocation_schedule", "ranges", "x0", "budget_projection"},
           "fisher.myopic");
    if (m["price_schedule"].IsDefined()) {
      ReadSchedule(r, m["price_schedule"], "fisher.myopic.price_schedule", f.myopic.price_schedule);
    }
    if (m["allocation_schedule"].IsDefined()) {
      ReadSchedule(r, m["allocation_schedule"], "fisher.myopic.allocation_schedule",
                   f.myopic.allocation_schedule);
    }
    if (m["ranges"].IsDefined()) ReadRanges(r, m["ranges"], "fisher.myopic.ranges", f.myopic.ranges);
    std::string x0;
    if (r.Get(m, "x0", x0)) {
      if (x0 == "equal-split") {
        f.myopic.x0 = InitialAllocation::kEqualSplit;
      } else if (x0 == "demand") {
        f.myopic.x0 = InitialAllocation::kDemand;
      } else {
        r.Fail(m["x0"], "unknown initial allocation '" + x0 + "' (equal-split, demand)");
      }
    }
    r.Get(m, "budget_projection", f.myopic.budget_projection);
  }
}

void ReadRobustness(Reader& r, const YAML::Node& node, RobustnessSpec& s) {
  if (!r.Map(node, "robustness")) return;
  r.Keys(node,
         {"pairs", "drifts", "mu_y", "dim_x", "dim_y", "coupling", "center_scale", "eta_fraction"},
         "robustness");
  if (const YAML::Node pairs = node["pairs"]; pairs.IsDefined()) {
    Mat m;
    if (r.GetMatrix(node, "pairs", m)) {
      if (m.cols() != 2) {
        r.Fail(pairs, "'pairs' must list [mu, L] pairs");
      } else {
        s.pairs.clear();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          if (!(m(i, 0) > 0.0) || !(m(i, 0) <= m(i, 1))) {
            r.Fail(pairs[static_cast<std::size_t>(i)], "each pair needs 0 < mu <= L");
          }
          s.pairs.push_back({m(i, 0), m(i, 1)});
        }
      }
    }
  }
  Vec drifts;
  if (r.GetVector(node, "drifts", drifts)) {
    if ((drifts.array() < 0.0).any()) r.Fail(node["drifts"], "'drifts' must be nonnegative");
    s.drifts.assign(drifts.begin(), drifts.end());
  }
  double mu_y = 0.0;
  if (r.GetPositive(node, "mu_y", mu_y)) s.mu_y = mu_y;
  long dim = 0;
  if (r.Get(node, "dim_x", dim)) {
    if (dim < 1) r.Fail(node["dim_x"], "'dim_x' must be at least 1");
    s.dim_x = static_cast<int>(dim);
  }
  if (r.Get(node, "dim_y", dim)) {
    if (dim < 1) r.Fail(node["dim_y"], "'dim_y' must be at least 1");
    s.dim_y = static_cast<int>(dim);
  }
  if (r.GetMatrix(node, "coupling", s.coupling) &&
      (s.coupling.rows() != s.dim_x || s.coupling.cols() != s.dim_y)) {
    r.Fail(node["coupling"], "'coupling' must be dim_x by dim_y");
  }
  if (r.Get(node, "center_scale", s.center_scale) && !(s.center_scale >= 0.0)) {
    r.Fail(node["center_scale"], "'center_scale' must be nonnegative");
  }
  if (r.GetPositive(node, "eta_fraction", s.eta_fraction) && s.eta_fraction > 1.0) {
    r.Fail(node["eta_fraction"], "'eta_fraction' must lie in (0, 1]");
  }
}

void ReadRegret(Reader& r, const YAML::Node& node, RegretSpec& s) {
  if (!r.Map(node, "regret")) return;
  r.Keys(node, {"losses"}, "regret");
  std::vector<std::string> names;
  if (r.GetNames(node, "losses", names)) {
    for (const auto& name : names) {
      if (std::find(std::begin(kLossNames), std::end(kLossNames), name) == std::end(kLossNames)) {
        r.Fail(node["losses"], "unknown loss sequence '" + name + "'");
      }
    }
    s.losses = names;
  }
}

const char* SectionFor(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kStackelbergSolve:
      return "stackelberg";
    case ExperimentKind::kFisherStatic:
    case ExperimentKind::kFisherOnline:
      return "fisher";
    case ExperimentKind::kRobustnessAsym:
    case ExperimentKind::kRobustnessSym:
      return "robustness";
    case ExperimentKind::kRegretReport:
      return "regret";
  }
  return "";
}

std::vector<long> DefaultHorizons(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kStackelbergSolve:
      return {1000};
    case ExperimentKind::kFisherStatic:
      return {10000};
    case ExperimentKind::kFisherOnline:
      return {1000};
    case ExperimentKind::kRobustnessAsym:
    case ExperimentKind::kRobustnessSym:
      return {200};
    case ExperimentKind::kRegretReport:
      return {100, 1000, 10000};
  }
  return {1000};
}

}  // namespace

const char* ToString(ExperimentKind kind) {
  for (auto [value, name] : kKindNames) {
    if (value == kind) return name;
  }
  return "?";
}

ExperimentKind ParseExperimentKind(std::string_view name) {
  for (auto [value, text] : kKindNames) {
    if (name == text) return value;
  }
  throw Error(ErrorKind::kConfig, "unknown experiment kind '" + std::string(name) + "'");
}

const char* ToString(StackelbergSolver solver) {
  for (auto [value, name] : kSolverNames) {
    if (value == solver) return name;
  }
  return "?";
}

const char* ToString(FisherDynamics dynamics) {
  return dynamics == FisherDynamics::kTatonnement ? "tatonnement" : "myopic";
}

StepSchedule ScheduleSpec::Build(long horizon) const {
  switch (kind) {
    case StepSchedule::Kind::kConstant:
      return StepSchedule::Constant(scale);
    case StepSchedule::Kind::kFixedHorizon:
      return StepSchedule::FixedHorizon(scale, lipschitz, horizon);
    case StepSchedule::Kind::kInverseSqrt:
      break;
  }
  return StepSchedule::InverseSqrt(scale);
}

ExperimentConfig ParseConfig(std::string_view text, std::string_view source_name,
                             const std::string& base_dir) {
  const std::string source(source_name);
  YAML::Node loaded;
  try {
    loaded = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ": malformed YAML: " << e.msg;
    throw Error(ErrorKind::kConfig, os.str());
  }
  // Const access only: the mutable operator[] would insert missing keys.
  const YAML::Node& root = loaded;
  Reader r(source);
  ExperimentConfig c;
  if (!root.IsMap()) {
    r.Fail(root, "config must be a mapping");
  } else {
    std::string kind;
    if (!r.Get(root, "kind", kind)) {
      if (!root["kind"].IsDefined()) r.Fail(root, "missing 'kind'");
    } else {
      try {
        c.kind = ParseExperimentKind(kind);
      } catch (const Error& e) {
        r.Fail(root["kind"], e.what());
      }
    }
    if (r.errors().empty()) {
      const std::string section = SectionFor(c.kind);
      r.Keys(root,
             {"kind", "horizon", "horizons", "seeds", "seed_count", "output_dir", "plot",
              "tolerance", "threads", "stackelberg", "fisher", "robustness", "regret"},
             "the config");
      for (const char* other : {"stackelberg", "fisher", "robustness", "regret"}) {
        if (other != section && root[other].IsDefined()) {
          r.Fail(root[other], std::string("section '") + other + "' does not apply to " + kind);
        }
      }

      c.horizons = DefaultHorizons(c.kind);
      if (root["horizon"].IsDefined() && root["horizons"].IsDefined()) {
        r.Fail(root["horizons"], "give 'horizon' or 'horizons', not both");
      }
      long horizon = 0;
      if (r.Get(root, "horizon", horizon)) c.horizons = {horizon};
      Vec list;
      if (r.GetVector(root, "horizons", list)) {
        c.horizons.clear();
        for (double h : list) {
          if (h != std::floor(h)) r.Fail(root["horizons"], "horizons must be integers");
          c.horizons.push_back(static_cast<long>(h));
        }
      }
      for (long h : c.horizons) {
        if (h <= 0) {
          r.Fail(root[root["horizon"].IsDefined() ? "horizon" : "horizons"],
                 "horizon must be positive, got " + std::to_string(h));
        }
      }

      if (root["seeds"].IsDefined() && root["seed_count"].IsDefined()) {
        r.Fail(root["seed_count"], "give 'seeds' or 'seed_count', not both");
      }
      if (const YAML::Node seeds = root["seeds"]; seeds.IsDefined()) {
        c.seeds.clear();
        try {
          if (!seeds.IsSequence() || seeds.size() == 0) throw YAML::BadConversion(seeds.Mark());
          for (const auto& s : seeds) c.seeds.push_back(s.as<std::uint64_t>());
        } catch (const YAML::Exception&) {
          r.Fail(seeds, "'seeds' must be a nonempty list of nonnegative integers");
        }
      }
      long count = 0;
      if (r.Get(root, "seed_count", count)) {
        if (count < 1) r.Fail(root["seed_count"], "'seed_count' must be at least 1");
        c.seeds.clear();
        for (long s = 0; s < count; ++s) c.seeds.push_back(static_cast<std::uint64_t>(s));
      }

      c.output_dir = std::string("out/") + ToString(c.kind);
      r.Get(root, "output_dir", c.output_dir);
      r.Get(root, "plot", c.plot);
      double tol = 0.0;
      if (r.GetPositive(root, "tolerance", tol)) c.tolerance = tol;
      long threads = 0;
      if (r.Get(root, "threads", threads)) {
        if (threads < 0) r.Fail(root["threads"], "'threads' must be nonnegative");
        c.threads = static_cast<int>(threads);
      }

      const YAML::Node body = root[section];
      switch (c.kind) {
        case ExperimentKind::kStackelbergSolve:
          if (body.IsDefined()) ReadStackelberg(r, body, c.stackelberg);
          break;
        case ExperimentKind::kFisherStatic:
        case ExperimentKind::kFisherOnline: {
          const bool online = c.kind == ExperimentKind::kFisherOnline;
          if (body.IsDefined()) {
            ReadFisher(r, body, online, base_dir, c.fisher);
          } else if (!online) {
            r.Fail(root, "fisher-static needs a 'fisher' section with a market");
          }
          if (online) {
            const FisherSpec& f = c.fisher;
            if (f.early_from > f.early_to || f.late_from > f.late_to) {
              r.Fail(body, "windows need from <= to");
            }
            for (long h : c.horizons) {
              if (f.late_to > h || f.early_to > h) {
                r.Fail(body.IsDefined() ? body : root,
                       "distance windows end after horizon " + std::to_string(h));
              }
            }
          }
          if (c.fisher.p0 && c.fisher.market && c.fisher.p0->size() != c.fisher.market->goods()) {
            r.Fail(body["p0"], "'p0' length does not match the number of goods");
          }
          if (c.fisher.p0 && online && c.fisher.p0->size() != c.fisher.goods) {
            r.Fail(body["p0"], "'p0' length does not match 'goods'");
          }
          break;
        }
        case ExperimentKind::kRobustnessAsym:
        case ExperimentKind::kRobustnessSym:
          if (body.IsDefined()) ReadRobustness(r, body, c.robustness);
          break;
        case ExperimentKind::kRegretReport:
          if (body.IsDefined()) ReadRegret(r, body, c.regret);
          break;
      }
    }
  }
  if (!r.errors().empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < r.errors().size(); ++i) os << (i ? "\n" : "") << r.errors()[i];
    throw Error(ErrorKind::kConfig, os.str());
  }
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::filesystem::path p(path);
  return ParseConfig(buffer.str(), path, p.has_parent_path() ? p.parent_path().string() : ".");
}

}  // namespace stackelberg
