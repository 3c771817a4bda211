#pragma once

#include "qpm/lie_core.hpp"

#include <json.hpp>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qpm {

struct UnknownCheck : Error {
  using Error::Error;
};

/// The configuration does not fit the check (wrong surface family, odd size
/// where a split into halves is needed, ...).
struct InvalidConfig : Error {
  using Error::Error;
};

/// Surface the check runs on: a plain disc(k), the doubled disc of disc(k), or
/// none (the check only reads group_n and, where documented, k as a count).
enum class SurfaceKind { Disc, Double, None };

struct CheckConfig {
  std::string check_id;
  int group_n = 2;
  SurfaceKind surface = SurfaceKind::Disc;
  int surface_k = 2;
  int split = 0;  ///< left part size on doubled discs; 0 means k / 2
  int samples = 10;
  double tol = 1e-9;
  double fd_step = 1e-4;
  std::uint64_t seed = 1;
  bool mutate = false;  ///< run the documented negative control instead
  int threads = 0;      ///< 0 picks the hardware concurrency
};

struct SampleFailure {
  int sample = 0;
  std::string diagnostic;
};

struct Report {
  CheckConfig config;
  double max_defect = 0.0;
  std::vector<SampleFailure> failures;
  bool pass = false;
  double runtime_ms = 0.0;
  /// Secondary defects keyed by name (for example a finite-difference
  /// disagreement); each is the maximum over samples.
  std::vector<std::pair<std::string, double>> extras;
};

/// What a single sample reports back to the driver.
struct SampleOutcome {
  double defect = 0.0;
  std::string diagnostic;  ///< non-empty marks the sample as failed
  std::vector<std::pair<std::string, double>> extras;
};

struct CheckContext {
  const CheckConfig& cfg;
  const LieData& lie;
  int index;
  Rng& rng;
};

using SampleFn = std::function<SampleOutcome(const CheckContext&)>;

struct CheckInfo {
  std::string id;
  std::string summary;
  SurfaceKind surface;
  std::string defect;    ///< how the defect is measured and whether it is relative
  std::string mutation;  ///< what the negative control changes
  SampleFn run;
  bool any_surface = false;  ///< a Disc check that also accepts the doubled disc
};

/// The catalog, in a fixed order.
const std::vector<CheckInfo>& catalog();
const CheckInfo& find_check(const std::string& id);
std::vector<std::string> check_ids();

/// Runs cfg.samples samples in parallel, each with the stream
/// Rng(cfg.seed).child(index); throws UnknownCheck, InvalidConfig, and
/// ConstructionFailed naming the sample when a sampler gives up.
Report run_check(const CheckConfig& cfg);

std::string surface_kind_name(SurfaceKind s);
nlohmann::json to_json(const CheckConfig& c);
/// Without runtime the JSON is a pure function of the configuration.
nlohmann::json to_json(const Report& r, bool with_runtime = true);

// Catalog pieces, one per source file.
void register_poisson_checks(std::vector<CheckInfo>& out);
void register_groupoid_checks(std::vector<CheckInfo>& out);
void register_double_checks(std::vector<CheckInfo>& out);

}  // namespace qpm
