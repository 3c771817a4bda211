#include "qpm/verify.hpp"

#include "qpm/double_groupoid.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <optional>
#include <thread>

namespace qpm {

const std::vector<CheckInfo>& catalog() {
  static const std::vector<CheckInfo> all = [] {
    std::vector<CheckInfo> v;
    register_poisson_checks(v);
    register_groupoid_checks(v);
    register_double_checks(v);
    return v;
  }();
  return all;
}

const CheckInfo& find_check(const std::string& id) {
  for (const CheckInfo& c : catalog())
    if (c.id == id) return c;
  throw UnknownCheck("unknown check '" + id + "'");
}

std::vector<std::string> check_ids() {
  std::vector<std::string> ids;
  for (const CheckInfo& c : catalog()) ids.push_back(c.id);
  return ids;
}

std::string surface_kind_name(SurfaceKind s) {
  switch (s) {
    case SurfaceKind::Disc:
      return "disc";
    case SurfaceKind::Double:
      return "double";
    case SurfaceKind::None:
      return "none";
  }
  return "?";
}

namespace {

void validate(const CheckInfo& info, const CheckConfig& cfg) {
  if (cfg.samples < 1) throw InvalidConfig("samples must be at least 1");
  if (!(cfg.tol > 0)) throw InvalidConfig("tol must be positive");
  if (!(cfg.fd_step > 0)) throw InvalidConfig("fd step must be positive");
  if (cfg.group_n < 2 || cfg.group_n > 4) throw InvalidConfig("group_n must be in 2..4");
  if (cfg.surface_k < 1) throw InvalidConfig("surface size must be positive");
  if (info.surface == SurfaceKind::Double && cfg.surface != SurfaceKind::Double)
    throw InvalidConfig(info.id + " runs on a doubled disc");
  if (info.surface == SurfaceKind::Disc && cfg.surface != SurfaceKind::Disc &&
      !(info.any_surface && cfg.surface == SurfaceKind::Double))
    throw InvalidConfig(info.id + " runs on a plain disc");
  if (cfg.split < 0 || cfg.split >= std::max(cfg.surface_k, 1)) throw InvalidConfig("split out of range");
}

}  // namespace

Report run_check(const CheckConfig& cfg) {
  const CheckInfo& info = find_check(cfg.check_id);
  validate(info, cfg);
  const auto start = std::chrono::steady_clock::now();
  const LieData L = build_sl(cfg.group_n);
  const Rng root(cfg.seed);

  std::vector<SampleOutcome> out(static_cast<size_t>(cfg.samples));
  std::vector<std::optional<std::string>> construction(static_cast<size_t>(cfg.samples));
  std::vector<std::exception_ptr> errors(static_cast<size_t>(cfg.samples));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < cfg.samples; i = next++) {
      Rng rng = root.child(static_cast<std::uint64_t>(i));
      CheckContext ctx{cfg, L, i, rng};
      try {
        out[i] = info.run(ctx);
      } catch (const ConstructionFailed& e) {
        construction[i] = e.what();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.samples);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (int i = 0; i < cfg.samples; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    if (construction[i]) throw ConstructionFailed("sample " + std::to_string(i) + ": " + *construction[i]);
  }

  Report r;
  r.config = cfg;
  std::map<std::string, double> extras;
  std::vector<std::string> order;
  for (int i = 0; i < cfg.samples; ++i) {
    const SampleOutcome& o = out[i];
    r.max_defect = std::max(r.max_defect, std::isfinite(o.defect) ? o.defect : 1e300);
    if (!o.diagnostic.empty()) r.failures.push_back({i, o.diagnostic});
    for (const auto& [k, v] : o.extras) {
      if (!extras.count(k)) order.push_back(k);
      extras[k] = std::max(extras[k], v);
    }
  }
  for (const std::string& k : order) r.extras.emplace_back(k, extras[k]);
  r.pass = r.max_defect < cfg.tol && r.failures.empty();
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

nlohmann::json to_json(const CheckConfig& c) {
  return {{"check_id", c.check_id},
          {"group", "sl" + std::to_string(c.group_n)},
          {"surface", surface_kind_name(c.surface)},
          {"surface_k", c.surface_k},
          {"split", c.split},
          {"samples", c.samples},
          {"tol", c.tol},
          {"fd_step", c.fd_step},
          {"seed", c.seed},
          {"mutate", c.mutate}};
}

nlohmann::json to_json(const Report& r, bool with_runtime) {
  nlohmann::json j;
  j["check_id"] = r.config.check_id;
  j["config"] = to_json(r.config);
  j["max_defect"] = r.max_defect;
  nlohmann::json f = nlohmann::json::array();
  for (const SampleFailure& s : r.failures) f.push_back({{"sample", s.sample}, {"diagnostic", s.diagnostic}});
  j["failures"] = f;
  nlohmann::json e = nlohmann::json::object();
  for (const auto& [k, v] : r.extras) e[k] = v;
  j["extras"] = e;
  j["pass"] = r.pass;
  if (with_runtime) j["runtime_ms"] = r.runtime_ms;
  return j;
}

}  // namespace qpm
