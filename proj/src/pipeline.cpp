#include "armub/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "armub/gf.hpp"

namespace armub {

namespace fs = std::filesystem;

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Hadamard: return "hadamard";
    case Stage::Epsh: return "epsh";
    case Stage::Rbd: return "rbd";
    case Stage::Assemble: return "assemble";
    case Stage::Verify: return "verify";
  }
  return "?";
}

int exit_code_for(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const StageError& ex) {
    return ex.exit_code();
  } catch (const ParseError&) {
    return kExitUsage;
  } catch (const NotConstructibleError&) {
    return kExitNotConstructible;
  } catch (const DomainError&) {
    return kExitDomain;
  } catch (const ResourceError&) {
    return kExitResource;
  } catch (const std::bad_alloc&) {
    return kExitResource;
  } catch (...) {
    return kExitInternal;
  }
}

namespace {

bool is_hadamard_order(int k) { return k == 1 || k == 2 || (k > 0 && k % 4 == 0); }

bool odd_prime_power(int s) { return s >= 3 && s % 2 == 1 && prime_power(std::uint64_t(s)).has_value(); }

// Feasible (k, t): either a reduction of H_{k+t} or a direct H_k.
bool feasible(int k, int t) {
  if (k < 1) return false;
  if (t == 0) return is_hadamard_order(k);
  if ((k + t) % 4 != 0) return false;
  return t * t < k + t || is_hadamard_order(k);
}

std::optional<std::string> fallback_note(int k, int t) {
  if (t == 0 || t * t < k + t) return std::nullopt;
  return "t = " + std::to_string(t) + " is not admissible for 4n = " + std::to_string(k + t) +
         " (needs t^2 < 4n); using H_" + std::to_string(k) + "/sqrt(" + std::to_string(k) + ") with t = 0";
}

template <typename Fn>
auto run_stage(Stage stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, to_string(stage) + ": " + e.what(), exit_code_for(std::current_exception()));
  }
}

std::string recipe_text(int order) {
  std::string out;
  for (const auto& f : hadamard_recipe(order)) {
    if (!out.empty()) out += " x ";
    out += f.describe();
  }
  return out;
}

}  // namespace

std::pair<int, int> split_dimension(int d, int t) {
  if (d < 1) throw DomainError("d must be positive");
  if (t < 0 || t > 3) throw DomainError("t must be 0, 1, 2 or 3");
  std::optional<std::pair<int, int>> best;
  double best_gap = 0;
  for (int k = 1; std::int64_t(k) * k <= d; ++k) {
    if (d % k != 0) continue;
    const int s = d / k;
    if (!odd_prime_power(s) || !feasible(k, t)) continue;
    const double gap = std::fabs(std::log(double(s) / double(k)));
    if (!best || gap < best_gap) {
      best = {k, s};
      best_gap = gap;
    }
  }
  if (!best) {
    throw DomainError("no split d = k*s with s an odd prime power, k <= s and 4 | k + " + std::to_string(t) +
                      " for d = " + std::to_string(d));
  }
  return *best;
}

void PipelineConfig::validate() {
  if (t < 0 || t > 3) throw DomainError("t must be 0, 1, 2 or 3, got " + std::to_string(t));
  if (k == 0 && s == 0) {
    if (!d) throw DomainError("give either --d or both --k and --s");
    std::tie(k, s) = split_dimension(*d, t);
  }
  if (k < 1) throw DomainError("k must be positive, got " + std::to_string(k));
  if (!odd_prime_power(s)) throw DomainError("s must be an odd prime power, got " + std::to_string(s));
  if (k > s) throw DomainError("k = " + std::to_string(k) + " exceeds s = " + std::to_string(s));
  if (d && *d != k * s) throw DomainError("d = " + std::to_string(*d) + " differs from k*s");
  if (t > 0 && order4n() % 4 != 0) {
    throw DomainError("4n = k + t = " + std::to_string(order4n()) + " is not a multiple of 4");
  }
  if (!feasible(k, t)) {
    throw DomainError("no orthogonal matrix of order " + std::to_string(k) + " from t = " + std::to_string(t));
  }
  if (order4n() > order_budget()) {
    throw ResourceError("Hadamard order " + std::to_string(order4n()) + " exceeds the budget " +
                        std::to_string(order_budget()));
  }
  if (threads < 1) throw DomainError("threads must be >= 1");
  d = k * s;
}

PipelineResult run_pipeline(PipelineConfig config) {
  config.validate();
  PipelineResult r;
  const auto note = fallback_note(config.k, config.t);
  const int order = note ? config.k : config.order4n();

  r.hadamard = run_stage(Stage::Hadamard, [&] { return std::make_shared<const SignMatrix>(find_hadamard(order)); });
  r.y = run_stage(Stage::Epsh, [&] {
    EpsHadamard e;
    if (note || config.t == 0) {
      e = direct_normalized(*r.hadamard);
    } else {
      SearchOptions opt;
      opt.scope = config.scope;
      opt.cap = config.search_cap;
      opt.threads = config.threads;
      e = best_reduction(*r.hadamard, config.t, opt);
    }
    e.source = recipe_text(order);
    return std::make_shared<const EpsHadamard>(std::move(e));
  });
  if (note) r.notes.push_back(*note);
  r.rbd = run_stage(Stage::Rbd, [&] { return std::make_shared<const Rbd>(build_affine_rbd(config.k, config.s)); });
  r.bases = run_stage(Stage::Assemble, [&] { return assemble(r.rbd, r.y); });
  run_stage(Stage::Verify, [&] {
    r.report = cross_stats(r.bases, config.mode, config.threads);
    r.ledger = check_theorem_bounds(r.report, *r.y);
    return 0;
  });
  r.config = config;
  return r;
}

nlohmann::json certificate_json(const PipelineResult& r) {
  const auto& c = r.config;
  const auto& rep = r.report;
  const auto root = isqrt(std::uint64_t(rep.d));
  const std::uint64_t ceil_root = root * root == std::uint64_t(rep.d) ? root : root + 1;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& l : r.ledger) checks.push_back({{"check", l.check}, {"verdict", to_string(l.verdict)}});
  return nlohmann::json{
      {"config",
       {{"d", rep.d},
        {"k", c.k},
        {"s", c.s},
        {"t", c.t},
        {"scope", to_string(c.scope)},
        {"search_cap", c.search_cap},
        {"mode", c.mode.to_string()},
        {"seed", c.mode.seed}}},
      {"hadamard", {{"order", r.hadamard->order()}, {"recipe", r.y->source}}},
      {"epsh",
       {{"k", r.y->k},
        {"m", r.y->order4n},
        {"t", r.y->t},
        {"method", r.y->method},
        {"variant", r.y->variant ? nlohmann::json(to_string(*r.y->variant)) : nlohmann::json(nullptr)},
        {"epsilon", r.y->epsilon.expression()},
        {"epsilon_float", r.y->epsilon.to_double()}}},
      {"rbd", {{"d", r.rbd->d}, {"k", r.rbd->k}, {"s", r.rbd->s}, {"classes", r.rbd->classes.size()}, {"mu", r.rbd->mu}}},
      {"bases",
       {{"count", r.bases.count()},
        {"ceil_sqrt_d", ceil_root},
        {"orthonormal", "blocks partition the points and Y is exactly orthogonal"}}},
      {"report",
       {{"classification", to_string(rep.classification)},
        {"evidence", rep.classification_lower_bound ? "sampled (lower bound)" : "exhaustive"},
        {"beta", rep.beta().to_string()},
        {"beta_float", rep.beta_float()},
        {"bound_float", rep.bound_float()},
        {"beta_within_bound", rep.beta_vs_bound <= 0},
        {"pairs_checked", rep.pairs_checked}}},
      {"ledger", std::move(checks)},
      {"ledger_passed", ledger_passes(r.ledger)},
      {"notes", r.notes},
  };
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  fs::create_directories(dir);
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw ResourceError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ResourceError("cannot rename into " + path + ": " + ec.message());
  }
}

std::vector<std::string> write_artifacts(const PipelineResult& r, const std::string& dir) {
  std::vector<std::string> written;
  const auto put = [&](const std::string& name, const std::string& contents) {
    const std::string path = (fs::path(dir) / name).string();
    write_atomic(path, contents);
    written.push_back(path);
  };
  put("hadamard.json", dump_json(hadamard_to_json(*r.hadamard)));
  put("epsh.json", dump_json(epsh_to_json(*r.y)));
  put("rbd.json", dump_json(rbd_to_json(*r.rbd)));
  put("bases.json", dump_json(basis_set_to_json(r.bases)));
  put("report.json", dump_json(report_to_json(r.report)));
  put("report.csv", report_to_csv(r.report));
  put("ledger.json", dump_json(ledger_to_json(r.ledger)));
  if (r.bases.d() <= 256) put("bases.csv", basis_set_to_csv(r.bases));
  put("certificate.json", dump_json(certificate_json(r)));
  return written;
}

EpsHadamard rebuild_from_provenance(const SignMatrix& h, const EpsHadamard& stored) {
  EpsHadamard e;
  if (stored.method == "direct") {
    e = direct_normalized(h);
  } else {
    BlockSplit split;
    split.source = std::make_shared<const SignMatrix>(normalize(verified(h)));
    split.t = stored.t;
    split.row_select = stored.row_select;
    split.col_select = stored.col_select;
    split.row_signs = stored.row_signs;
    split.col_signs = stored.col_signs;
    if (!stored.variant) throw ParseError("provenance lacks a variant");
    if (stored.method == "closed-form") {
      if (!stored.uclass) throw ParseError("closed-form provenance lacks a U class");
      e = closed_form(split, *stored.uclass, *stored.variant);
    } else if (stored.method == "schur") {
      e = schur_reduce(split, *stored.variant);
    } else {
      throw ParseError("unknown reduction method '" + stored.method + "'");
    }
  }
  e.source = stored.source;
  return e;
}

namespace {

// First top-level key whose value differs, for located failure messages.
std::string first_difference(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_object() && b.is_object()) {
    for (const auto& [key, value] : a.items()) {
      if (!b.contains(key)) return key + " (missing)";
      if (value != b.at(key)) return key;
    }
    for (const auto& [key, value] : b.items()) {
      if (!a.contains(key)) return key + " (unexpected)";
    }
  }
  if (a.is_array() && b.is_array()) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      if (a[i] != b[i]) return "[" + std::to_string(i) + "]";
    }
    if (a.size() != b.size()) return "length";
  }
  return "value";
}

}  // namespace

BundleVerification verify_bundle(const std::string& dir, int threads) {
  BundleVerification out;
  const auto path = [&](const std::string& name) { return (fs::path(dir) / name).string(); };
  const auto fail = [&](const std::string& what) {
    out.ok = false;
    out.failures.push_back(what);
  };

  const auto h = std::make_shared<const SignMatrix>(hadamard_from_json(load_json(path("hadamard.json"))));
  const nlohmann::json epsh_json = load_json(path("epsh.json"));
  const auto y = std::make_shared<const EpsHadamard>(epsh_from_json(epsh_json, false));
  const auto rbd = std::make_shared<const Rbd>(rbd_from_json(load_json(path("rbd.json"))));

  const int expected_order = y->t == 0 ? y->k : y->order4n;
  if (h->order() != expected_order) {
    fail("epsh.json: order " + std::to_string(expected_order) + " does not match hadamard.json order " +
         std::to_string(h->order()));
  } else {
    try {
      const EpsHadamard rebuilt = rebuild_from_provenance(*h, *y);
      if (!(rebuilt.y == y->y)) {
        for (int i = 0; i < y->k; ++i) {
          for (int j = 0; j < y->k; ++j) {
            if (!(rebuilt.y(i, j) == y->y(i, j))) {
              fail("epsh.json: entry (" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                   y->y(i, j).to_string() + " but the reduction of H gives " + rebuilt.y(i, j).to_string());
              i = y->k;
              break;
            }
          }
        }
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(std::string("epsh.json: provenance does not reproduce Y: ") + e.what());
    }
  }
  const auto orth = check_orthogonal(y->y);
  if (!orth.orthogonal) {
    fail("epsh.json: Y is not orthogonal: " + orth.detail);
    return out;
  }
  try {
    const Epsilon stored = epsilon_from_json(epsh_json.at("epsilon"), y->y.radicand());
    if (stored.k != y->epsilon.k || compare_epsilon(stored, y->epsilon) != 0) {
      fail("epsh.json: stored epsilon " + stored.expression() + " differs from recomputed " + y->epsilon.expression());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("epsh.json: ") + e.what());
  }
  if (rbd->k != y->k) {
    fail("rbd.json: block size " + std::to_string(rbd->k) + " differs from Y order " + std::to_string(y->k));
    return out;
  }

  BasisSet bs;
  try {
    bs = assemble(rbd, y);
  } catch (const std::exception& e) {
    fail(std::string("assemble: ") + e.what());
    return out;
  }

  SamplingMode mode;
  const bool have_report = fs::exists(path("report.json"));
  nlohmann::json stored_report;
  if (have_report) {
    stored_report = load_json(path("report.json"));
    try {
      mode = SamplingMode::parse(stored_report.at("mode").get<std::string>(), stored_report.at("seed").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("report.json: ") + e.what());
    }
  }
  out.report = cross_stats(bs, mode, threads);
  out.ledger = check_theorem_bounds(out.report, *y);

  if (out.report.beta_vs_bound > 0) fail("report: beta exceeds (1+eps)^2 sqrt(d)/k");
  if (have_report) {
    const auto fresh = report_to_json(out.report);
    if (fresh != stored_report) fail("report.json: field '" + first_difference(fresh, stored_report) + "' differs");
  }
  if (fs::exists(path("ledger.json"))) {
    const auto fresh = ledger_to_json(out.ledger);
    const auto stored = load_json(path("ledger.json"));
    if (fresh != stored) fail("ledger.json: entry " + first_difference(fresh, stored) + " differs");
  }
  if (fs::exists(path("certificate.json"))) {
    const auto stored = load_json(path("certificate.json"));
    PipelineResult r;
    try {
      const auto& c = stored.at("config");
      r.config.k = c.at("k").get<int>();
      r.config.s = c.at("s").get<int>();
      r.config.t = c.at("t").get<int>();
      r.config.d = c.at("d").get<int>();
      r.config.scope = parse_scope(c.at("scope").get<std::string>());
      r.config.search_cap = c.at("search_cap").get<long>();
      r.config.mode = SamplingMode::parse(c.at("mode").get<std::string>(), c.at("seed").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("certificate.json: ") + e.what());
    }
    r.hadamard = h;
    r.y = y;
    r.rbd = rbd;
    r.bases = bs;
    r.report = out.report;
    r.ledger = out.ledger;
    if (const auto note = fallback_note(r.config.k, r.config.t)) r.notes.push_back(*note);
    const auto fresh = certificate_json(r);
    if (fresh != stored) fail("certificate.json: field '" + first_difference(fresh, stored) + "' differs");
  }
  return out;
}

}  // namespace armub
