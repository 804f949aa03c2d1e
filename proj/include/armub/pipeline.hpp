#pragma once

#include <exception>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "armub/armub.hpp"
#include "armub/verify.hpp"

namespace armub {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitDomain = 3,
  kExitNotConstructible = 4,
  kExitResource = 5,
  kExitInternal = 6,
};

enum class Stage { Hadamard = 1, Epsh = 2, Rbd = 3, Assemble = 4, Verify = 5 };
std::string to_string(Stage s);

/// Error raised inside the armub pipeline, tagged with the failing stage.
class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& what, int cause)
      : std::runtime_error(what), stage_(stage), cause_(cause) {}
  Stage stage() const { return stage_; }
  /// Exit code of the underlying error.
  int cause() const { return cause_; }
  /// 10 + stage number.
  int exit_code() const { return 10 + static_cast<int>(stage_); }

 private:
  Stage stage_;
  int cause_;
};

/// Maps the exception currently in flight to an exit code.
int exit_code_for(const std::exception_ptr& e);

struct PipelineConfig {
  std::optional<int> d;  // resolved into (k, s) when k and s are not given
  int k = 0;
  int s = 0;
  int t = 1;
  Scope scope = Scope::CornerOnly;
  long search_cap = 100000;
  SamplingMode mode;
  int threads = 1;

  int order4n() const { return k + t; }
  /// Fills k and s from d if needed and checks k = 4n - t, s an odd prime
  /// power, 1 <= k <= s. Throws DomainError before any work is done.
  void validate();
};

/// Picks (k, s) with d = k s, s an odd prime power, k <= s and 4 | k + t,
/// preferring k closest to sqrt(d). Throws DomainError if none exists.
std::pair<int, int> split_dimension(int d, int t);

struct PipelineResult {
  PipelineConfig config;
  std::shared_ptr<const SignMatrix> hadamard;
  std::shared_ptr<const EpsHadamard> y;
  std::shared_ptr<const Rbd> rbd;
  BasisSet bases;
  UnbiasednessReport report;
  std::vector<LedgerLine> ledger;
  std::vector<std::string> notes;
};

/// hadamard -> epsh -> rbd -> assemble -> cross_stats -> ledger. When t is
/// not admissible for 4n (t^2 >= 4n) and k is itself a Hadamard order, Y is
/// H_k / sqrt(k) with t = 0 and a note records the substitution.
PipelineResult run_pipeline(PipelineConfig config);

nlohmann::json certificate_json(const PipelineResult& r);

/// Serialized form used for every artifact: two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);
/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::string& path, const std::string& contents);

/// Writes hadamard.json, epsh.json, rbd.json, bases.json, report.json,
/// ledger.json and certificate.json (plus CSVs for d <= 256) into dir.
std::vector<std::string> write_artifacts(const PipelineResult& r, const std::string& dir);

struct BundleVerification {
  bool ok = true;
  std::vector<std::string> failures;
  UnbiasednessReport report;
  std::vector<LedgerLine> ledger;
};

/// Re-runs every certification on a bundle directory. Required files are
/// hadamard.json, epsh.json and rbd.json; report.json, ledger.json and
/// certificate.json are compared with their recomputed forms when present.
/// Throws ParseError on malformed files.
BundleVerification verify_bundle(const std::string& dir, int threads = 1);

/// Rebuilds Y from H and the stored provenance.
EpsHadamard rebuild_from_provenance(const SignMatrix& h, const EpsHadamard& stored);

}  // namespace armub
