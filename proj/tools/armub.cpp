#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "armub/pipeline.hpp"

namespace {

using namespace armub;

void print_ledger(const std::vector<LedgerLine>& ledger) {
  for (const auto& l : ledger) {
    std::cout << "  [" << to_string(l.verdict) << "] " << l.check;
    if (!l.lhs.empty()) std::cout << ": " << l.lhs;
    if (!l.rhs.empty()) std::cout << " vs " << l.rhs;
    if (!l.note.empty()) std::cout << " (" << l.note << ")";
    std::cout << "\n";
  }
}

void print_report(const UnbiasednessReport& r) {
  std::cout << "d=" << r.d << " bases=" << r.s << " k=" << r.k << " t=" << r.t << "\n";
  std::cout << "epsilon = " << r.epsilon.expression() << " = " << r.epsilon.decimal() << "\n";
  std::cout << "beta = " << r.beta().to_string() << " = " << scaled_root_to_decimal(r.d, r.max_inner, 1, Rational(0))
            << " (bound " << r.bound_float() << ")\n";
  std::cout << "delta:";
  for (const auto& v : r.delta) std::cout << " " << v.value.to_string() << " x" << v.count;
  std::cout << "\n";
  std::cout << "pairs checked: " << r.pairs_checked << " (" << r.mode << ", seed " << r.seed << ")\n";
  std::cout << "classification: " << to_string(r.classification)
            << (r.classification_lower_bound ? " (sampled, lower bound)" : "") << "\n";
}

void emit(const std::string& out, const nlohmann::json& j) {
  if (out.empty() || out == "-") {
    std::cout << dump_json(j);
  } else {
    write_atomic(out, dump_json(j));
    std::cerr << "wrote " << out << "\n";
  }
}

int cmd_hadamard(int order, const std::string& out) {
  const auto recipe = hadamard_recipe(order);
  const SignMatrix h = find_hadamard(order);
  std::string text;
  for (const auto& f : recipe) text += (text.empty() ? "" : " x ") + f.describe();
  std::cerr << "order " << order << ": " << text << "\n";
  emit(out, hadamard_to_json(h));
  return kExitOk;
}

int cmd_epsh(int order, int t, Scope scope, long cap, int threads, const std::string& out) {
  const SignMatrix h = find_hadamard(order);
  SearchOptions opt{scope, cap, threads};
  EpsHadamard e;
  int code = kExitOk;
  try {
    e = best_reduction(h, t, opt);
  } catch (const SearchCapExceeded& ex) {
    std::cerr << "warning: " << ex.what() << "; reporting the best split examined\n";
    e = ex.partial();
    code = kExitResource;
  }
  std::cout << "k=" << e.k << " 4n=" << e.order4n << " t=" << e.t << " epsilon=" << e.epsilon.expression() << " = "
            << e.epsilon.decimal() << " variant=" << (e.variant ? to_string(*e.variant) : "-")
            << " method=" << e.method << " u_class=" << (e.uclass ? e.uclass->family : "unclassified") << "\n";
  if (!out.empty()) emit(out, epsh_to_json(e));
  return code;
}

int cmd_rbd(int k, int s, const std::string& out) {
  const Rbd r = build_affine_rbd(k, s);
  const auto cert = verify_rbd(r, true);
  std::cerr << "d=" << r.d << " k=" << r.k << " classes=" << r.classes.size() << " mu=" << cert.mu
            << " intersecting block pairs=" << cert.intersecting_block_pairs << "\n";
  emit(out, rbd_to_json(r));
  return cert.valid ? kExitOk : kExitCheckFailed;
}

int cmd_armub(PipelineConfig config, const std::string& out) {
  const PipelineResult r = run_pipeline(config);
  for (const auto& n : r.notes) std::cout << "note: " << n << "\n";
  print_report(r.report);
  print_ledger(r.ledger);
  const auto files = write_artifacts(r, out);
  std::cout << "wrote " << files.size() << " files to " << out << "\n";
  return r.report.beta_vs_bound <= 0 ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const std::string& dir, int threads) {
  const auto v = verify_bundle(dir, threads);
  print_report(v.report);
  print_ledger(v.ledger);
  for (const auto& f : v.failures) std::cout << "FAIL " << f << "\n";
  std::cout << (v.ok ? "verified" : "verification failed") << "\n";
  return v.ok ? kExitOk : kExitCheckFailed;
}

int cmd_ledger(const std::string& dir, int threads) {
  const auto v = verify_bundle(dir, threads);
  print_ledger(v.ledger);
  for (const auto& f : v.failures) std::cout << "FAIL " << f << "\n";
  const bool ok = v.ok && ledger_passes(v.ledger);
  const std::string out = (std::filesystem::path(dir) / "ledger.json").string();
  if (!std::filesystem::exists(out)) write_atomic(out, dump_json(ledger_to_json(v.ledger)));
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate real mutually unbiased bases: construction and exact verification"};
  app.require_subcommand(1);

  int order = 0, t = 1, k = 0, s = 0, d = 0, threads = 1;
  long cap = 100000;
  std::string scope_text = "corner-only", mode_text = "exhaustive", out, out_dir = "armub_out";
  std::uint64_t seed = 0;

  auto* had = app.add_subcommand("hadamard", "Build a verified Hadamard matrix");
  had->add_option("order,--order", order, "Matrix order")->required();
  had->add_option("--out", out, "Output JSON file (stdout if omitted)");

  auto* eps = app.add_subcommand("epsh", "Reduce H_4n to an epsilon-Hadamard matrix of order 4n - t");
  eps->add_option("order,--order", order, "Hadamard order 4n")->required();
  eps->add_option("t,--t", t, "Reduction size")->check(CLI::Range(1, 3));
  eps->add_option("--scope", scope_text, "corner-only | row-col-permutations | permutations-and-negations");
  eps->add_option("--cap", cap, "Maximum number of splits examined");
  eps->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  eps->add_option("--out", out, "Output JSON file");

  auto* rbd = app.add_subcommand("rbd", "Build the affine resolvable design on k*s points");
  rbd->add_option("--k", k, "Block size")->required();
  rbd->add_option("--s", s, "Odd prime power")->required();
  rbd->add_option("--out", out, "Output JSON file (stdout if omitted)");

  auto* arm = app.add_subcommand("armub", "Run the full construction and certify it");
  arm->add_option("--d", d, "Target dimension (split into k*s)");
  arm->add_option("--k", k, "Block size 4n - t");
  arm->add_option("--s", s, "Odd prime power, number of bases");
  arm->add_option("--t", t, "Reduction size (0 for a Hadamard order k)")->check(CLI::Range(0, 3));
  arm->add_option("--scope", scope_text, "Split search scope");
  arm->add_option("--cap", cap, "Maximum number of splits examined");
  arm->add_option("--mode", mode_text, "exhaustive | sampled:<pairs>");
  arm->add_option("--seed", seed, "Seed for sampled mode");
  arm->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  arm->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "Re-certify a bundle of artifacts");
  ver->add_option("dir,--out", out, "Bundle directory")->required();
  ver->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* led = app.add_subcommand("ledger", "Evaluate the bound ledger of a bundle");
  led->add_option("dir,--out", out, "Bundle directory")->required();
  led->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*had) return cmd_hadamard(order, out);
    if (*eps) return cmd_epsh(order, t, parse_scope(scope_text), cap, threads, out);
    if (*rbd) return cmd_rbd(k, s, out);
    if (*arm) {
      PipelineConfig config;
      if (d > 0) config.d = d;
      config.k = k;
      config.s = s;
      config.t = t;
      config.scope = parse_scope(scope_text);
      config.search_cap = cap;
      config.mode = SamplingMode::parse(mode_text, seed);
      config.threads = threads;
      return cmd_armub(config, out_dir);
    }
    if (*ver) return cmd_verify(out, threads);
    if (*led) return cmd_ledger(out, threads);
  } catch (const NotConstructibleError& e) {
    std::cerr << "error: " << e.what() << "\n  attempted orders:";
    for (int o : e.attempted()) std::cerr << " " << o;
    std::cerr << "\n";
    return kExitNotConstructible;
  } catch (const StageError& e) {
    std::cerr << "error [stage " << to_string(e.stage()) << "]: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(std::current_exception());
  }
  return kExitUsage;
}
