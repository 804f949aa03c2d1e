#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "armub/error.hpp"
#include "armub/pipeline.hpp"

namespace py = pybind11;
using namespace armub;

namespace {

std::string hadamard_json(int order) { return dump_json(hadamard_to_json(find_hadamard(order))); }

std::string epsh_json(int order, int t, const std::string& scope, long cap, int threads) {
  const SignMatrix h = find_hadamard(order);
  const EpsHadamard e = t == 0 ? direct_normalized(h) : best_reduction(h, t, {parse_scope(scope), cap, threads});
  return dump_json(epsh_to_json(e));
}

std::string rbd_json(int k, int s) { return dump_json(rbd_to_json(build_affine_rbd(k, s))); }

std::string armub_json(int k, int s, int t, const std::string& scope, long cap, const std::string& mode,
                       std::uint64_t seed, int threads, const std::optional<std::string>& out) {
  PipelineConfig c;
  c.k = k;
  c.s = s;
  c.t = t;
  c.scope = parse_scope(scope);
  c.search_cap = cap;
  c.mode = SamplingMode::parse(mode, seed);
  c.threads = threads;
  PipelineResult r;
  {
    py::gil_scoped_release release;
    r = run_pipeline(c);
  }
  if (out) write_artifacts(r, *out);
  return dump_json(certificate_json(r));
}

py::dict verify_dir(const std::string& dir, int threads) {
  BundleVerification v;
  {
    py::gil_scoped_release release;
    v = verify_bundle(dir, threads);
  }
  py::dict out;
  out["ok"] = v.ok;
  out["failures"] = v.failures;
  out["report"] = dump_json(report_to_json(v.report));
  out["ledger"] = dump_json(ledger_to_json(v.ledger));
  return out;
}

}  // namespace

PYBIND11_MODULE(_armub, m) {
  m.doc() = "Exact constructions of approximate real mutually unbiased bases";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NotConstructibleError>(m, "NotConstructibleError", PyExc_LookupError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);
  py::register_exception<ArithmeticError>(m, "ExactArithmeticError", PyExc_ArithmeticError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("hadamard_json", &hadamard_json, py::arg("order"));
  m.def("epsh_json", &epsh_json, py::arg("order"), py::arg("t"), py::arg("scope") = "corner-only",
        py::arg("cap") = 100000, py::arg("threads") = 1);
  m.def("rbd_json", &rbd_json, py::arg("k"), py::arg("s"));
  m.def("armub_json", &armub_json, py::arg("k"), py::arg("s"), py::arg("t") = 1, py::arg("scope") = "corner-only",
        py::arg("cap") = 100000, py::arg("mode") = "exhaustive", py::arg("seed") = 0, py::arg("threads") = 1,
        py::arg("out") = std::nullopt);
  m.def("verify", &verify_dir, py::arg("dir"), py::arg("threads") = 1);
  m.def("split_dimension", &split_dimension, py::arg("d"), py::arg("t") = 1);
}
