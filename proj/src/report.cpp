#include "strata/report.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace strata {
namespace {

std::vector<std::size_t> jdims(const Json& arr) {
  std::vector<std::size_t> out;
  for (const auto& v : arr) out.push_back(v.get<std::size_t>());
  return out;
}

std::string jdims_string(const Json& arr) { return dims_string(jdims(arr)); }

std::string join_dims_list(const Json& list, const std::string& sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += sep;
    out += jdims_string(list[i]);
  }
  return out;
}

std::string sequence_string(const Json& seq) {
  return jdims_string(seq["sub"]) + " >-> " + jdims_string(seq["middle"]) +
         " ->> " + jdims_string(seq["quotient"]);
}

std::string certificate_string(const Json& cert) {
  std::string out = "factors";
  for (const auto& f : cert["factors"]) out += " " + f.dump();
  out += cert["ordered"].get<bool>() ? " (ordered)" : " (unordered)";
  return out;
}

std::string membership_string(const Json& m) {
  std::string out = m["status"].get<std::string>();
  if (!m["certificate"].is_null())
    out += "; certificate " + certificate_string(m["certificate"]);
  const auto note = m["note"].get<std::string>();
  if (!note.empty()) out += "; " + note;
  return out;
}

void render_system(std::ostringstream& out, const Json& v) {
  out << "system: " << v["kind"].get<std::string>() << "\n";
  out << "axioms:\n";
  for (const auto& a : v["axioms"]) {
    out << "  [" << a["verdict"].get<std::string>() << "] "
        << a["axiom"].get<std::string>();
    const auto detail = a["detail"].get<std::string>();
    if (!detail.empty()) out << " -- " << detail;
    out << "\n";
    if (!a["pair"].is_null())
      out << "        pair: (" << a["pair"][0].get<std::size_t>() << ", "
          << a["pair"][1].get<std::size_t>() << ")\n";
    if (!a["sequence"].is_null())
      out << "        sequence: " << sequence_string(a["sequence"]) << "\n";
    if (!a["certificate"].is_null())
      out << "        certificate: " << certificate_string(a["certificate"]) << "\n";
  }
  out << "verdict: " << v["verdict"].get<std::string>()
      << (v["passed"].get<bool>() ? " (passed)" : " (not passed)") << "\n";
}

void render_families(std::ostringstream& out, const Json& result,
                     const char* key, const std::string& display) {
  if (!result.contains(key)) return;
  const Json& fam = result[key];
  for (std::size_t i = 0; i < fam.size(); ++i)
    out << display << "(" << i << ") dims " << jdims_string(fam[i]) << "\n";
}

void render_algebra_header(std::ostringstream& out, const Json& result) {
  if (result.contains("algebra"))
    out << "algebra: " << result["algebra"].get<std::string>() << ", dim "
        << result["algebra_dim"].get<std::size_t>() << "\n";
  if (result.contains("presentation_quiver") && !result["presentation_quiver"].is_null()) {
    out << "presentation quiver:";
    if (result["presentation_quiver"].empty()) out << " (no arrows)";
    for (const auto& a : result["presentation_quiver"])
      out << " " << a["label"].get<std::string>() << ": "
          << a["src"].get<std::size_t>() << " -> " << a["tgt"].get<std::size_t>()
          << ";";
    out << "\n";
  }
  if (result.contains("order_used"))
    out << "order used: " << jdims_string(result["order_used"]) << "\n";
}

void render_existence(std::ostringstream& out, const Json& r,
                      const std::string& display) {
  render_algebra_header(out, r);
  out << "exists: " << (r["exists"].get<bool>() ? "yes" : "no") << "\n";
  render_families(out, r, "family", display);
  const auto failing = r["failing_condition"].get<std::string>();
  if (!failing.empty()) out << "failing condition: " << failing << "\n";
  if (!r["closure"].is_null()) {
    out << "closing re-verification:\n";
    render_system(out, r["closure"]);
  }
  out << "verdict: " << r["verdict"].get<std::string>() << "\n";
}

void render_body(std::ostringstream& out, const Json& report);

void render_example(std::ostringstream& out, const Json& result) {
  out << "example: " << result["example"].get<std::string>() << "\n";
  for (const auto& step : result["steps"]) {
    out << "\n--- step: " << step["command"].get<std::string>() << " ---\n";
    render_body(out, step);
    out << "step exit: " << step["exit"].get<int>() << "\n";
  }
}

void render_body(std::ostringstream& out, const Json& report) {
  const std::string command = report["command"].get<std::string>();
  const Json& result = report["result"];
  if (command == "verify-ppcs" || command == "verify-pcs" || command == "verify-ess") {
    render_system(out, result);
  } else if (command == "construct-q") {
    out << "constructed: " << (result["constructed"].get<bool>() ? "yes" : "no") << "\n";
    render_families(out, result, "q", "Q");
    for (const auto& tr : result["traces"]) {
      out << "trace[" << tr["index"].get<std::size_t>() << "]: "
          << tr["steps"].size() << " extension step(s)";
      if (!tr["presentation"].is_null())
        out << "; presentation " << sequence_string(tr["presentation"]);
      if (!tr["kernel_certificate"].is_null())
        out << "; kernel certificate " << certificate_string(tr["kernel_certificate"]);
      out << "\n";
      for (const auto& st : tr["steps"])
        out << "  step: extend by index " << st["base_index"].get<std::size_t>()
            << ", middle dims " << jdims_string(st["middle"])
            << ", indecomposable: " << st["indecomposable"].get<std::string>() << "\n";
    }
    if (!result["divergence"].is_null()) {
      out << "divergence at index " << result["divergence"]["index"].get<std::size_t>()
          << ", chain dims: " << join_dims_list(result["divergence"]["dims"], " ") << "\n";
    }
    if (!result["closure"].is_null()) {
      out << "closing re-verification:\n";
      render_system(out, result["closure"]);
    }
    const auto note = result["note"].get<std::string>();
    if (!note.empty()) out << "note: " << note << "\n";
    out << "verdict: " << result["verdict"].get<std::string>() << "\n";
  } else if (command == "strat-modules") {
    render_algebra_header(out, result);
    render_families(out, result, "delta", "Delta");
    render_families(out, result, "delta_bar", "DeltaBar");
    render_families(out, result, "nabla_bar", "NablaBar");
  } else if (command == "check-ss") {
    render_algebra_header(out, result);
    render_families(out, result, "delta", "Delta");
    for (std::size_t i = 0; i < result["projectives"].size(); ++i)
      out << "P(" << i << "): " << membership_string(result["projectives"][i]) << "\n";
    out << "verdict: " << result["verdict"].get<std::string>() << "\n";
  } else if (command == "ess-from-pcs") {
    render_existence(out, result, "Theta");
  } else if (command == "pcs-from-ess") {
    if (result.contains("given_ess") && !result["given_ess"].is_null()) {
      out << "given exact system re-verification:\n";
      render_system(out, result["given_ess"]);
    }
    render_existence(out, result, "Psi");
  } else if (command == "char-tilting") {
    render_algebra_header(out, result);
    out << "characteristic tilting: " << (result["value"].get<bool>() ? "true" : "false")
        << "\n";
    out << "sum filtered by the standard modules: "
        << membership_string(result["membership"]) << "\n";
    out << "ext dims (standard vs sum):";
    for (const auto& d : result["ext_dims"]) out << " " << d.get<std::size_t>();
    out << "\n";
    out << "indecomposable summands: " << result["summand_count"].get<std::size_t>() << "\n";
    const auto failing = result["failing_conjunct"].get<std::string>();
    if (!failing.empty()) out << "failing conjunct: " << failing << "\n";
    out << "verdict: " << result["verdict"].get<std::string>() << "\n";
  } else if (command == "example") {
    render_example(out, result);
  } else {
    out << result.dump(2) << "\n";
  }
}

}  // namespace

std::string dims_string(const std::vector<std::size_t>& dims) {
  std::string out = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(dims[i]);
  }
  return out + ")";
}

Json dims_json(const std::vector<std::size_t>& dims) {
  Json arr = Json::array();
  for (std::size_t d : dims) arr.push_back(d);
  return arr;
}

Json dims_list_json(const std::vector<Module>& mods) {
  Json arr = Json::array();
  for (const auto& m : mods) arr.push_back(dims_json(m.dims));
  return arr;
}

Json sequence_json(const ShortExactSequence& s) {
  return Json{{"sub", dims_json(s.inj.src.dims)},
              {"middle", dims_json(s.inj.tgt.dims)},
              {"quotient", dims_json(s.surj.tgt.dims)}};
}

Json certificate_json(const FiltrationCertificate& c) {
  Json factors = Json::array();
  for (const auto& f : c.factors) factors.push_back(f.family_index);
  return Json{{"factors", factors}, {"length", c.length()}, {"ordered", c.ordered}};
}

Json membership_json(const MembershipResult& r) {
  return Json{{"status", membership_status_string(r.status)},
              {"certificate",
               r.certificate ? certificate_json(*r.certificate) : Json(nullptr)},
              {"note", r.note}};
}

Json axiom_json(const AxiomResult& a) {
  Json pair(nullptr);
  if (a.pair) pair = Json::array({a.pair->first, a.pair->second});
  return Json{{"axiom", a.axiom},
              {"verdict", verdict_string(a.verdict)},
              {"detail", a.detail},
              {"pair", pair},
              {"sequence", a.sequence ? sequence_json(*a.sequence) : Json(nullptr)},
              {"certificate",
               a.certificate ? certificate_json(*a.certificate) : Json(nullptr)},
              {"certificate_family", dims_json(a.certificate_family)}};
}

Json system_verdict_json(const SystemVerdict& v) {
  Json axioms = Json::array();
  for (const auto& a : v.axioms) axioms.push_back(axiom_json(a));
  return Json{{"kind", v.kind},
              {"passed", v.passed},
              {"verdict", verdict_string(v.verdict)},
              {"axioms", axioms}};
}

Json construction_json(const ConstructionResult& r) {
  Json traces = Json::array();
  for (const auto& tr : r.traces) {
    Json steps = Json::array();
    for (const auto& st : tr.steps)
      steps.push_back(Json{{"base_index", st.base_index},
                           {"sequence", sequence_json(st.sequence)},
                           {"middle", dims_json(st.middle.dims)},
                           {"indecomposable", verdict_string(st.indecomposable)}});
    traces.push_back(
        Json{{"index", tr.index},
             {"steps", steps},
             {"presentation",
              tr.presentation ? sequence_json(*tr.presentation) : Json(nullptr)},
             {"kernel_certificate", tr.kernel_certificate
                                        ? certificate_json(*tr.kernel_certificate)
                                        : Json(nullptr)},
             {"kernel_family", dims_json(tr.kernel_family)}});
  }
  Json divergence(nullptr);
  if (r.divergent_index) {
    Json chain = Json::array();
    for (const auto& d : r.divergence_dims) chain.push_back(dims_json(d));
    divergence = Json{{"index", *r.divergent_index}, {"dims", chain}};
  }
  return Json{{"constructed", r.constructed},
              {"verdict", verdict_string(r.verdict)},
              {"q", dims_list_json(r.q)},
              {"traces", traces},
              {"closure", r.closure ? system_verdict_json(*r.closure) : Json(nullptr)},
              {"note", r.note},
              {"divergence", divergence}};
}

Json ss_report_json(const StandardlyStratifiedReport& r) {
  Json projectives = Json::array();
  for (const auto& m : r.projectives) projectives.push_back(membership_json(m));
  return Json{{"verdict", verdict_string(r.verdict)},
              {"delta", dims_list_json(r.families.delta)},
              {"delta_bar", dims_list_json(r.families.delta_bar)},
              {"nabla_bar", dims_list_json(r.families.nabla_bar)},
              {"projectives", projectives}};
}

Json existence_json(const TransferExistence& e) {
  return Json{{"verdict", verdict_string(e.verdict)},
              {"exists", e.exists},
              {"failing_condition", e.failing_condition},
              {"family", dims_list_json(e.family)},
              {"closure", e.closure ? system_verdict_json(*e.closure) : Json(nullptr)},
              {"stratified", e.stratified ? ss_report_json(*e.stratified) : Json(nullptr)}};
}

Json tilting_json(const TiltingReport& t) {
  return Json{{"verdict", verdict_string(t.verdict)},
              {"value", t.value},
              {"failing_conjunct", t.failing_conjunct},
              {"prerequisite", ss_report_json(t.prerequisite)},
              {"membership", membership_json(t.membership)},
              {"ext_dims", dims_json(t.ext_dims)},
              {"summand_count", t.summand_count}};
}

Json quiver_json(const Quiver& q) {
  Json arr = Json::array();
  for (const auto& a : q.arrows)
    arr.push_back(Json{{"label", a.label}, {"src", a.src}, {"tgt", a.tgt}});
  return arr;
}

Json make_report(const std::string& command, const Json& config,
                 const Json& result, int exit_code) {
  return Json{{"command", command},
              {"config", config},
              {"result", result},
              {"exit", exit_code},
              {"timings_ms", Json{{"total_ms", 0.0}}}};
}

std::string render_structured(const Json& report) { return report.dump(2) + "\n"; }

std::string render_human(const Json& report) {
  std::ostringstream out;
  out << "command: " << report["command"].get<std::string>() << "\n";
  const Json& cfg = report["config"];
  out << "instance: " << cfg["instance"].get<std::string>() << "\n";
  out << "config: field " << cfg["field"].get<std::string>();
  if (!cfg["order"].is_null()) {
    out << ", order";
    for (const auto& i : cfg["order"]) out << " " << i.get<std::size_t>();
  }
  out << ", budget " << cfg["budget"].get<std::uint64_t>() << ", cap "
      << cfg["cap"].get<std::size_t>() << ", seed " << cfg["seed"].get<std::uint64_t>()
      << "\n";
  render_body(out, report);
  out << "exit: " << report["exit"].get<int>() << "\n";
  return out.str();
}

std::string render_report(const Json& report, const std::string& format) {
  if (format == "structured") return render_structured(report);
  if (format == "human") return render_human(report);
  throw InputError("format must be 'human' or 'structured', got '" + format + "'");
}

Json stable_view(Json report) {
  if (report.is_object()) {
    report.erase("timings_ms");
    for (auto& [key, value] : report.items()) value = stable_view(value);
  } else if (report.is_array()) {
    for (auto& value : report) value = stable_view(value);
  }
  return report;
}

}  // namespace strata
