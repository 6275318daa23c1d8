// Report documents for the command-line driver.  Every command produces one
// JSON document with a stable schema: top-level keys "command", "config",
// "exit", "result", and "timings_ms"; keys are emitted in sorted order, so
// equal documents render to equal bytes.  Timing data lives only under
// "timings_ms" and is stripped by stable_view for reproducibility checks.
#pragma once

#include "strata/instance.hpp"
#include "strata/systems.hpp"
#include "strata/transfer.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace strata {

using Json = nlohmann::json;

// ---- shared building blocks ------------------------------------------------
std::string dims_string(const std::vector<std::size_t>& dims);  // "(1,0,1)"
Json dims_json(const std::vector<std::size_t>& dims);
Json dims_list_json(const std::vector<Module>& mods);
Json sequence_json(const ShortExactSequence& s);
Json certificate_json(const FiltrationCertificate& c);
Json membership_json(const MembershipResult& r);
Json axiom_json(const AxiomResult& a);
Json system_verdict_json(const SystemVerdict& v);
Json construction_json(const ConstructionResult& r);
Json ss_report_json(const StandardlyStratifiedReport& r);
Json existence_json(const TransferExistence& e);
Json tilting_json(const TiltingReport& t);
Json quiver_json(const Quiver& q);

// ---- document assembly and rendering ----------------------------------------
Json make_report(const std::string& command, const Json& config,
                 const Json& result, int exit_code);

// JSON with sorted keys and two-space indentation, newline-terminated.
std::string render_structured(const Json& report);
// Per-command text summary with dimension-vector strings; no timing data.
std::string render_human(const Json& report);
// Dispatches on "human" | "structured"; anything else is an InputError.
std::string render_report(const Json& report, const std::string& format);

// The document with every "timings_ms" key (also in nested example steps)
// removed; equal configurations yield byte-equal stable views.
Json stable_view(Json report);

}  // namespace strata
