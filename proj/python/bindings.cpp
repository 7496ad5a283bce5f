#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mihkit/chain/ledger.hpp"
#include "mihkit/chain/synth.hpp"
#include "mihkit/cli/app.hpp"
#include "mihkit/clustering/cluster_set.hpp"
#include "mihkit/clustering/clustering.hpp"
#include "mihkit/coinjoin/detect.hpp"
#include "mihkit/coinjoin/scan.hpp"
#include "mihkit/error.hpp"
#include "mihkit/evidence/audit.hpp"
#include "mihkit/evidence/canonical.hpp"
#include "mihkit/evidence/clock.hpp"
#include "mihkit/evidence/signing.hpp"
#include "mihkit/sharing/jsonld.hpp"
#include "mihkit/version.hpp"

namespace py = pybind11;
using namespace mihkit;

namespace {

using IoList = std::vector<std::pair<std::string, chain::Amount>>;

chain::Transaction make_tx(const IoList& inputs, const IoList& outputs) {
    chain::Transaction tx;
    tx.txid = std::string(64, '0');
    for (const auto& [a, v] : inputs) tx.inputs.push_back({chain::Address(a), v});
    for (const auto& [a, v] : outputs) tx.outputs.push_back({chain::Address(a), v});
    return tx;
}

coinjoin::HeuristicConfig heuristic(const std::string& kind, chain::Amount min_base_fee, std::uint64_t num,
                                    std::uint64_t den, std::uint64_t max_steps) {
    coinjoin::HeuristicConfig c;
    if (kind == "full") c.kind = coinjoin::HeuristicKind::Full;
    else if (kind != "structural") throw InputError("heuristic must be 'structural' or 'full'");
    c.full = {min_base_fee, num, den, max_steps};
    coinjoin::validate(c.full);
    return c;
}

std::unique_ptr<evidence::Clock> make_clock(const std::optional<std::string>& clock) {
    if (clock) return std::make_unique<evidence::FixedClock>(evidence::parse_rfc3339(*clock));
    return std::make_unique<evidence::SystemClock>();
}

}  // namespace

PYBIND11_MODULE(_mihkit, m) {
    m.doc() = "Address clustering, CoinJoin detection and evidence sharing";
    m.attr("__version__") = std::string(kToolVersion);

    auto base = py::register_exception<Error>(m, "Error");
    auto input = py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", input.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<IntegrityError>(m, "IntegrityError", base.ptr());

    py::class_<chain::Ledger>(m, "Ledger")
        .def_static("from_text", [](const std::string& text) { return chain::parse_ledger(std::string_view(text)); })
        .def("to_text", &chain::serialize_ledger)
        .def_property_readonly("n_blocks", [](const chain::Ledger& l) { return l.blocks().size(); })
        .def_property_readonly("n_transactions", [](const chain::Ledger& l) { return l.transactions().size(); })
        .def_property_readonly("tip_hash", [](const chain::Ledger& l) { return l.tip().block_hash; })
        .def("__eq__", [](const chain::Ledger& a, const chain::Ledger& b) { return a == b; });

    m.def(
        "generate_synthetic",
        [](const std::string& spec_json) {
            auto r = chain::generate_synthetic(chain::synth_spec_from_json(evidence::Document::parse(spec_json)));
            return py::make_tuple(std::move(r.ledger), chain::ground_truth_to_json(r.truth).dump(), r.planted_txids);
        },
        py::arg("spec_json"), "Returns (ledger, ground_truth_json, planted_txids).");

    py::class_<clustering::ClusterSet>(m, "ClusterSet")
        .def_static("from_text", [](const std::string& t) { return clustering::import_cluster_set(t); })
        .def("to_text", &clustering::export_cluster_set)
        .def("__len__", &clustering::ClusterSet::size)
        .def_property_readonly("address_count", &clustering::ClusterSet::address_count)
        .def("find",
             [](const clustering::ClusterSet& s, const std::string& a) -> std::optional<std::string> {
                 auto id = s.find(chain::Address(a));
                 if (!id) return std::nullopt;
                 return id->str();
             })
        .def("partition",
             [](const clustering::ClusterSet& s) {
                 std::vector<std::vector<std::string>> out;
                 for (const auto& [id, c] : s.clusters()) {
                     auto& v = out.emplace_back();
                     for (const auto& a : c.addresses) v.push_back(a.str());
                 }
                 return out;
             })
        .def("evaluate", [](const clustering::ClusterSet& s, const std::string& truth_json) {
            auto m = clustering::evaluate(s, chain::ground_truth_from_json(evidence::Document::parse(truth_json)));
            return py::dict(py::arg("pairwise_precision") = m.pairwise_precision,
                            py::arg("pairwise_recall") = m.pairwise_recall,
                            py::arg("linked_fraction") = m.linked_fraction);
        });

    m.def(
        "cluster",
        [](const chain::Ledger& ledger, const std::string& policy, const std::string& kind, chain::Amount min_base_fee,
           std::uint64_t num, std::uint64_t den, std::uint64_t max_steps, const std::string& currency,
           const std::optional<std::string>& clock) {
            const auto h = heuristic(kind, min_base_fee, num, den, max_steps);
            clustering::CoinJoinPolicy p;
            if (policy == "exclude") p = clustering::CoinJoinPolicy::exclude(h);
            else if (policy == "mark") p = clustering::CoinJoinPolicy::mark(h);
            else if (policy != "naive") throw InputError("policy must be naive, exclude or mark");
            const auto c = make_clock(clock);
            return clustering::cluster_multi_input(ledger, p, {currency, c.get()});
        },
        py::arg("ledger"), py::arg("policy") = "naive", py::arg("heuristic") = "structural",
        py::arg("min_base_fee") = 0, py::arg("fee_numerator") = 0, py::arg("fee_denominator") = 1,
        py::arg("max_steps") = coinjoin::FullParams{}.max_search_steps, py::arg("currency") = "BTC",
        py::arg("clock") = py::none());

    m.def(
        "scan",
        [](const chain::Ledger& ledger, const std::string& kind, chain::Amount min_base_fee, std::uint64_t num,
           std::uint64_t den, std::uint64_t max_steps, const std::string& currency,
           const std::optional<std::string>& clock) {
            const auto c = make_clock(clock);
            return coinjoin::to_json(
                       coinjoin::scan_ledger(ledger, heuristic(kind, min_base_fee, num, den, max_steps), currency, *c))
                .dump();
        },
        py::arg("ledger"), py::arg("heuristic") = "structural", py::arg("min_base_fee") = 0,
        py::arg("fee_numerator") = 0, py::arg("fee_denominator") = 1,
        py::arg("max_steps") = coinjoin::FullParams{}.max_search_steps, py::arg("currency") = "BTC",
        py::arg("clock") = py::none(), "Returns the scan result as JSON text.");

    m.def(
        "cluster_hash",
        [](const std::vector<std::string>& addrs) {
            std::vector<chain::Address> v(addrs.begin(), addrs.end());
            return clustering::cluster_hash(v);
        },
        py::arg("addresses"));

    m.def(
        "detect_structural",
        [](const IoList& in, const IoList& out) { return coinjoin::detect_structural(make_tx(in, out)); },
        py::arg("inputs"), py::arg("outputs"), "inputs/outputs are lists of (address, value).");
    m.def(
        "detect_full",
        [](const IoList& in, const IoList& out, chain::Amount min_base_fee, std::uint64_t num, std::uint64_t den,
           std::uint64_t max_steps) {
            return std::string(coinjoin::to_string(
                coinjoin::detect_full(make_tx(in, out), {min_base_fee, num, den, max_steps})));
        },
        py::arg("inputs"), py::arg("outputs"), py::arg("min_base_fee") = 0, py::arg("fee_numerator") = 0,
        py::arg("fee_denominator") = 1, py::arg("max_steps") = coinjoin::FullParams{}.max_search_steps);

    m.def(
        "canonical_serialize",
        [](const std::string& json) { return evidence::canonical_serialize(evidence::Document::parse(json)); },
        py::arg("json"));
    m.def(
        "canonical_digest",
        [](const std::string& json) { return evidence::canonical_digest(evidence::Document::parse(json)); },
        py::arg("json"));

    m.def(
        "verify_audit",
        [](const std::string& text) {
            const auto v = evidence::verify_audit(evidence::AuditLog::from_text(text));
            return py::make_tuple(v.ok, v.first_bad_seq, v.reason);
        },
        py::arg("text"), "Returns (ok, first_bad_seq, reason).");

    m.def(
        "validate_tag",
        [](const std::string& doc, const std::vector<std::string>& public_keys) {
            evidence::KeyRing ring;
            for (const auto& k : public_keys) ring.add(evidence::read_public_key(k));
            return sharing::import_tag(doc, sharing::builtin_vocabularies(), ring).warnings;
        },
        py::arg("document"), py::arg("public_keys") = std::vector<std::string>{},
        "Returns warnings; raises ValidationError when the tag is rejected.");
    m.def(
        "validate_cluster_record",
        [](const std::string& doc, const std::vector<std::string>& public_keys) {
            evidence::KeyRing ring;
            for (const auto& k : public_keys) ring.add(evidence::read_public_key(k));
            return sharing::import_cluster(doc, sharing::builtin_vocabularies(), ring).warnings;
        },
        py::arg("document"), py::arg("public_keys") = std::vector<std::string>{});

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the mihkit command line; returns (exit_code, stdout, stderr).");
}
