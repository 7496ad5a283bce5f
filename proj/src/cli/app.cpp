#include "mihkit/cli/app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mihkit/chain/ledger.hpp"
#include "mihkit/chain/synth.hpp"
#include "mihkit/clustering/cluster_set.hpp"
#include "mihkit/clustering/clustering.hpp"
#include "mihkit/coinjoin/contamination.hpp"
#include "mihkit/coinjoin/detect.hpp"
#include "mihkit/coinjoin/scan.hpp"
#include "mihkit/error.hpp"
#include "mihkit/evidence/audit.hpp"
#include "mihkit/evidence/canonical.hpp"
#include "mihkit/evidence/clock.hpp"
#include "mihkit/evidence/crypto.hpp"
#include "mihkit/evidence/signing.hpp"
#include "mihkit/evidence/timestamp.hpp"
#include "mihkit/sharing/jsonld.hpp"
#include "mihkit/sharing/merge.hpp"
#include "mihkit/sharing/model.hpp"
#include "mihkit/sharing/vocabulary.hpp"
#include "mihkit/version.hpp"

namespace mihkit::cli {

namespace fs = std::filesystem;
using evidence::Document;

namespace {

// Artifact names under --out.
constexpr const char* kLedgerFile = "ledger.jsonl";
constexpr const char* kTruthFile = "ground_truth.json";
constexpr const char* kPlantedFile = "planted.json";
constexpr const char* kClustersFile = "clusters.json";
constexpr const char* kScanFile = "scan.json";
constexpr const char* kReportCsv = "report.csv";
constexpr const char* kReportSvg = "report.svg";
constexpr const char* kReportJson = "report.json";
constexpr const char* kEvaluationFile = "evaluation.json";
constexpr const char* kAuditFile = "audit.jsonl";
constexpr const char* kTagDir = "tags";
constexpr const char* kRecordDir = "records";
constexpr const char* kKeyDir = "keys";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("cannot write " + path.string());
}

Document parse_json_file(const fs::path& path) {
    try {
        return Document::parse(read_file(path));
    } catch (const Document::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string pretty(const Document& doc) { return doc.dump(2) + "\n"; }

/// Percent-encodes everything outside the unreserved IRI characters.
std::string slug(std::string_view text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 15];
        }
    }
    return out;
}

struct Globals {
    std::string out = ".";
    std::string ledger;
    std::string audit_log;
    std::string actor = "investigator";
    std::string clock;
    std::string currency = "BTC";
    std::string case_id;
};

/// Adds the case id to every detail document before it reaches the log.
class CaseSink final : public evidence::AuditSink {
public:
    CaseSink(evidence::AuditSink& inner, std::string case_id) : inner_(inner), case_id_(std::move(case_id)) {}
    evidence::AuditEntry append(const evidence::AgentRef& actor, std::string action, std::string target,
                                Document detail, const evidence::Clock& clock) override {
        if (!case_id_.empty()) detail["case"] = case_id_;
        return inner_.append(actor, std::move(action), std::move(target), std::move(detail), clock);
    }

private:
    evidence::AuditSink& inner_;
    std::string case_id_;
};

class Session {
public:
    Session(const Globals& g, std::ostream& out, std::ostream& err) : out(out), err(err), g_(g) {
        if (g_.currency.empty()) throw InputError("--currency must not be empty");
        if (g_.actor.empty()) throw InputError("--actor must not be empty");
        if (g_.clock.empty()) {
            clock_ = std::make_unique<evidence::SystemClock>();
        } else {
            clock_ = std::make_unique<evidence::FixedClock>(evidence::parse_rfc3339(g_.clock));
        }
    }

    fs::path artifact(std::string_view name) const { return fs::path(g_.out) / name; }
    fs::path ledger_path() const { return g_.ledger.empty() ? artifact(kLedgerFile) : fs::path(g_.ledger); }
    fs::path audit_path() const { return g_.audit_log.empty() ? artifact(kAuditFile) : fs::path(g_.audit_log); }
    const evidence::Clock& clock() const { return *clock_; }
    const std::string& currency() const { return g_.currency; }
    const std::string& case_id() const { return g_.case_id; }
    const sharing::NamespaceContext& ns() const { return ns_; }
    const std::vector<sharing::Vocabulary>& vocabs() const { return vocabs_; }

    evidence::AgentRef actor() const { return {ns_.tool_iri("agent/" + slug(g_.actor)).str(), g_.actor}; }

    /// Opens the audit log for a state-changing command and refuses to go on
    /// when the existing chain does not verify.
    evidence::AuditSink& audit_sink() {
        if (!sink_) {
            fs::create_directories(g_.out);
            file_ = std::make_unique<evidence::AuditLogFile>(audit_path());
            const auto verdict = evidence::verify_audit(file_->log());
            if (!verdict.ok) {
                throw IntegrityError("audit log broken at seq " + std::to_string(verdict.first_bad_seq) + ": " +
                                     verdict.reason);
            }
            sink_ = std::make_unique<CaseSink>(*file_, g_.case_id);
        }
        return *sink_;
    }

    void audit(std::string_view action, std::string target, Document detail) {
        audit_sink().append(actor(), evidence::audit_action(action), std::move(target), std::move(detail), clock());
    }

    chain::Ledger load_ledger() const {
        std::ifstream in(ledger_path(), std::ios::binary);
        if (!in) throw InputError("cannot read ledger " + ledger_path().string());
        return chain::parse_ledger(in);
    }

    clustering::ClusterSet load_clusters() const { return clustering::import_cluster_set(read_file(artifact(kClustersFile))); }

    void save_clusters(const clustering::ClusterSet& set) const {
        write_file(artifact(kClustersFile), clustering::export_cluster_set(set));
    }

    std::ostream& out;
    std::ostream& err;

private:
    const Globals& g_;
    std::unique_ptr<evidence::Clock> clock_;
    sharing::NamespaceContext ns_;
    std::vector<sharing::Vocabulary> vocabs_ = sharing::builtin_vocabularies(ns_);
    std::unique_ptr<evidence::AuditLogFile> file_;
    std::unique_ptr<CaseSink> sink_;
};

// ---------------------------------------------------------------- options

struct HeuristicFlags {
    std::string kind = "structural";
    coinjoin::FullParams full;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--heuristic", kind, "CoinJoin heuristic")->check(CLI::IsMember({"structural", "full"}));
        cmd.add_option("--min-base-fee", full.min_base_fee, "full heuristic: flat fee allowance");
        cmd.add_option("--fee-numerator", full.fee_numerator, "full heuristic: proportional fee numerator");
        cmd.add_option("--fee-denominator", full.fee_denominator, "full heuristic: proportional fee denominator");
        cmd.add_option("--max-steps", full.max_search_steps, "full heuristic: search step budget");
    }

    coinjoin::HeuristicConfig config() const {
        coinjoin::HeuristicConfig c;
        c.kind = kind == "full" ? coinjoin::HeuristicKind::Full : coinjoin::HeuristicKind::Structural;
        c.full = full;
        if (c.kind == coinjoin::HeuristicKind::Full) coinjoin::validate(c.full);
        return c;
    }
};

evidence::KeyRing load_keys(const std::vector<std::string>& paths) {
    evidence::KeyRing ring;
    for (const auto& p : paths) ring.add(evidence::read_public_key(read_file(p)));
    return ring;
}

std::optional<evidence::SigningKey> load_signing_key(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return evidence::read_private_key(read_file(path));
}

void print_warnings(Session& s, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) s.err << "warning: " << w << "\n";
}

std::string file_digest(const fs::path& p) { return evidence::sha256_hex(read_file(p)); }

sharing::InvestigativeAction make_action(const Session& s, std::string_view id, std::string_view category,
                                         std::string_view agent_category, const std::string& reliability,
                                         std::optional<std::string> method) {
    const auto& vocab = sharing::vocabulary(s.vocabs(), "action");
    const auto& agents = sharing::vocabulary(s.vocabs(), "agent");
    sharing::InvestigativeAction a;
    a.iri = s.ns().tool_iri("action/" + std::string(id));
    a.category = vocab.resolve(category);
    a.start_time = a.end_time = evidence::format_rfc3339(s.clock().now());
    a.instrument = sharing::Instrument{std::string(kToolName), std::string(kToolVersion)};
    a.method = std::move(method);
    const auto actor = s.actor();
    a.performer = {sharing::Iri(actor.iri), actor.name, agents.resolve(agent_category), std::nullopt};
    if (!reliability.empty()) a.performer.reliability = agents.resolve(reliability);
    return a;
}

// ---------------------------------------------------------------- commands

struct IngestArgs {
    std::string source;
};

void cmd_ingest(Session& s, const IngestArgs& a) {
    const std::string bytes = read_file(a.source);
    const auto ledger = chain::parse_ledger(std::string_view(bytes));
    s.audit_sink();
    const std::string normalized = chain::serialize_ledger(ledger);
    write_file(s.artifact(kLedgerFile), normalized);
    s.audit("ingest", kLedgerFile,
            {{"source_digest", evidence::sha256_hex(bytes)},
             {"ledger_digest", evidence::sha256_hex(normalized)},
             {"blocks", ledger.blocks().size()},
             {"transactions", ledger.transactions().size()}});
    s.out << "ingested " << ledger.transactions().size() << " transactions in " << ledger.blocks().size()
          << " blocks -> " << s.artifact(kLedgerFile).string() << "\n";
}

struct SynthArgs {
    std::string spec;
    std::optional<std::uint64_t> seed;
};

void cmd_synth(Session& s, const SynthArgs& a) {
    const std::string spec_bytes = read_file(a.spec);
    Document spec_doc;
    try {
        spec_doc = Document::parse(spec_bytes);
    } catch (const Document::parse_error& e) {
        throw InputError(a.spec + ": " + e.what());
    }
    auto spec = chain::synth_spec_from_json(spec_doc);
    if (a.seed) spec.seed = *a.seed;
    s.audit_sink();
    const auto result = chain::generate_synthetic(spec);

    const std::string ledger_text = chain::serialize_ledger(result.ledger);
    const std::string truth_text = pretty(chain::ground_truth_to_json(result.truth));
    const std::string planted_text = pretty(Document{{"planted_txids", result.planted_txids}});
    write_file(s.artifact(kLedgerFile), ledger_text);
    write_file(s.artifact(kTruthFile), truth_text);
    write_file(s.artifact(kPlantedFile), planted_text);
    s.audit("synth", kLedgerFile,
            {{"spec", chain::synth_spec_to_json(spec)},
             {"spec_digest", evidence::sha256_hex(spec_bytes)},
             {"ledger_digest", evidence::sha256_hex(ledger_text)},
             {"ground_truth_digest", evidence::sha256_hex(truth_text)},
             {"planted_txids", result.planted_txids}});
    s.out << "synthesised " << result.ledger.transactions().size() << " transactions, "
          << result.truth.wallets.size() << " wallets, " << result.planted_txids.size()
          << " planted CoinJoins (ledger digest " << evidence::sha256_hex(ledger_text) << ")\n";
}

struct ClusterArgs {
    std::string policy = "naive";
    HeuristicFlags heuristic;
};

void cmd_cluster(Session& s, const ClusterArgs& a) {
    const auto ledger = s.load_ledger();
    clustering::CoinJoinPolicy policy;
    if (a.policy == "exclude") policy = clustering::CoinJoinPolicy::exclude(a.heuristic.config());
    else if (a.policy == "mark") policy = clustering::CoinJoinPolicy::mark(a.heuristic.config());
    s.audit_sink();
    const auto set = clustering::cluster_multi_input(ledger, policy, {s.currency(), &s.clock()});
    s.save_clusters(set);
    s.audit("cluster", kClustersFile,
            {{"method_id", set.provenance().method_id},
             {"method_params", policy.params()},
             {"block_hash", set.provenance().block_hash},
             {"clusters_digest", file_digest(s.artifact(kClustersFile))},
             {"clusters", set.size()},
             {"addresses", set.address_count()}});
    s.out << set.size() << " clusters over " << set.address_count() << " addresses -> "
          << s.artifact(kClustersFile).string() << "\n";
}

struct ScanArgs {
    HeuristicFlags heuristic;
};

void cmd_scan(Session& s, const ScanArgs& a) {
    const auto ledger = s.load_ledger();
    const auto config = a.heuristic.config();
    s.audit_sink();
    const auto scan = coinjoin::scan_ledger(ledger, config, s.currency(), s.clock());
    write_file(s.artifact(kScanFile), pretty(coinjoin::to_json(scan)));
    s.audit("scan", kScanFile,
            {{"method_id", config.method_id()},
             {"method_params", config.params()},
             {"block_hash", scan.provenance.block_hash},
             {"scan_digest", file_digest(s.artifact(kScanFile))},
             {"coinjoins", scan.coinjoin_txids.size()},
             {"timeouts", scan.timeouts.size()}});
    s.out << scan.coinjoin_txids.size() << " CoinJoin transactions (" << scan.coinjoin_input_addresses.size()
          << " input addresses, " << scan.timeouts.size() << " timeouts) -> " << s.artifact(kScanFile).string()
          << "\n";
}

struct ReportArgs {
    std::size_t top_n = 100;
};

void cmd_report(Session& s, const ReportArgs& a) {
    const auto clusters = s.load_clusters();
    const auto scan = coinjoin::scan_result_from_json(parse_json_file(s.artifact(kScanFile)));
    const auto report = coinjoin::contamination_report(clusters, scan);
    s.audit_sink();
    const auto rendered = coinjoin::render_report(report, a.top_n);
    write_file(s.artifact(kReportCsv), rendered.csv);
    write_file(s.artifact(kReportSvg), rendered.svg);
    write_file(s.artifact(kReportJson), pretty(coinjoin::to_json(report.summary)));
    s.audit("report", kReportCsv,
            {{"top_n", a.top_n},
             {"csv_digest", evidence::sha256_hex(rendered.csv)},
             {"svg_digest", evidence::sha256_hex(rendered.svg)},
             {"summary_digest", file_digest(s.artifact(kReportJson))},
             {"clusters", report.summary.n_clusters},
             {"affected", report.summary.n_affected}});
    const auto& sum = report.summary;
    s.out << sum.n_affected << " of " << sum.n_clusters << " clusters contain at least one CoinJoin input\n";
}

struct EvaluateArgs {
    std::string truth;
};

void cmd_evaluate(Session& s, const EvaluateArgs& a) {
    const auto clusters = s.load_clusters();
    const fs::path truth_path = a.truth.empty() ? s.artifact(kTruthFile) : fs::path(a.truth);
    const auto truth = chain::ground_truth_from_json(parse_json_file(truth_path));
    const auto m = clustering::evaluate(clusters, truth);
    s.audit_sink();
    const Document doc{{"pairwise_precision", m.pairwise_precision},
                       {"pairwise_recall", m.pairwise_recall},
                       {"linked_fraction", m.linked_fraction},
                       {"method_id", clusters.provenance().method_id},
                       {"method_params", clusters.provenance().method_params}};
    write_file(s.artifact(kEvaluationFile), pretty(doc));
    s.audit("evaluate", kEvaluationFile,
            {{"ground_truth_digest", file_digest(truth_path)},
             {"evaluation_digest", file_digest(s.artifact(kEvaluationFile))}});
    s.out << "pairwise precision " << m.pairwise_precision << ", recall " << m.pairwise_recall
          << ", linked fraction " << m.linked_fraction << "\n";
}

struct KeygenArgs {
    std::string key_id;
    std::string seed_hex;
};

void cmd_keygen(Session& s, const KeygenArgs& a) {
    const bool ok_id = !a.key_id.empty() && std::all_of(a.key_id.begin(), a.key_id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-' || c == '_' || c == '.';
    });
    if (!ok_id) throw InputError("--key-id must be non-empty and use only [A-Za-z0-9._-]");
    std::optional<evidence::SigningKey> key;
    if (a.seed_hex.empty()) {
        key = evidence::SigningKey::generate(a.key_id);
    } else {
        if (!evidence::is_hex64(a.seed_hex)) throw InputError("--seed must be 64 lowercase hex digits");
        evidence::Bytes seed;
        for (std::size_t i = 0; i < 64; i += 2) {
            seed.push_back(static_cast<std::uint8_t>(std::stoi(a.seed_hex.substr(i, 2), nullptr, 16)));
        }
        key = evidence::SigningKey::from_seed(a.key_id, seed);
    }
    s.audit_sink();
    const std::string pub_name = std::string(kKeyDir) + "/" + a.key_id + ".pub";
    const auto pub = key->public_key();
    write_file(s.artifact(std::string(kKeyDir) + "/" + a.key_id + ".key"), evidence::write_private_key(*key));
    write_file(s.artifact(pub_name), evidence::write_public_key(pub));
    s.audit("keygen", pub_name,
            {{"key_id", a.key_id}, {"scheme", pub.scheme_id}, {"public_key_digest", evidence::sha256_hex(std::string(pub.key.begin(), pub.key.end()))}});
    s.out << "wrote key pair '" << a.key_id << "' -> " << s.artifact(pub_name).string() << "\n";
}

struct TagAddArgs {
    std::string label, category, address;
    std::string source_label, source_category = "Website", source_url, archive_ref, archive_file;
    std::string action_category = "ManualEntry", agent_category = "Person", reliability;
    std::string key;
    bool no_timestamp = false;
};

fs::path write_tag(Session& s, const sharing::AttributionTag& tag) {
    const std::string name = std::string(kTagDir) + "/" + tag.hash.substr(0, 16) + ".jsonld";
    write_file(s.artifact(name), sharing::export_tag(tag, s.ns(), s.vocabs()));
    return name;
}

fs::path write_record(Session& s, const sharing::ClusterRecord& r) {
    const std::string name = std::string(kRecordDir) + "/" + r.hash.substr(0, 16) + ".jsonld";
    write_file(s.artifact(name), sharing::export_cluster(r, s.ns(), s.vocabs()));
    return name;
}

void cmd_tag_add(Session& s, const TagAddArgs& a) {
    const auto key = load_signing_key(a.key);
    sharing::AttributionTag tag;
    const std::string id =
        evidence::sha256_hex(a.label + "\n" + a.category + "\n" + a.address + "\n" + s.currency()).substr(0, 16);
    tag.iri = s.ns().tool_iri("tag/" + id);
    tag.label = a.label;
    tag.category = sharing::vocabulary(s.vocabs(), "tag").resolve(a.category);
    tag.address = chain::Address(a.address);
    tag.currency_code = s.currency();
    tag.action = make_action(s, "tag-" + id, a.action_category, a.agent_category, a.reliability, std::nullopt);

    auto& src = tag.source;
    src.label = a.source_label;
    if (!a.source_url.empty()) src.url = a.source_url;
    if (!a.archive_ref.empty()) src.archive_ref = a.archive_ref;
    if (!a.archive_file.empty()) src.archive_digest = file_digest(a.archive_file);
    src.iri = s.ns().tool_iri("source/" + evidence::sha256_hex(a.source_label + "\n" + a.source_url).substr(0, 16));
    src.category = sharing::vocabulary(s.vocabs(), "source").resolve(a.source_category);

    const evidence::LocalAuthority tsa(s.clock());
    sharing::seal(tag, key ? &*key : nullptr, a.no_timestamp ? nullptr : &tsa);
    sharing::check_tag(tag, s.vocabs());
    s.audit_sink();
    const auto name = write_tag(s, tag);
    s.audit("tag-add", name.generic_string(),
            {{"tag", tag.iri.str()},
             {"hash", tag.hash},
             {"signed", tag.signature.has_value()},
             {"timestamped", !tag.timestamps.empty()}});
    s.out << s.artifact(name.generic_string()).string() << "\n";
}

struct DocArgs {
    std::string file;
    std::vector<std::string> keys;
    std::string sign_key;
    bool no_timestamp = false;
};

void cmd_tag_export(Session& s, const DocArgs& a) {
    auto imported = sharing::import_tag(read_file(a.file), s.vocabs(), load_keys(a.keys), s.ns());
    print_warnings(s, imported.warnings);
    auto& tag = imported.tag;
    if (!a.sign_key.empty()) {
        const auto key = load_signing_key(a.sign_key);
        const evidence::LocalAuthority tsa(s.clock());
        sharing::seal(tag, &*key, a.no_timestamp ? nullptr : &tsa);
    }
    s.audit_sink();
    const auto name = write_tag(s, tag);
    s.audit("tag-export", name.generic_string(),
            {{"tag", tag.iri.str()}, {"hash", tag.hash}, {"signed", tag.signature.has_value()}});
    s.out << s.artifact(name.generic_string()).string() << "\n";
}

void cmd_tag_import(Session& s, const DocArgs& a) {
    const auto imported = sharing::import_tag(read_file(a.file), s.vocabs(), load_keys(a.keys), s.ns());
    print_warnings(s, imported.warnings);
    s.audit_sink();
    const auto name = write_tag(s, imported.tag);
    s.audit("tag-import", name.generic_string(),
            {{"tag", imported.tag.iri.str()},
             {"hash", imported.tag.hash},
             {"source_digest", file_digest(a.file)},
             {"warnings", imported.warnings}});
    s.out << "imported " << imported.tag.iri.str() << " -> " << s.artifact(name.generic_string()).string() << "\n";
}

int cmd_tag_validate(Session& s, const DocArgs& a) {
    const std::string bytes = read_file(a.file);
    const auto keys = load_keys(a.keys);
    try {
        const auto imported = sharing::import_tag(bytes, s.vocabs(), keys, s.ns());
        print_warnings(s, imported.warnings);
        s.out << a.file << ": valid\n";
        return kSuccess;
    } catch (const ValidationError& e) {
        s.out << a.file << ": invalid: " << e.what() << "\n";
        return kValidationFailure;
    }
}

struct RecordExportArgs {
    std::string cluster, address, key;
    std::vector<std::string> tag_iris;
};

void cmd_record_export(Session& s, const RecordExportArgs& a) {
    const auto set = s.load_clusters();
    std::optional<clustering::ClusterId> id;
    if (!a.cluster.empty()) id = clustering::ClusterId(a.cluster);
    else id = set.find(chain::Address(a.address));
    if (!id || !set.cluster(*id)) throw ValidationError("no such cluster in " + std::string(kClustersFile));
    std::vector<sharing::Iri> tags;
    for (const auto& t : a.tag_iris) {
        const auto colon = t.find(':');
        // Accept tool:/case:/vocab: CURIEs as well as absolute IRIs.
        if (colon != std::string::npos && t.compare(0, colon, "tool") == 0) {
            tags.push_back(s.ns().tool_iri(t.substr(colon + 1)));
        } else {
            tags.emplace_back(t);
        }
    }
    const auto key = load_signing_key(a.key);
    const std::string short_id = id->str().substr(0, 16);
    auto record = sharing::record_from_cluster(
        set, *id, s.ns().tool_iri("cluster/" + id->str()),
        make_action(s, "cluster-" + short_id, "Clustering", "Person", "", set.provenance().method_id), tags);
    sharing::seal(record, key ? &*key : nullptr);
    s.audit_sink();
    const auto name = write_record(s, record);
    s.audit("record-export", name.generic_string(),
            {{"record", record.iri.str()},
             {"cluster", id->str()},
             {"hash", record.hash},
             {"signed", record.signature.has_value()}});
    s.out << s.artifact(name.generic_string()).string() << "\n";
}

void cmd_record_import(Session& s, const DocArgs& a) {
    const auto imported = sharing::import_cluster(read_file(a.file), s.vocabs(), load_keys(a.keys), s.ns());
    print_warnings(s, imported.warnings);
    s.audit_sink();
    const auto name = write_record(s, imported.record);
    s.audit("record-import", name.generic_string(),
            {{"record", imported.record.iri.str()},
             {"hash", imported.record.hash},
             {"source_digest", file_digest(a.file)},
             {"warnings", imported.warnings}});
    s.out << "imported " << imported.record.iri.str() << " -> " << s.artifact(name.generic_string()).string()
          << "\n";
}

struct MergeArgs {
    std::vector<std::string> files;
    std::vector<std::string> keys;
};

void cmd_record_merge(Session& s, const MergeArgs& a) {
    const auto set = s.load_clusters();
    const auto keys = load_keys(a.keys);
    std::vector<sharing::ClusterRecord> records;
    Document iris = Document::array();
    for (const auto& f : a.files) {
        auto imported = sharing::import_cluster(read_file(f), s.vocabs(), keys, s.ns());
        print_warnings(s, imported.warnings);
        iris.push_back(imported.record.iri.str());
        records.push_back(std::move(imported.record));
    }
    const auto merged = sharing::merge_shared_clusters(set, records);
    s.audit_sink();
    const std::string before = file_digest(s.artifact(kClustersFile));
    s.save_clusters(merged);
    Document added = Document::array();
    for (const auto& iri : merged.incorporated_records()) {
        if (!set.incorporated_records().contains(iri)) added.push_back(iri);
    }
    s.audit("record-merge", kClustersFile,
            {{"records", std::move(iris)},
             {"incorporated", added},
             {"before_digest", before},
             {"after_digest", file_digest(s.artifact(kClustersFile))}});
    s.out << "merged " << records.size() << " records; " << added.size() << " changed the cluster set ("
          << set.size() << " -> " << merged.size() << " clusters)\n";
}

struct RectifyArgs {
    std::string cluster, address, action, reason;
};

void cmd_rectify(Session& s, const RectifyArgs& a) {
    const auto set = s.load_clusters();
    clustering::RectifyTarget target;
    if (!a.cluster.empty()) target = clustering::ClusterId(a.cluster);
    else target = chain::Address(a.address);
    clustering::RectifyAction action = clustering::RectifyAction::ExcludeAddress;
    if (a.action == "mark-erroneous") action = clustering::RectifyAction::MarkErroneous;
    else if (a.action == "unmark-erroneous") action = clustering::RectifyAction::UnmarkErroneous;
    auto outcome = clustering::rectify(set, target, action, a.reason, s.actor(), s.audit_sink(), s.clock());
    s.save_clusters(outcome.clusters);
    s.out << "rectified (" << a.action << "), audit seq " << outcome.entry.seq << "\n";
}

int cmd_audit_verify(Session& s) {
    const auto log = evidence::AuditLog::from_text(read_file(s.audit_path()));
    const auto verdict = evidence::verify_audit(log);
    if (!verdict.ok) {
        s.err << "audit log broken at seq " << verdict.first_bad_seq << ": " << verdict.reason << "\n";
        return kIntegrityFailure;
    }
    s.out << "audit log intact: " << log.size() << " entries\n";
    return kSuccess;
}

void cmd_disclose(Session& s) {
    auto& o = s.out;
    o << "# " << kToolName << " " << kToolVersion << " method disclosure\n\n";

    o << "## Address clustering\n\n";
    o << "- method: " << clustering::kMethodId << "\n";
    o << "- definition: " << clustering::kMethodDefinition << "\n";
    o << "- default parameters: " << evidence::canonical_serialize(clustering::CoinJoinPolicy::naive().params())
      << "\n\n";

    o << "## CoinJoin detection\n\n";
    for (auto kind : {coinjoin::HeuristicKind::Structural, coinjoin::HeuristicKind::Full}) {
        coinjoin::HeuristicConfig c;
        c.kind = kind;
        o << "- method: " << c.method_id() << "\n";
        o << "  - definition: " << coinjoin::definition(kind) << "\n";
        o << "  - default parameters: " << evidence::canonical_serialize(c.params()) << "\n";
    }
    o << "\n## Vocabularies\n\n";
    o << "- case: " << s.ns().case_ns << "\n- vocab: " << s.ns().vocab_ns << "\n- tool: " << s.ns().tool_ns << "\n";
    for (const auto& v : s.vocabs()) {
        o << "- " << v.name << " (" << v.namespace_iri.str() << "):";
        for (const auto& [local, term] : v.terms) o << " " << local;
        o << "\n";
    }
    o << "\n## Integrity schemes\n\n";
    o << "- hash: sha256 over canonical JSON (sorted keys, no whitespace, integers only, UTF-8)\n";
    o << "- cluster hash: sha256 over the byte-wise sorted member addresses joined by newline\n";
    o << "- signature: " << evidence::kEd25519 << " over the lowercase hex payload digest\n";
    o << "- timestamp authority: local (token digest binds authority, payload digest and time)\n";
    o << "- audit log: JSON lines, each entry hash-chained to its predecessor (genesis prev_hash "
      << evidence::kZeroHash << ")\n";

    o << "\n## Commands executed";
    if (!s.case_id().empty()) o << " for case " << s.case_id();
    o << "\n\n";
    if (!fs::exists(s.audit_path())) {
        o << "(no audit log at " << s.audit_path().string() << ")\n";
        return;
    }
    const auto log = evidence::AuditLog::from_text(read_file(s.audit_path()));
    const auto verdict = evidence::verify_audit(log);
    if (!verdict.ok) {
        o << "audit log BROKEN at seq " << verdict.first_bad_seq << ": " << verdict.reason << "\n";
        return;
    }
    std::size_t listed = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto e = log.entry(i);
        if (!s.case_id().empty() && e.detail.value("case", std::string()) != s.case_id()) continue;
        std::string action = e.action;
        if (action.starts_with(evidence::kAuditActionNs)) action.erase(0, evidence::kAuditActionNs.size());
        o << "- seq " << e.seq << " " << e.timestamp << " " << e.actor.name << ": " << action << " " << e.target
          << "\n";
        ++listed;
    }
    if (listed == 0) o << "(none)\n";
    o << "\naudit chain verified: " << log.size() << " entries\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mihkit: address clustering, CoinJoin detection and evidence sharing", "mihkit"};
    app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file supplying any of these options");

    Globals g;
    app.add_option("--out", g.out, "artifact directory")->capture_default_str();
    app.add_option("--ledger", g.ledger, "ledger file (default <out>/ledger.jsonl)");
    app.add_option("--audit-log", g.audit_log, "audit log (default <out>/audit.jsonl)");
    app.add_option("--actor", g.actor, "investigator name recorded in the audit log")->capture_default_str();
    app.add_option("--clock", g.clock, "fixed RFC 3339 UTC time, e.g. 2024-01-01T00:00:00Z");
    app.add_option("--currency", g.currency, "currency code")->capture_default_str();
    app.add_option("--case", g.case_id, "case id attached to audit entries");

    IngestArgs ingest;
    auto* c_ingest = app.add_subcommand("ingest", "normalise a JSON-lines ledger into <out>/ledger.jsonl");
    c_ingest->add_option("file", ingest.source, "ledger to ingest")->required();

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "generate a synthetic ledger with ground truth");
    c_synth->add_option("spec", synth.spec, "synthetic spec (JSON)")->required();
    c_synth->add_option("--seed", synth.seed, "override the spec's seed");

    ClusterArgs cluster;
    auto* c_cluster = app.add_subcommand("cluster", "run the multi-input heuristic");
    c_cluster->add_option("--policy", cluster.policy, "CoinJoin policy")
        ->check(CLI::IsMember({"naive", "exclude", "mark"}))
        ->capture_default_str();
    cluster.heuristic.add_to(*c_cluster);

    ScanArgs scan;
    auto* c_scan = app.add_subcommand("scan", "detect CoinJoin transactions");
    scan.heuristic.add_to(*c_scan);

    ReportArgs report;
    auto* c_report = app.add_subcommand("report", "CoinJoin contamination of clusters (CSV, SVG, summary)");
    c_report->add_option("--top-n", report.top_n, "largest clusters to list")->capture_default_str();

    EvaluateArgs evaluate;
    auto* c_eval = app.add_subcommand("evaluate", "score clusters against ground truth");
    c_eval->add_option("--truth", evaluate.truth, "ground truth (default <out>/ground_truth.json)");

    KeygenArgs keygen;
    auto* c_keygen = app.add_subcommand("keygen", "create an ed25519 signing key pair under <out>/keys");
    c_keygen->add_option("--key-id", keygen.key_id, "key identifier")->required();
    c_keygen->add_option("--seed", keygen.seed_hex, "deterministic 32-byte seed as hex");

    auto* c_tag = app.add_subcommand("tag", "attribution tags");
    c_tag->require_subcommand(1);
    TagAddArgs tag_add;
    auto* c_tag_add = c_tag->add_subcommand("add", "create a tag from flags");
    c_tag_add->add_option("--label", tag_add.label, "tag label")->required();
    c_tag_add->add_option("--category", tag_add.category, "tag category (e.g. Organization)")->required();
    c_tag_add->add_option("--address", tag_add.address, "tagged address")->required();
    c_tag_add->add_option("--source-label", tag_add.source_label, "where the attribution came from")->required();
    c_tag_add->add_option("--source-category", tag_add.source_category)->capture_default_str();
    c_tag_add->add_option("--source-url", tag_add.source_url);
    c_tag_add->add_option("--archive-ref", tag_add.archive_ref, "reference to an archived copy of the source");
    c_tag_add->add_option("--archive-file", tag_add.archive_file, "archived copy whose SHA-256 is recorded");
    c_tag_add->add_option("--action-category", tag_add.action_category)->capture_default_str();
    c_tag_add->add_option("--agent-category", tag_add.agent_category)->capture_default_str();
    c_tag_add->add_option("--reliability", tag_add.reliability, "low, medium or high");
    c_tag_add->add_option("--key", tag_add.key, "private key file to sign with");
    c_tag_add->add_flag("--no-timestamp", tag_add.no_timestamp, "skip the local timestamp");

    DocArgs tag_export, tag_import, tag_validate, rec_import;
    auto* c_tag_export = c_tag->add_subcommand("export", "validate a tag and write it under <out>/tags");
    c_tag_export->add_option("file", tag_export.file)->required();
    c_tag_export->add_option("--keys", tag_export.keys, "trusted public key files");
    c_tag_export->add_option("--key", tag_export.sign_key, "re-sign with this private key");
    c_tag_export->add_flag("--no-timestamp", tag_export.no_timestamp);
    auto* c_tag_import = c_tag->add_subcommand("import", "import a shared tag");
    c_tag_import->add_option("file", tag_import.file)->required();
    c_tag_import->add_option("--keys", tag_import.keys, "trusted public key files");
    auto* c_tag_validate = c_tag->add_subcommand("validate", "check a tag document; exit 1 when invalid");
    c_tag_validate->add_option("file", tag_validate.file)->required();
    c_tag_validate->add_option("--keys", tag_validate.keys, "trusted public key files");

    auto* c_record = app.add_subcommand("record", "shared cluster records");
    c_record->require_subcommand(1);
    RecordExportArgs rec_export;
    auto* c_rec_export = c_record->add_subcommand("export", "describe one cluster as a shareable record");
    auto* o_cluster = c_rec_export->add_option("--cluster", rec_export.cluster, "cluster id");
    auto* o_address = c_rec_export->add_option("--address", rec_export.address, "any member address");
    o_cluster->excludes(o_address);
    c_rec_export->add_option("--tag", rec_export.tag_iris, "IRI of a tag attached to the cluster");
    c_rec_export->add_option("--key", rec_export.key, "private key file to sign with");
    auto* c_rec_import = c_record->add_subcommand("import", "import a shared cluster record");
    c_rec_import->add_option("file", rec_import.file)->required();
    c_rec_import->add_option("--keys", rec_import.keys, "trusted public key files");
    MergeArgs merge;
    auto* c_rec_merge = c_record->add_subcommand("merge", "merge shared records into <out>/clusters.json");
    c_rec_merge->add_option("files", merge.files)->required();
    c_rec_merge->add_option("--keys", merge.keys, "trusted public key files");

    RectifyArgs rect;
    auto* c_rectify = app.add_subcommand("rectify", "exclude an address or flag a cluster, with a reason");
    auto* r_cluster = c_rectify->add_option("--cluster", rect.cluster, "cluster id");
    auto* r_address = c_rectify->add_option("--address", rect.address, "address");
    r_cluster->excludes(r_address);
    c_rectify->add_option("--action", rect.action)
        ->check(CLI::IsMember({"exclude", "mark-erroneous", "unmark-erroneous"}))
        ->required();
    c_rectify->add_option("--reason", rect.reason, "why (recorded in the audit log)")->required();

    auto* c_audit = app.add_subcommand("audit", "audit log");
    c_audit->require_subcommand(1);
    auto* c_audit_verify = c_audit->add_subcommand("verify", "check the hash chain; exit 3 when broken");

    auto* c_disclose = app.add_subcommand("disclose", "print the method disclosure for this installation");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::CallForVersion& e) {
        out << e.what() << "\n";
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "mihkit: " << e.what() << "\n";
        return kBadInput;
    }

    try {
        Session s(g, out, err);
        if (c_ingest->parsed()) cmd_ingest(s, ingest);
        else if (c_synth->parsed()) cmd_synth(s, synth);
        else if (c_cluster->parsed()) cmd_cluster(s, cluster);
        else if (c_scan->parsed()) cmd_scan(s, scan);
        else if (c_report->parsed()) cmd_report(s, report);
        else if (c_eval->parsed()) cmd_evaluate(s, evaluate);
        else if (c_keygen->parsed()) cmd_keygen(s, keygen);
        else if (c_tag_add->parsed()) cmd_tag_add(s, tag_add);
        else if (c_tag_export->parsed()) cmd_tag_export(s, tag_export);
        else if (c_tag_import->parsed()) cmd_tag_import(s, tag_import);
        else if (c_tag_validate->parsed()) return cmd_tag_validate(s, tag_validate);
        else if (c_rec_export->parsed()) {
            if (rec_export.cluster.empty() == rec_export.address.empty()) {
                throw InputError("record export needs exactly one of --cluster or --address");
            }
            cmd_record_export(s, rec_export);
        } else if (c_rec_import->parsed()) cmd_record_import(s, rec_import);
        else if (c_rec_merge->parsed()) cmd_record_merge(s, merge);
        else if (c_rectify->parsed()) {
            if (rect.cluster.empty() == rect.address.empty()) {
                throw InputError("rectify needs exactly one of --cluster or --address");
            }
            cmd_rectify(s, rect);
        } else if (c_audit_verify->parsed()) return cmd_audit_verify(s);
        else if (c_disclose->parsed()) cmd_disclose(s);
        return kSuccess;
    } catch (const ValidationError& e) {
        err << "mihkit: validation failed: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const IntegrityError& e) {
        err << "mihkit: integrity failure: " << e.what() << "\n";
        return kIntegrityFailure;
    } catch (const InputError& e) {
        err << "mihkit: bad input: " << e.what() << "\n";
        return kBadInput;
    } catch (const Document::exception& e) {
        err << "mihkit: bad input: " << e.what() << "\n";
        return kBadInput;
    } catch (const fs::filesystem_error& e) {
        err << "mihkit: bad input: " << e.what() << "\n";
        return kBadInput;
    }
}

}  // namespace mihkit::cli
