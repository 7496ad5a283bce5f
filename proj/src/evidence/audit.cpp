#include "mihkit/evidence/audit.hpp"

#include <fstream>
#include <sstream>

#include "mihkit/error.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace mihkit::evidence {

namespace {

AuditEntry parse_entry(std::string_view line) {
    Document doc = Document::parse(line);  // throws on malformed text
    static const char* kKeys[] = {"action", "actor",     "detail",   "entry_hash",
                                  "prev_hash", "seq", "target", "timestamp"};
    if (!doc.is_object() || doc.size() != std::size(kKeys)) throw IntegrityError("unexpected entry shape");
    for (const char* k : kKeys) {
        if (!doc.contains(k)) throw IntegrityError(std::string("missing field ") + k);
    }
    const auto& actor = doc["actor"];
    if (!actor.is_object() || actor.size() != 2) throw IntegrityError("bad actor");
    AuditEntry e;
    e.seq = doc["seq"].get<std::uint64_t>();
    e.actor = {actor.at("iri").get<std::string>(), actor.at("name").get<std::string>()};
    e.action = doc["action"].get<std::string>();
    e.target = doc["target"].get<std::string>();
    e.detail = doc["detail"];
    e.timestamp = doc["timestamp"].get<std::string>();
    e.prev_hash = doc["prev_hash"].get<std::string>();
    e.entry_hash = doc["entry_hash"].get<std::string>();
    return e;
}

}  // namespace

std::string audit_action(std::string_view local_name) {
    return std::string(kAuditActionNs) + std::string(local_name);
}

Document audit_body(const AuditEntry& e) {
    return {{"seq", e.seq},
            {"actor", {{"iri", e.actor.iri}, {"name", e.actor.name}}},
            {"action", e.action},
            {"target", e.target},
            {"detail", e.detail},
            {"timestamp", e.timestamp},
            {"prev_hash", e.prev_hash}};
}

Document to_json(const AuditEntry& e) {
    Document doc = audit_body(e);
    doc["entry_hash"] = e.entry_hash;
    return doc;
}

AuditLog AuditLog::from_text(std::string_view text) {
    AuditLog log;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            log.lines_.emplace_back(text.substr(pos));
            log.unterminated_tail_ = true;
            break;
        }
        log.lines_.emplace_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return log;
}

std::string AuditLog::text() const {
    std::string out;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
        out += lines_[i];
        if (i + 1 < lines_.size() || !unterminated_tail_) out += '\n';
    }
    return out;
}

AuditEntry AuditLog::entry(std::size_t i) const {
    try {
        return parse_entry(lines_.at(i));
    } catch (const Document::exception& e) {
        throw IntegrityError("audit entry " + std::to_string(i) + " is malformed: " + e.what());
    }
}

AuditEntry AuditLog::append(const AgentRef& actor, std::string action, std::string target,
                            Document detail, const Clock& clock) {
    const auto verdict = verify_audit(*this);
    if (!verdict.ok) {
        throw IntegrityError("audit log corrupted at seq " + std::to_string(verdict.first_bad_seq) +
                             ": " + verdict.reason);
    }
    AuditEntry e;
    e.seq = lines_.size();
    e.actor = actor;
    e.action = std::move(action);
    e.target = std::move(target);
    e.detail = std::move(detail);
    e.timestamp = format_rfc3339(clock.now());
    e.prev_hash = lines_.empty() ? kZeroHash : entry(lines_.size() - 1).entry_hash;
    e.entry_hash = canonical_digest(audit_body(e));
    lines_.push_back(canonical_serialize(to_json(e)));
    return e;
}

AuditVerdict verify_audit(const AuditLog& log) {
    std::string prev = kZeroHash;
    for (std::size_t i = 0; i < log.lines_.size(); ++i) {
        auto bad = [&](std::string reason) { return AuditVerdict{false, i, std::move(reason)}; };
        const auto& line = log.lines_[i];
        if (i + 1 == log.lines_.size() && log.unterminated_tail_) return bad("unterminated entry");
        AuditEntry e;
        try {
            e = parse_entry(line);
            // Byte-exact check: equivalent spellings of the same JSON are tampering too.
            if (canonical_serialize(to_json(e)) != line) return bad("entry is not canonical");
        } catch (const std::exception& ex) {
            return bad(std::string("malformed entry: ") + ex.what());
        }
        if (e.seq != i) return bad("sequence number out of order");
        if (e.prev_hash != prev) return bad("chain link broken");
        if (!is_hex64(e.entry_hash) || canonical_digest(audit_body(e)) != e.entry_hash) {
            return bad("entry hash mismatch");
        }
        prev = e.entry_hash;
    }
    return {};
}

AuditLogFile::AuditLogFile(std::filesystem::path path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        std::ifstream in(path_, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        log_ = AuditLog::from_text(buf.str());
    }
}

AuditEntry AuditLogFile::append(const AgentRef& actor, std::string action, std::string target,
                                Document detail, const Clock& clock) {
    AuditEntry e = log_.append(actor, std::move(action), std::move(target), std::move(detail), clock);
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << log_.lines().back() << '\n';
    if (!out) throw Error("cannot append to audit log " + path_.string());
    return e;
}

}  // namespace mihkit::evidence
