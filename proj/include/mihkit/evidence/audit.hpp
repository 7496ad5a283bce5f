#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mihkit/evidence/canonical.hpp"
#include "mihkit/evidence/clock.hpp"

namespace mihkit::evidence {

/// Who performed an action.
struct AgentRef {
    std::string iri;
    std::string name;
    friend bool operator==(const AgentRef&, const AgentRef&) = default;
};

/// Namespace for audit action category IRIs.
inline constexpr std::string_view kAuditActionNs = "https://mihkit.example.org/audit#";
std::string audit_action(std::string_view local_name);

struct AuditEntry {
    std::uint64_t seq = 0;
    AgentRef actor;
    std::string action;  // category IRI
    std::string target;
    Document detail = Document::object();
    std::string timestamp;  // RFC 3339 UTC
    std::string prev_hash;
    std::string entry_hash;

    friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

/// The hashed part of an entry: every field except entry_hash.
Document audit_body(const AuditEntry& e);
Document to_json(const AuditEntry& e);

struct AuditVerdict {
    bool ok = true;
    std::uint64_t first_bad_seq = 0;  // meaningful when !ok
    std::string reason;
};

/// Anything that records audit entries.
class AuditSink {
public:
    virtual ~AuditSink() = default;
    virtual AuditEntry append(const AgentRef& actor, std::string action, std::string target,
                              Document detail, const Clock& clock) = 0;
};

/// Hash-chained, append-only usage log. The serialized lines are the source
/// of truth; entries are parsed from them on demand.
class AuditLog final : public AuditSink {
public:
    AuditLog() = default;
    /// Loads a JSON-lines log without validating it; use verify_audit.
    static AuditLog from_text(std::string_view text);

    std::size_t size() const noexcept { return lines_.size(); }
    bool empty() const noexcept { return lines_.empty(); }
    /// Serialized log, one canonical entry per '\n'-terminated line.
    std::string text() const;
    const std::vector<std::string>& lines() const noexcept { return lines_; }
    /// Parses entry i. Throws IntegrityError if the line is not an entry.
    AuditEntry entry(std::size_t i) const;

    /// Appends a correctly chained entry. Throws IntegrityError when the
    /// existing log does not verify, InputError when detail is not canonical.
    AuditEntry append(const AgentRef& actor, std::string action, std::string target,
                      Document detail, const Clock& clock) override;

private:
    friend AuditVerdict verify_audit(const AuditLog& log);
    std::vector<std::string> lines_;
    bool unterminated_tail_ = false;
};

/// Recomputes every entry hash and chain link; reports the first bad seq.
AuditVerdict verify_audit(const AuditLog& log);

/// File-backed log with a single writer. New lines are appended to the
/// file; existing bytes are never rewritten.
class AuditLogFile final : public AuditSink {
public:
    explicit AuditLogFile(std::filesystem::path path);

    const AuditLog& log() const noexcept { return log_; }
    AuditEntry append(const AgentRef& actor, std::string action, std::string target,
                      Document detail, const Clock& clock) override;

private:
    std::filesystem::path path_;
    AuditLog log_;
};

}  // namespace mihkit::evidence
