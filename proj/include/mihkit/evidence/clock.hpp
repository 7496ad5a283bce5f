#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace mihkit::evidence {

using TimePoint = std::chrono::sys_seconds;

/// Source of "now". Injected everywhere a timestamp is produced.
class Clock {
public:
    virtual ~Clock() = default;
    virtual TimePoint now() const = 0;
};

class SystemClock final : public Clock {
public:
    TimePoint now() const override {
        return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
    }
};

class FixedClock final : public Clock {
public:
    explicit FixedClock(TimePoint t) : t_(t) {}
    TimePoint now() const override { return t_; }

private:
    TimePoint t_;
};

/// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(TimePoint t);
/// Accepts exactly the form produced by format_rfc3339; throws InputError otherwise.
TimePoint parse_rfc3339(std::string_view text);

}  // namespace mihkit::evidence
