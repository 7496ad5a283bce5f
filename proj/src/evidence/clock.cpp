#include "mihkit/evidence/clock.hpp"

#include <cstdio>

#include "mihkit/error.hpp"

namespace mihkit::evidence {

std::string format_rfc3339(TimePoint t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                  int(hms.minutes().count()), int(hms.seconds().count()));
    return buf;
}

TimePoint parse_rfc3339(std::string_view text) {
    using namespace std::chrono;
    auto fail = [&]() -> TimePoint {
        throw InputError("invalid RFC 3339 UTC timestamp '" + std::string(text) +
                         "' (expected YYYY-MM-DDTHH:MM:SSZ)");
    };
    static constexpr std::string_view kPattern = "dddd-dd-ddTdd:dd:ddZ";
    if (text.size() != kPattern.size()) return fail();
    for (std::size_t i = 0; i < text.size(); ++i) {
        const bool digit = text[i] >= '0' && text[i] <= '9';
        if (kPattern[i] == 'd' ? !digit : text[i] != kPattern[i]) return fail();
    }
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (text[i] - '0');
        return v;
    };
    const year_month_day ymd{year{num(0, 4)}, month{unsigned(num(5, 2))}, day{unsigned(num(8, 2))}};
    const int h = num(11, 2), m = num(14, 2), s = num(17, 2);
    if (!ymd.ok() || h > 23 || m > 59 || s > 59) return fail();
    return sys_days{ymd} + hours{h} + minutes{m} + seconds{s};
}

}  // namespace mihkit::evidence
