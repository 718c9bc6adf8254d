#include "covkg/model.hpp"

#include "covkg/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace covkg {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    if (pos + len > text.size()) throw ValidationError(fmt::format("malformed timestamp '{}'", whole));
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!is_digit(text[i])) throw ValidationError(fmt::format("malformed timestamp '{}'", whole));
        value = value * 10 + (text[i] - '0');
    }
    return value;
}

Date make_date(int y, int m, int d, std::string_view whole) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw ValidationError(fmt::format("invalid calendar date '{}'", whole));
    return Date{ymd};
}

} // namespace

bool NutsCode::is_valid(std::string_view text) noexcept {
    if (text.size() < 2 || text.size() > 5) return false;
    if (!is_upper(text[0]) || !is_upper(text[1])) return false;
    for (std::size_t i = 2; i < text.size(); ++i) {
        if (!is_upper(text[i]) && !is_digit(text[i])) return false;
    }
    return true;
}

NutsCode NutsCode::parse(std::string_view text) {
    if (!is_valid(text)) throw ValidationError(fmt::format("malformed NUTS code '{}'", text));
    return NutsCode(std::string(text));
}

std::optional<NutsCode> NutsCode::try_parse(std::string_view text) noexcept {
    if (!is_valid(text)) return std::nullopt;
    return NutsCode(std::string(text));
}

std::optional<NutsCode> NutsCode::parent() const {
    if (level() == 0) return std::nullopt;
    return NutsCode(text_.substr(0, text_.size() - 1));
}

std::optional<NutsCode> NutsCode::ancestor_at(int target) const {
    if (target < 0 || target > level()) return std::nullopt;
    return NutsCode(text_.substr(0, static_cast<std::size_t>(target) + 2));
}

std::optional<NutsCode> parent_code(std::string_view code) {
    return NutsCode::parse(code).parent();
}

std::optional<NutsCode> parent_code(const NutsCode& code) {
    return code.parent();
}

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw ValidationError(fmt::format("malformed date '{}'", text));
    }
    return make_date(read_int(text, 0, 4, text), read_int(text, 5, 2, text), read_int(text, 8, 2, text), text);
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                       static_cast<unsigned>(ymd.day()));
}

Instant parse_instant(std::string_view raw) {
    std::string_view text = raw;
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw ValidationError("empty timestamp");

    if (text.size() >= 12 && std::all_of(text.begin(), text.end(), is_digit)) {
        long long millis = 0;
        std::from_chars(text.data(), text.data() + text.size(), millis);
        return std::chrono::floor<std::chrono::seconds>(
            std::chrono::sys_time<std::chrono::milliseconds>{std::chrono::milliseconds{millis}});
    }

    if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
        throw ValidationError(fmt::format("malformed timestamp '{}'", raw));
    }
    const Date day = make_date(read_int(text, 0, 4, raw), read_int(text, 5, 2, raw), read_int(text, 8, 2, raw), raw);
    Instant t{day};
    std::size_t pos = 10;
    if (pos == text.size()) return t;

    if (text[pos] != 'T' && text[pos] != ' ') throw ValidationError(fmt::format("malformed timestamp '{}'", raw));
    ++pos;
    const int hh = read_int(text, pos, 2, raw);
    pos += 2;
    if (pos >= text.size() || text[pos] != ':') throw ValidationError(fmt::format("malformed timestamp '{}'", raw));
    const int mm = read_int(text, pos + 1, 2, raw);
    pos += 3;
    int ss = 0;
    if (pos < text.size() && text[pos] == ':') {
        ss = read_int(text, pos + 1, 2, raw);
        pos += 3;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && is_digit(text[pos])) ++pos;
    }
    if (hh > 24 || mm > 59 || ss > 60) throw ValidationError(fmt::format("time out of range in '{}'", raw));
    t += std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};

    if (pos == text.size()) return t;
    if (text[pos] == 'Z' && pos + 1 == text.size()) return t;
    if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '+' ? 1 : -1;
        const int oh = read_int(text, pos + 1, 2, raw);
        std::size_t mpos = pos + 3;
        if (mpos < text.size() && text[mpos] == ':') ++mpos;
        const int om = mpos < text.size() ? read_int(text, mpos, 2, raw) : 0;
        if (mpos < text.size() && mpos + 2 != text.size()) {
            throw ValidationError(fmt::format("malformed zone offset in '{}'", raw));
        }
        return t - sign * (std::chrono::hours{oh} + std::chrono::minutes{om});
    }
    throw ValidationError(fmt::format("malformed timestamp '{}'", raw));
}

std::string format_instant(Instant t) {
    const Date day = utc_day(t);
    const auto secs = (t - Instant{day}).count();
    return fmt::format("{}T{:02}:{:02}:{:02}Z", format_date(day), secs / 3600, (secs / 60) % 60, secs % 60);
}

std::string Region::label() const {
    if (auto it = names.find("en"); it != names.end()) return it->second;
    if (!names.empty()) return names.begin()->second;
    return code.str();
}

void Region::validate() const {
    if (parent) {
        const auto expected = code.parent();
        if (!expected || *expected != *parent) {
            throw ValidationError(fmt::format("region {} has inconsistent parent {}", code.str(), parent->str()));
        }
    }
    auto non_negative = [&](const std::optional<std::int64_t>& v, const char* field) {
        if (v && *v < 0) throw ValidationError(fmt::format("region {}: negative {}", code.str(), field));
    };
    non_negative(population_total, "population total");
    non_negative(pop_le19, "population group <=19");
    non_negative(pop_20_39, "population group 20-39");
    non_negative(pop_40_59, "population group 40-59");
    non_negative(pop_ge60, "population group >=60");
    if (population_per_sq_km && *population_per_sq_km < 0) {
        throw ValidationError(fmt::format("region {}: negative population density", code.str()));
    }
    if (population_total && pop_le19 && pop_20_39 && pop_40_59 && pop_ge60) {
        const auto sum = *pop_le19 + *pop_20_39 + *pop_40_59 + *pop_ge60;
        if (sum != *population_total) {
            throw ValidationError(fmt::format("region {}: age groups sum to {} but total is {}", code.str(), sum,
                                              *population_total));
        }
    }
}

} // namespace covkg
