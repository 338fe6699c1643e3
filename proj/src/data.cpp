#include "ggbayes/data.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace ggbayes {

namespace {

constexpr std::array<double, 30> kMeeker = {275, 13,  147, 23,  181, 30,  65,  10,  300, 173,
                                            106, 300, 300, 212, 300, 300, 300, 2,   261, 293,
                                            88,  274, 28,  143, 300, 23,  300, 80,  245, 266};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::span<const double> meeker_values() { return kMeeker; }

Dataset parse_dataset(const std::string& text, const std::string& name) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool first = true;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const bool header_allowed = first;
        first = false;
        if (header_allowed && (line == "t" || line == "\"t\"")) continue;
        const std::string where = name + ":" + std::to_string(lineno);
        if (line.find(',') != std::string_view::npos) {
            throw DataError(where + ": expected a single column, got '" + std::string(line) + "'");
        }
        double v = 0.0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc() || res.ptr != line.data() + line.size()) {
            throw DataError(where + ": cannot parse '" + std::string(line) + "' as a number");
        }
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DataError(where + ": value " + std::string(line) + " is not positive");
        }
        values.push_back(v);
    }
    if (values.empty()) throw DataError(name + ": no observations");
    return Dataset(std::move(values));
}

Dataset load_dataset(const std::string& source) {
    if (source == "meeker") return Dataset(std::vector<double>(kMeeker.begin(), kMeeker.end()));
    std::ifstream f(source, std::ios::binary);
    if (!f) throw DataError("cannot open data file '" + source + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_dataset(buf.str(), source);
}

}  // namespace ggbayes
