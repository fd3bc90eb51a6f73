#include "rpr/design_io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace rpr {

namespace {

constexpr std::array<const char*, 9> kKeys = {"Rb", "alphab", "betab", "Rp", "alphap",
                                              "betap", "L1", "L2", "L3"};

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

} // namespace

RobotDesign parse_design_text(const std::string& text) {
    std::map<std::string, double> values;
    std::map<std::string, int> first_line;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#')
            continue;

        // Split "key = value" or "key value".
        size_t split = line.find_first_of("= \t");
        if (split == std::string::npos)
            throw DesignParseError(DesignParseError::Kind::Malformed, "", lineno,
                                   "design file line " + std::to_string(lineno) +
                                       ": expected `key = value`");
        const std::string key = trim(line.substr(0, split));
        std::string rest = trim(line.substr(split));
        if (!rest.empty() && rest[0] == '=')
            rest = trim(rest.substr(1));

        bool known = false;
        for (const char* k : kKeys)
            known = known || key == k;
        if (!known)
            throw DesignParseError(DesignParseError::Kind::UnknownKey, key, lineno,
                                   "design file line " + std::to_string(lineno) +
                                       ": unknown key `" + key + "`");
        if (values.count(key))
            throw DesignParseError(DesignParseError::Kind::DuplicateKey, key, lineno,
                                   "design file line " + std::to_string(lineno) +
                                       ": duplicate key `" + key + "` (first on line " +
                                       std::to_string(first_line[key]) + ")");

        double v = 0.0;
        const char* b = rest.data();
        const char* e = rest.data() + rest.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e)
            throw DesignParseError(DesignParseError::Kind::Malformed, key, lineno,
                                   "design file line " + std::to_string(lineno) +
                                       ": cannot parse value for `" + key + "`");
        values[key] = v;
        first_line[key] = lineno;
    }

    for (const char* k : kKeys)
        if (!values.count(k))
            throw DesignParseError(DesignParseError::Kind::MissingKey, k, 0,
                                   std::string("design file: missing key `") + k + "`");

    const double deg = kPi / 180.0;
    RobotDesign d;
    d.Rb = values["Rb"];
    d.alpha_b = values["alphab"] * deg;
    d.beta_b = values["betab"] * deg;
    d.Rp = values["Rp"];
    d.alpha_p = values["alphap"] * deg;
    d.beta_p = values["betap"] * deg;
    d.L = {values["L1"], values["L2"], values["L3"]};

    try {
        d.validate();
    } catch (const std::invalid_argument& ex) {
        throw DesignParseError(DesignParseError::Kind::UnitRange, "", 0,
                               std::string("design file: ") + ex.what());
    }
    return d;
}

RobotDesign parse_design(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DesignParseError(DesignParseError::Kind::Io, "", 0,
                               "cannot open design file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_design_text(buf.str());
}

} // namespace rpr
