#pragma once

// Text format for circuits. One statement per line, '#' starts a comment:
//
//   init 0|1|+x|-x            (optional, at most once, before any other step)
//   gate H
//   measure eta theta=FLOAT   (0 <= theta <= pi/4, radians)
//   measure projective z|x

#include <charconv>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "retroscope/error.hpp"
#include "retroscope/interferometer.hpp"
#include "retroscope/measurement.hpp"

namespace retroscope {

namespace detail {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

inline std::vector<Token> split_line(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size() || line[i] == '#') break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') ++i;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

inline std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

// Slack for theta values written with ten or so digits of pi/4.
inline constexpr double kThetaSlack = 1e-9;

}  // namespace detail

inline CircuitDescription parse_circuit(std::string_view text) {
    CircuitDescription c;
    bool seen_init = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const auto tok = detail::split_line(line);
        if (tok.empty()) continue;

        auto fail = [&](const detail::Token& t, const std::string& msg) -> ParseError {
            return ParseError(line_no, t.column, msg);
        };
        auto expect_count = [&](std::size_t n) {
            if (tok.size() > n) throw fail(tok[n], "unexpected '" + std::string(tok[n].text) + "'");
            if (tok.size() < n) {
                const auto& last = tok.back();
                throw ParseError(line_no, last.column + last.text.size(), "missing argument after '" +
                                                                           std::string(last.text) + "'");
            }
        };

        const std::string_view kw = tok[0].text;
        if (kw == "init") {
            if (seen_init) throw fail(tok[0], "duplicate init");
            if (!c.steps.empty()) throw fail(tok[0], "init must come before any gate or measurement");
            expect_count(2);
            const std::string_view s = tok[1].text;
            if (s == "0") c.initial = states::zero();
            else if (s == "1") c.initial = states::one();
            else if (s == "+x") c.initial = states::plus_x();
            else if (s == "-x") c.initial = states::minus_x();
            else throw fail(tok[1], "unknown initial state '" + std::string(s) + "' (expected 0, 1, +x or -x)");
            c.initial_label = std::string(s);
            seen_init = true;
        } else if (kw == "gate") {
            expect_count(2);
            if (tok[1].text != "H") throw fail(tok[1], "unknown gate '" + std::string(tok[1].text) + "'");
            c.steps.emplace_back(GateStep::hadamard());
        } else if (kw == "measure") {
            if (tok.size() < 2) expect_count(2);
            const std::string_view kind = tok[1].text;
            if (kind == "eta") {
                expect_count(3);
                constexpr std::string_view prefix = "theta=";
                const std::string_view arg = tok[2].text;
                if (arg.substr(0, prefix.size()) != prefix) throw fail(tok[2], "expected theta=FLOAT");
                const std::string_view num = arg.substr(prefix.size());
                const detail::Token at{num, tok[2].column + prefix.size()};
                double theta = 0.0;
                const auto r = std::from_chars(num.data(), num.data() + num.size(), theta);
                if (num.empty() || r.ec != std::errc() || r.ptr != num.data() + num.size() || !std::isfinite(theta))
                    throw fail(at, "malformed number '" + std::string(num) + "'");
                if (theta < 0.0 || theta > kQuarterPi + detail::kThetaSlack)
                    throw fail(at, "theta out of range [0, 0.7853981634]");
                c.steps.emplace_back(MeasureStep::eta(std::min(theta, kQuarterPi)));
            } else if (kind == "projective") {
                expect_count(3);
                if (tok[2].text == "z") c.steps.emplace_back(MeasureStep::projective_z());
                else if (tok[2].text == "x") c.steps.emplace_back(MeasureStep::projective_x());
                else throw fail(tok[2], "unknown projective basis '" + std::string(tok[2].text) + "' (expected z or x)");
            } else {
                throw fail(tok[1], "unknown measurement '" + std::string(kind) + "'");
            }
        } else {
            throw fail(tok[0], "unknown keyword '" + std::string(kw) + "'");
        }
        if (end == text.size()) break;
    }
    return c;
}

/// Canonical text: explicit init line, one statement per line, shortest
/// round-trip theta. Circuits with custom states, gates or measurements have
/// no textual form.
inline std::string print_circuit(const CircuitDescription& c) {
    const std::string& init = c.initial_label;
    if (init != "0" && init != "1" && init != "+x" && init != "-x")
        throw std::invalid_argument("circuit has no textual form: custom initial state");
    std::string out = "init " + init + "\n";
    for (const auto& s : c.steps) {
        if (const auto* g = std::get_if<GateStep>(&s)) {
            if (g->name != "H") throw std::invalid_argument("circuit has no textual form: gate " + g->name);
            out += "gate H\n";
            continue;
        }
        const auto& m = std::get<MeasureStep>(s);
        switch (m.kind) {
            case MeasureKind::Eta: out += "measure eta theta=" + detail::format_double(m.theta) + "\n"; break;
            case MeasureKind::ProjectiveZ: out += "measure projective z\n"; break;
            case MeasureKind::ProjectiveX: out += "measure projective x\n"; break;
            case MeasureKind::Custom: throw std::invalid_argument("circuit has no textual form: custom measurement");
        }
    }
    return out;
}

}  // namespace retroscope
