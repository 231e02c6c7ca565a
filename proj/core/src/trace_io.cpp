#include "femtoq/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace femtoq {

namespace {

constexpr std::string_view kHeader =
    "schema_version,iteration,subcarrier,agent,state,action,reward,C_o,C_i,shared_entries";

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_field(std::string_view f, std::size_t line_no)
{
    T v{};
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || p != f.data() + f.size()) {
        throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": bad field '" + std::string(f) + "'");
    }
    return v;
}

}  // namespace

std::string format_number(double v)
{
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf, p);
}

void write_trace_csv(std::ostream& os, const RunTrace& trace, std::size_t first_iteration)
{
    os << kHeader << '\n';
    std::string line;
    char buf[32];
    auto put = [&](auto v) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        if (ec != std::errc{}) throw std::runtime_error("trace csv: number conversion failed");
        line.append(buf, p);
        line += ',';
    };
    for (std::size_t t = 0; t < trace.size(); ++t) {
        const auto& rec = trace.iterations[t];
        line.clear();
        for (std::size_t n = 0; n < trace.n_sub; ++n) {
            for (std::size_t i = 0; i < trace.n_femto; ++i) {
                const auto& st = trace.step(t, i, n);
                put(kTraceSchemaVersion);
                put(first_iteration + t);
                put(n);
                put(i);
                put(unsigned{st.state});
                put(unsigned{st.action});
                put(st.reward);
                put(rec.macro_capacity[n]);
                put(st.femto_capacity);
                put(rec.shared_entries);
                line.back() = '\n';
            }
        }
        os << line;
    }
}

std::string trace_to_csv(const RunTrace& trace, std::size_t first_iteration)
{
    std::ostringstream os;
    write_trace_csv(os, trace, first_iteration);
    return os.str();
}

RunTrace read_trace_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kHeader) throw std::runtime_error("trace csv: unexpected header");

    struct Row {
        std::size_t t, n, i;
        AgentStep step;
        double c_o;
        std::uint64_t shared;
    };
    std::vector<Row> rows;
    std::size_t min_t = SIZE_MAX, max_t = 0, max_n = 0, max_i = 0;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 10) throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": expected 10 fields");
        if (parse_field<int>(f[0], line_no) != kTraceSchemaVersion) {
            throw std::runtime_error("trace csv: unsupported schema_version");
        }
        Row r{};
        r.t = parse_field<std::size_t>(f[1], line_no);
        r.n = parse_field<std::size_t>(f[2], line_no);
        r.i = parse_field<std::size_t>(f[3], line_no);
        r.step.state = static_cast<std::uint8_t>(parse_field<unsigned>(f[4], line_no));
        r.step.action = static_cast<std::uint8_t>(parse_field<unsigned>(f[5], line_no));
        r.step.reward = parse_field<double>(f[6], line_no);
        r.c_o = parse_field<double>(f[7], line_no);
        r.step.femto_capacity = parse_field<double>(f[8], line_no);
        r.shared = parse_field<std::uint64_t>(f[9], line_no);
        min_t = std::min(min_t, r.t);
        max_t = std::max(max_t, r.t);
        max_n = std::max(max_n, r.n);
        max_i = std::max(max_i, r.i);
        rows.push_back(r);
    }
    RunTrace trace;
    if (rows.empty()) return trace;
    trace.n_femto = max_i + 1;
    trace.n_sub = max_n + 1;
    const std::size_t length = max_t - min_t + 1;
    if (rows.size() != length * trace.n_femto * trace.n_sub) {
        throw std::runtime_error("trace csv: rows do not form a complete iteration x subcarrier x agent grid");
    }
    trace.iterations.resize(length);
    for (auto& rec : trace.iterations) {
        rec.macro_capacity.assign(trace.n_sub, 0.0);
        rec.femto_total.assign(trace.n_femto, 0.0);
        rec.steps.resize(trace.n_femto * trace.n_sub);
    }
    for (const auto& r : rows) {
        auto& rec = trace.iterations[r.t - min_t];
        rec.macro_capacity[r.n] = r.c_o;
        rec.steps[r.i * trace.n_sub + r.n] = r.step;
        rec.femto_total[r.i] += r.step.femto_capacity;
        rec.shared_entries = r.shared;
    }
    return trace;
}

}  // namespace femtoq
