#include "bamcbr/report.hpp"

#include "bamcbr/errors.hpp"
#include "bamcbr/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bamcbr {

using nlohmann::json;

namespace {

json header_record(const SimulationReport& r) {
    return {{"record", "header"},
            {"format", kReportFormat},
            {"label", r.label},
            {"seed", r.seed},
            {"schedule_hash", r.schedule_hash},
            {"config_hash", r.config_hash},
            {"mode", {{"kind", std::string(to_string(r.mode.kind))}, {"model", std::string(to_string(r.mode.model))}}},
            {"repetitions", r.repetitions},
            {"repetition_length", r.repetition_length},
            {"classes", r.class_names}};
}

json summary_record(const SimulationReport& r) {
    return {{"record", "summary"},
            {"totals", r.totals},
            {"active_at_end", r.active_at_end},
            {"triggers", r.triggers},
            {"cases",
             {{"positive", r.cases.positive},
              {"negative", r.cases.negative},
              {"engine", r.cases.engine},
              {"retained_per_repetition", r.cases.retained_per_repetition}}}};
}

template <class T>
json tagged(const char* tag, const T& value) {
    json j = value;
    j["record"] = tag;
    return j;
}

void read_header(const json& j, SimulationReport& r) {
    const int format = j.at("format").get<int>();
    if (format != kReportFormat) throw FormatError("unsupported report format " + std::to_string(format));
    j.at("label").get_to(r.label);
    j.at("seed").get_to(r.seed);
    j.at("schedule_hash").get_to(r.schedule_hash);
    j.at("config_hash").get_to(r.config_hash);
    r.mode.kind = parse_run_kind(j.at("mode").at("kind").get<std::string>());
    r.mode.model = parse_model(j.at("mode").at("model").get<std::string>());
    j.at("repetitions").get_to(r.repetitions);
    j.at("repetition_length").get_to(r.repetition_length);
    j.at("classes").get_to(r.class_names);
}

void read_summary(const json& j, SimulationReport& r) {
    j.at("totals").get_to(r.totals);
    j.at("active_at_end").get_to(r.active_at_end);
    j.at("triggers").get_to(r.triggers);
    const json& c = j.at("cases");
    c.at("positive").get_to(r.cases.positive);
    c.at("negative").get_to(r.cases.negative);
    c.at("engine").get_to(r.cases.engine);
    c.at("retained_per_repetition").get_to(r.cases.retained_per_repetition);
}

std::string pad(const std::string& s, std::size_t width, bool right) {
    if (s.size() >= width) return s;
    const std::string fill(width - s.size(), ' ');
    return right ? fill + s : s + fill;
}

} // namespace

void write_report(const SimulationReport& r, std::ostream& out) {
    out << header_record(r).dump() << '\n';
    for (const auto& w : r.windows) out << tagged("window", w).dump() << '\n';
    for (const auto& t : r.timeline) out << tagged("timeline", t).dump() << '\n';
    for (const auto& c : r.control) out << tagged("control", c).dump() << '\n';
    for (const auto& e : r.events) out << tagged("event", e).dump() << '\n';
    for (std::size_t i = 0; i < r.repetition_counters.size(); ++i) {
        json rep = {{"record", "repetition"}, {"repetition", i}, {"counters", r.repetition_counters[i]}};
        if (i < r.cases.retained_per_repetition.size()) rep["retained"] = r.cases.retained_per_repetition[i];
        out << rep.dump() << '\n';
    }
    out << summary_record(r).dump() << '\n';
}

std::string emit_report(const SimulationReport& report) {
    std::ostringstream out;
    write_report(report, out);
    return out.str();
}

void write_report_file(const SimulationReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_report(report, out);
    if (!out) throw std::runtime_error("write failed for " + path);
}

SimulationReport parse_report(std::string_view text) {
    SimulationReport r;
    bool header = false;
    bool summary = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t nl = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            const json j = json::parse(line);
            const std::string kind = j.at("record").get<std::string>();
            if (kind != "header" && !header) throw FormatError("record before header");
            if (summary) throw FormatError("record after summary");
            if (kind == "header") {
                if (header) throw FormatError("second header");
                read_header(j, r);
                header = true;
            } else if (kind == "window") {
                r.windows.push_back(j.get<WindowRecord>());
            } else if (kind == "timeline") {
                r.timeline.push_back(j.get<TimelineEntry>());
            } else if (kind == "control") {
                r.control.push_back(j.get<ControlRecord>());
            } else if (kind == "event") {
                r.events.push_back(j.get<LinkEvent>());
            } else if (kind == "repetition") {
                r.repetition_counters.push_back(j.at("counters").get<MetricCounters>());
            } else if (kind == "summary") {
                read_summary(j, r);
                summary = true;
            } else {
                throw FormatError("unknown record '" + kind + "'");
            }
        } catch (const std::exception& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header) throw FormatError("missing header record");
    if (!summary) throw FormatError("missing summary record");
    return r;
}

SimulationReport read_report_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_report(buf.str());
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

ComparisonReport compare_reports(std::span<const SimulationReport> reports, bool by_repetition) {
    if (reports.empty() || (reports.size() < 2 && !by_repetition))
        throw ComparabilityError("comparison needs at least two reports");
    const SimulationReport& first = reports.front();
    for (const auto& r : reports) {
        if (r.schedule_hash != first.schedule_hash)
            throw ComparabilityError("schedule mismatch: '" + first.label + "' has " + first.schedule_hash + ", '" +
                                     r.label + "' has " + r.schedule_hash);
    }

    ComparisonReport cmp;
    cmp.schedule_hash = first.schedule_hash;
    cmp.seed = first.seed;
    cmp.repetitions = first.repetitions;
    cmp.repetition_length = first.repetition_length;
    cmp.by_repetition = by_repetition;
    auto row_of = [](std::string label, const MetricCounters& c, const std::string& hash) {
        return ComparisonRow{std::move(label), c.total_preemption(), c.total_devolution(), c.total_blocking(),
                             c.total_unbroken(),  hash};
    };
    for (const auto& r : reports) {
        if (!by_repetition) {
            cmp.rows.push_back(row_of(r.label, r.totals, r.config_hash));
            continue;
        }
        const auto reps = split_by_repetition(r);
        for (const auto& s : reps) {
            const std::string label =
                r.label + " " + std::to_string(s.repetition + 1) + "/" + std::to_string(r.repetitions);
            cmp.rows.push_back(row_of(label, s.counters, r.config_hash));
        }
    }
    return cmp;
}

std::string format_comparison_human(const ComparisonReport& cmp) {
    const std::vector<std::string> head{"", "Preemption", "Devolution", "Blocking", "Unbroken"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : cmp.rows)
        cells.push_back({row.label, std::to_string(row.preemption), std::to_string(row.devolution),
                         std::to_string(row.blocking), std::to_string(row.unbroken)});
    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
        for (const auto& r : cells) width[c] = std::max(width[c], r[c].size());
    }
    std::ostringstream out;
    out << "schedule " << cmp.schedule_hash << "  seed " << cmp.seed << "  " << cmp.repetitions << " x "
        << cmp.repetition_length << " s\n";
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c) out << "  ";
            out << pad(r[c], width[c], c > 0);
        }
        out << '\n';
    };
    line(head);
    for (const auto& r : cells) line(r);
    return out.str();
}

json comparison_to_json(const ComparisonReport& cmp) {
    json rows = json::array();
    for (const auto& r : cmp.rows)
        rows.push_back({{"label", r.label},
                        {"preemption", r.preemption},
                        {"devolution", r.devolution},
                        {"blocking", r.blocking},
                        {"unbroken", r.unbroken},
                        {"config_hash", r.config_hash}});
    return {{"schedule_hash", cmp.schedule_hash},
            {"seed", cmp.seed},
            {"repetitions", cmp.repetitions},
            {"repetition_length", cmp.repetition_length},
            {"by_repetition", cmp.by_repetition},
            {"rows", rows}};
}

ComparisonReport comparison_from_json(const json& doc) {
    try {
        ComparisonReport cmp;
        doc.at("schedule_hash").get_to(cmp.schedule_hash);
        doc.at("seed").get_to(cmp.seed);
        doc.at("repetitions").get_to(cmp.repetitions);
        doc.at("repetition_length").get_to(cmp.repetition_length);
        doc.at("by_repetition").get_to(cmp.by_repetition);
        for (const auto& r : doc.at("rows")) {
            ComparisonRow row;
            r.at("label").get_to(row.label);
            r.at("preemption").get_to(row.preemption);
            r.at("devolution").get_to(row.devolution);
            r.at("blocking").get_to(row.blocking);
            r.at("unbroken").get_to(row.unbroken);
            r.at("config_hash").get_to(row.config_hash);
            cmp.rows.push_back(std::move(row));
        }
        return cmp;
    } catch (const json::exception& e) {
        throw FormatError(e.what());
    }
}

std::string format_run_human(const SimulationReport& r) {
    std::ostringstream out;
    const auto& t = r.totals;
    out << r.label << "  seed " << r.seed << "  schedule " << r.schedule_hash << "  config " << r.config_hash << '\n';
    out << "  arrivals " << t.total_arrivals() << "  established " << t.total_established() << "  blocking "
        << t.total_blocking() << "  preemption " << t.total_preemption() << "  devolution " << t.total_devolution()
        << "  unbroken " << t.total_unbroken() << "  active at end " << r.active_at_end << '\n';
    out << "  timeline";
    for (const auto& e : r.timeline) out << "  " << e.time << "s " << to_string(e.model) << " (" << e.cause << ")";
    out << '\n';
    if (r.mode.kind == RunKind::Cognitive) {
        const auto& s = r.cases.engine;
        out << "  triggers reactive " << r.triggers.reactive_fired << " (+" << r.triggers.reactive_suppressed
            << " suppressed)  proactive " << r.triggers.proactive_fired << " (+" << r.triggers.proactive_suppressed
            << " suppressed)\n";
        out << "  cases positive " << r.cases.positive << "  negative " << r.cases.negative << "  cycles "
            << s.cycles << "  hits " << s.hits << "  misses " << s.misses << "  inconclusive " << s.inconclusive
            << '\n';
        out << "  retained per repetition";
        for (auto n : r.cases.retained_per_repetition) out << ' ' << n;
        out << '\n';
    }
    return out.str();
}

} // namespace bamcbr
