#include "bamcbr/case_store.hpp"

#include "bamcbr/errors.hpp"
#include "bamcbr/json_io.hpp"

#include <fstream>
#include <sstream>

namespace bamcbr {

using nlohmann::json;

std::string emit_case(const Case& c) {
    json j = c;
    j["schema"] = kCaseSchema;
    return j.dump();
}

Case parse_case(std::string_view line) {
    try {
        const json j = json::parse(line);
        const int schema = j.at("schema").get<int>();
        if (schema != kCaseSchema) throw FormatError("unsupported case schema " + std::to_string(schema));
        return j.get<Case>();
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(e.what());
    }
}

void write_cases(const CaseBase& positive, const CaseBase& negative, std::ostream& out) {
    for (const auto& c : positive.entries()) out << emit_case(c) << '\n';
    for (const auto& c : negative.entries()) out << emit_case(c) << '\n';
}

void write_cases_file(const CaseBase& positive, const CaseBase& negative, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_cases(positive, negative, out);
    if (!out) throw std::runtime_error("write failed for " + path);
}

CaseLoad read_cases(std::istream& in) {
    CaseLoad load;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            load.cases.push_back(parse_case(line));
        } catch (const FormatError& e) {
            ++load.skipped;
            load.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return load;
}

CaseLoad read_cases_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path);
    return read_cases(in);
}

bool CaseFilter::matches(const Case& c) const {
    if (status && c.status != *status) return false;
    if (model && c.solution != *model) return false;
    return true;
}

namespace {

void print_attributes(std::ostringstream& out, const AttributeMap& attrs) {
    for (const auto& [name, a] : attrs) {
        out << "    " << name << " = ";
        if (a.kind() == AttributeKind::Categorical)
            out << a.text();
        else
            out << a.number();
        out << '\n';
    }
}

} // namespace

std::string format_cases_human(const std::vector<Case>& cases) {
    std::ostringstream out;
    for (const auto& c : cases) {
        out << "case " << c.id << "  " << to_string(c.status) << "  solution " << to_string(c.solution)
            << "  created " << c.created_at << "s  symptom " << (c.problem.symptom.empty() ? "-" : c.problem.symptom)
            << '\n';
        print_attributes(out, c.problem.contextual);
        print_attributes(out, c.problem.measurements);
    }
    return out.str();
}

} // namespace bamcbr
