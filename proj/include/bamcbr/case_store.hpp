#pragma once

// Case bases on disk: JSON Lines, one case per line, each tagged with the
// store schema version. Positive and negative cases may share a file.

#include "bamcbr/cbr.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bamcbr {

inline constexpr int kCaseSchema = 1;

std::string emit_case(const Case& c);
/// Throws FormatError.
Case parse_case(std::string_view line);

void write_cases(const CaseBase& positive, const CaseBase& negative, std::ostream& out);
void write_cases_file(const CaseBase& positive, const CaseBase& negative, const std::string& path);

struct CaseLoad {
    std::vector<Case> cases;
    std::vector<std::string> warnings; ///< "line N: reason" per skipped line
    std::size_t skipped = 0;
};

/// Corrupt lines are skipped and reported, never fatal.
CaseLoad read_cases(std::istream& in);
/// Throws FormatError only when the file cannot be opened.
CaseLoad read_cases_file(const std::string& path);

struct CaseFilter {
    std::optional<CaseStatus> status;
    std::optional<Model> model;

    bool matches(const Case& c) const;
};

/// One block per case: id, status, solution, created_at, symptom, then the attributes.
std::string format_cases_human(const std::vector<Case>& cases);

} // namespace bamcbr
