#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipmgen/model.hpp"

namespace ipmgen {

/// ACTS system file: [System], [Parameter] and [Constraint] sections.
/// Integer ranges are written as explicit value lists; enum constants are quoted.
std::string exportActs(const Ipm& ipm);

/// PICT model file: one `Name: v1, v2, ...` line per parameter, then one
/// predicate per constraint terminated by ';'.
///
/// PICT has no implication, equivalence or arithmetic, so:
///  - a top-level `a => b` becomes `IF a THEN b;`, a nested one `(NOT (a) OR b)`;
///  - `a <=> b` becomes `((a) AND (b)) OR (NOT (a) AND NOT (b))`;
///  - an atom containing arithmetic is expanded over the values of the
///    parameters it mentions into an equivalent disjunction of `=` / `IN` tests.
std::string exportPict(const Ipm& ipm);

enum class ExportFormat { Ctwedge, Acts, Pict };

std::string_view toString(ExportFormat format);
/// Accepts "ctwedge", "acts" and "pict".
std::optional<ExportFormat> parseExportFormat(std::string_view text);
/// File suffix: ".ctw", ".acts.txt" or ".pict.txt".
std::string_view fileExtension(ExportFormat format);
std::string render(const Ipm& ipm, ExportFormat format);

/// Writes `<dir>/<model name><extension>` for each format and returns the paths.
std::vector<std::filesystem::path> writeModelFiles(const Ipm& ipm,
                                                   const std::vector<ExportFormat>& formats,
                                                   const std::filesystem::path& dir);

}  // namespace ipmgen
