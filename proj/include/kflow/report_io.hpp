#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kflow/hypersurface.hpp"
#include "kflow/imcf_flow.hpp"

namespace kflow {

/// Column order of trace CSV files.
extern const std::vector<std::string> kTraceColumns;

/// printf("%.17g"), the round-trip format used in every CSV.
std::string format_double(double value);

std::string functionals_csv_header();
std::string functionals_csv_row(const SurfaceFunctionals& f);
nlohmann::json functionals_to_json(const SurfaceFunctionals& f);
nlohmann::json deficit_to_json(const Deficit& d);

void write_trace_csv(const FlowTrace& trace, std::ostream& out);
nlohmann::json trace_to_json(const FlowTrace& trace);
nlohmann::json report_to_json(const MonitorReport& report);

/// Field values with coordinate columns (x[,y],value).
void write_field_csv(const ScalarField& field, std::ostream& out);

/// Self-contained SVG polyline chart; deterministic for fixed input.
std::string render_line_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                            const std::vector<double>& xs, const std::vector<double>& ys);

/// Writes q1.svg, area_law.svg and h_max.svg into `dir`; returns the paths.
/// Throws DomainError for an empty trace.
std::vector<std::filesystem::path> emit_plots(const FlowTrace& trace, const std::filesystem::path& dir);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace kflow
