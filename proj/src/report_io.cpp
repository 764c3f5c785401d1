#include "kflow/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "kflow/error.hpp"

namespace kflow {

const std::vector<std::string> kTraceColumns = {"t",  "area", "intVH", "intP",     "J",    "K",    "Q1",
                                                "Q2", "Hmin", "Hmax",  "grad_sup", "umin", "umax", "dt"};

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string functionals_csv_header() {
  return "area,intVH,intP,intVoverH,J,K,Q1,Q2,Hmin,Hmax,grad_sup,umin,umax,lambda_min,lambda_max";
}

std::string functionals_csv_row(const SurfaceFunctionals& f) {
  const double cols[] = {f.area, f.int_VH, f.int_p, f.int_V_over_H, f.J,     f.K,     f.Q1,         f.Q2,
                         f.H_min, f.H_max, f.grad_sup, f.u_min,    f.u_max, f.lambda_min, f.lambda_max};
  std::string row;
  for (double c : cols) {
    if (!row.empty()) row += ',';
    row += format_double(c);
  }
  return row;
}

nlohmann::json functionals_to_json(const SurfaceFunctionals& f) {
  return {{"area", f.area},   {"intVH", f.int_VH},   {"intP", f.int_p},       {"intVoverH", f.int_V_over_H},
          {"J", f.J},         {"K", f.K},            {"Q1", f.Q1},            {"Q2", f.Q2},
          {"Hmin", f.H_min},  {"Hmax", f.H_max},     {"grad_sup", f.grad_sup}, {"umin", f.u_min},
          {"umax", f.u_max},  {"lambda_min", f.lambda_min}, {"lambda_max", f.lambda_max}};
}

nlohmann::json deficit_to_json(const Deficit& d) { return {{"value", d.value}, {"scale", d.scale}}; }

void write_trace_csv(const FlowTrace& trace, std::ostream& out) {
  for (std::size_t c = 0; c < kTraceColumns.size(); ++c) out << (c ? "," : "") << kTraceColumns[c];
  out << '\n';
  for (const auto& s : trace.samples) {
    const auto& f = s.f;
    const double cols[] = {s.t,  f.area,  f.int_VH, f.int_p,    f.J,     f.K,     f.Q1,
                           f.Q2, f.H_min, f.H_max,  f.grad_sup, f.u_min, f.u_max, s.dt};
    for (std::size_t c = 0; c < std::size(cols); ++c) out << (c ? "," : "") << format_double(cols[c]);
    out << '\n';
  }
}

nlohmann::json trace_to_json(const FlowTrace& trace) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : trace.samples) {
    nlohmann::json row = functionals_to_json(s.f);
    row["t"] = s.t;
    row["dt"] = s.dt;
    samples.push_back(std::move(row));
  }
  double dt_min = 0.0, dt_max = 0.0;
  if (!trace.dt_history.empty()) {
    const auto [lo, hi] = std::minmax_element(trace.dt_history.begin(), trace.dt_history.end());
    dt_min = *lo;
    dt_max = *hi;
  }
  return {{"n", trace.n},
          {"kappa", trace.kappa},
          {"m", trace.m},
          {"theta", trace.theta},
          {"rho0", trace.rho0},
          {"steps", trace.dt_history.size()},
          {"rejected_steps", trace.rejected_steps},
          {"dt_min", dt_min},
          {"dt_max", dt_max},
          {"samples", std::move(samples)}};
}

nlohmann::json report_to_json(const MonitorReport& report) {
  nlohmann::json monitors = nlohmann::json::object();
  for (const auto& m : report.monitors) {
    monitors[m.name] = {{"asserted", m.asserted}, {"passed", m.passed},   {"value", m.value},
                        {"tolerance", m.tolerance}, {"flagged", m.flagged}, {"detail", m.detail}};
  }
  return {{"passed", report.all_passed()}, {"monitors", std::move(monitors)}};
}

void write_field_csv(const ScalarField& field, std::ostream& out) {
  const BaseGrid& g = *field.grid;
  const bool two_d = g.mode == GridMode::torus2d;
  out << (two_d ? "x,y,value\n" : "x,value\n");
  for (std::size_t i = 0; i < field.size(); ++i) {
    out << format_double(g.x[i]) << ',';
    if (two_d) out << format_double(g.y[i]) << ',';
    out << format_double(field[i]) << '\n';
  }
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_line_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                            const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || xs.size() != ys.size()) throw DomainError("plot needs matching, non-empty series");
  constexpr double width = 640, height = 400, left = 80, right = 20, top = 40, bottom = 50;
  double x0 = *std::min_element(xs.begin(), xs.end()), x1 = *std::max_element(xs.begin(), xs.end());
  double y0 = *std::min_element(ys.begin(), ys.end()), y1 = *std::max_element(ys.begin(), ys.end());
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 - y0 <= 1e-12 * std::max(1.0, std::abs(y0))) {
    const double pad = std::max(1e-12, 1e-6 * std::abs(y0));
    y0 -= pad;
    y1 += pad;
  }
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape_xml(title) << "</text>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double yv = y0 + (y1 - y0) * k / 4.0, xv = x0 + (x1 - x0) * k / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(yv) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(yv).substr(0, 10)
        << "</text>\n";
    svg << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(xv).substr(0, 8)
        << "</text>\n";
  }
  svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(y_label)
      << "</text>\n";
  svg << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) svg << (i ? " " : "") << fixed(px(xs[i])) << ',' << fixed(py(ys[i]));
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<std::filesystem::path> emit_plots(const FlowTrace& trace, const std::filesystem::path& dir) {
  if (trace.samples.empty()) throw DomainError("cannot plot an empty trace");
  std::vector<double> t, q1, area, hmax;
  const double a0 = trace.samples.front().f.area;
  for (const auto& s : trace.samples) {
    t.push_back(s.t);
    q1.push_back(s.f.Q1);
    area.push_back(std::log(s.f.area / a0) - s.t);
    hmax.push_back(s.f.H_max);
  }
  std::vector<std::filesystem::path> paths = {dir / "q1.svg", dir / "area_law.svg", dir / "h_max.svg"};
  write_text_file(paths[0], render_line_svg("Q1 along the flow", "t", "Q1", t, q1));
  write_text_file(paths[1], render_line_svg("area law residual", "t", "log(|S_t|/|S_0|) - t", t, area));
  write_text_file(paths[2], render_line_svg("maximum mean curvature", "t", "H_max", t, hmax));
  return paths;
}

}  // namespace kflow
