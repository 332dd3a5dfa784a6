#include "frtpp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace frtpp {

namespace {

struct SeriesStyle {
  const char* color;
  bool dashed;
  double opacity;
};

SeriesStyle series_style(const std::string& token) {
  const std::string method = token.substr(0, token.find('-'));
  const bool stat = token.find("-stat") != std::string::npos;
  const double opacity = stat ? 0.45 : 1.0;
  if (method == "m1") return {"#1f6fd0", false, opacity};
  if (method == "m2") return {"#d03030", false, opacity};
  if (method == "m3") return {"#1f6fd0", true, opacity};
  if (method == "m4") return {"#d03030", true, opacity};
  if (method == "model") return {"#2a9440", false, 1.0};
  return {"#2a9440", true, 1.0};  // model_x
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::pair<std::string, std::string> split_token(const std::string& token) {
  const auto dash = token.find('-');
  if (dash == std::string::npos) return {token, "model"};
  return {token.substr(0, dash), token.substr(dash + 1)};
}

}  // namespace

FigureSpec figure_spec(std::string_view name, bool misspecified) {
  FigureSpec spec;
  spec.name = std::string(name);
  spec.misspecified = misspecified;
  const std::vector<std::string> frt_series = {"m1-stat", "m1-disc", "m2-stat", "m2-disc",
                                               "m3-stat", "m3-disc", "m4-stat", "m4-disc"};
  const std::vector<std::string> bayes_series = {"m1-disc", "m2-disc", "m3-disc",
                                                 "m4-disc", "model",   "model_x"};
  if (name == "fig1") {
    spec.predictiveness = "none";
    spec.series = frt_series;
  } else if (name == "fig2") {
    spec.predictiveness = "medium";
    spec.series = frt_series;
  } else if (name == "fig3") {
    spec.predictiveness = "high";
    spec.series = frt_series;
  } else if (name == "fig4") {
    spec.predictiveness = "none";
    spec.series = bayes_series;
  } else if (name == "fig5") {
    spec.predictiveness = "medium";
    spec.series = bayes_series;
  } else if (name == "fig6") {
    spec.predictiveness = "high";
    spec.series = bayes_series;
  } else {
    throw ValidationError("unknown figure: '" + std::string(name) +
                          "' (expected fig1..fig6)");
  }
  return spec;
}

ReportOutput make_report(const std::vector<RejectionSummary>& rows,
                         const FigureSpec& spec) {
  if (spec.series.empty()) throw ValidationError("figure spec selects no series");
  for (const auto& s : spec.series)
    split_token(s);  // shape check only

  // (tau, token) -> eta -> rate
  std::map<double, std::map<std::string, std::map<double, double>>> panels;
  std::set<double> etas;
  std::set<std::string> seen;
  for (const auto& row : rows) {
    if (row.predictiveness != spec.predictiveness) continue;
    if (row.misspecified != spec.misspecified) continue;
    const std::string token =
        row.kind == "model" ? row.method : row.method + "-" + row.kind;
    if (std::find(spec.series.begin(), spec.series.end(), token) == spec.series.end())
      continue;
    panels[row.tau][token][row.eta_c0] = row.rejection_rate;
    etas.insert(row.eta_c0);
    seen.insert(token);
  }
  if (seen.empty())
    throw ValidationError("requested series absent from the results (figure " + spec.name +
                          ", predictiveness=" + spec.predictiveness + ")");

  std::vector<std::string> active;
  for (const auto& s : spec.series)
    if (seen.count(s)) active.push_back(s);
  const std::vector<double> eta_values(etas.begin(), etas.end());

  // ---- text table -------------------------------------------------------
  std::string table;
  for (const auto& [tau, series_map] : panels) {
    table += "rejection rate at alpha, tau=" + format_double(tau) +
             (tau == 0.0 ? " (H0)" : " (H1)") + ", predictiveness=" + spec.predictiveness +
             (spec.misspecified ? ", misspecified" : "") + "\n";
    table += "eta_c0";
    for (const auto& s : active) {
      table += ' ';
      std::string cell = s;
      while (cell.size() < 8) cell.insert(cell.begin(), ' ');
      table += cell;
    }
    table += '\n';
    for (const double eta : eta_values) {
      std::string label = format_double(eta);
      while (label.size() < 6) label.insert(label.begin(), ' ');
      table += label;
      for (const auto& s : active) {
        table += ' ';
        std::string cell = "      NA";
        const auto it = series_map.find(s);
        if (it != series_map.end()) {
          const auto v = it->second.find(eta);
          if (v != it->second.end()) {
            cell = fmt3(v->second);
            while (cell.size() < 8) cell.insert(cell.begin(), ' ');
          }
        }
        table += cell;
      }
      table += '\n';
    }
    table += '\n';
  }

  // ---- SVG ---------------------------------------------------------------
  // Fixed 800x500 canvas, one plot panel per hypothesis present.
  const double plot_top = 110.0, plot_bottom = 460.0;
  const double x_min = eta_values.front(), x_max = eta_values.back();
  const double span = (x_max > x_min) ? (x_max - x_min) : 1.0;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  svg += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  svg += "<text x=\"400\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">rejection rate vs eta_c0 - eta_n (" +
         spec.name + ", " + spec.predictiveness +
         (spec.misspecified ? ", misspecified" : "") + ")</text>\n";

  // Legend above the panels.
  {
    const std::size_t per_row = 4;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const auto style = series_style(active[i]);
      const double lx = 70.0 + static_cast<double>(i % per_row) * 180.0;
      const double ly = 44.0 + static_cast<double>(i / per_row) * 20.0;
      svg += "<line x1=\"" + fmt2(lx) + "\" y1=\"" + fmt2(ly) + "\" x2=\"" + fmt2(lx + 26.0) +
             "\" y2=\"" + fmt2(ly) + "\" stroke=\"" + style.color + "\" stroke-width=\"2\"" +
             (style.dashed ? " stroke-dasharray=\"6 4\"" : "") + " stroke-opacity=\"" +
             fmt2(style.opacity) + "\"/>\n";
      svg += "<text x=\"" + fmt2(lx + 32.0) + "\" y=\"" + fmt2(ly + 4.0) +
             "\" font-family=\"sans-serif\" font-size=\"12\">" + active[i] + "</text>\n";
    }
  }

  const std::size_t n_panels = panels.size();
  std::size_t panel_idx = 0;
  for (const auto& [tau, series_map] : panels) {
    const double panel_w = (n_panels == 1) ? 680.0 : 330.0;
    const double left = (n_panels == 1) ? 70.0 : (70.0 + static_cast<double>(panel_idx) * 380.0);
    const double right = left + panel_w;
    auto x_px = [&](double eta) {
      return left + (eta - x_min) / span * (right - left);
    };
    auto y_px = [&](double rate) { return plot_bottom - rate * (plot_bottom - plot_top); };

    svg += "<g class=\"panel\">\n";
    svg += "<rect x=\"" + fmt2(left) + "\" y=\"" + fmt2(plot_top) + "\" width=\"" +
           fmt2(right - left) + "\" height=\"" + fmt2(plot_bottom - plot_top) +
           "\" fill=\"none\" stroke=\"#444444\"/>\n";
    svg += "<text x=\"" + fmt2((left + right) / 2.0) + "\" y=\"" + fmt2(plot_top - 10.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">tau=" +
           format_double(tau) + (tau == 0.0 ? " (H0)" : " (H1)") + "</text>\n";

    // y ticks every 0.25 plus the significance reference line.
    for (int t = 0; t <= 4; ++t) {
      const double rate = 0.25 * t;
      svg += "<line x1=\"" + fmt2(left - 4.0) + "\" y1=\"" + fmt2(y_px(rate)) + "\" x2=\"" +
             fmt2(left) + "\" y2=\"" + fmt2(y_px(rate)) + "\" stroke=\"#444444\"/>\n";
      svg += "<text x=\"" + fmt2(left - 8.0) + "\" y=\"" + fmt2(y_px(rate) + 4.0) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
             fmt2(rate) + "</text>\n";
    }
    svg += "<line class=\"alpha-ref\" x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(y_px(0.05)) +
           "\" x2=\"" + fmt2(right) + "\" y2=\"" + fmt2(y_px(0.05)) +
           "\" stroke=\"#888888\" stroke-dasharray=\"3 3\"/>\n";
    svg += "<text x=\"" + fmt2(right + 4.0) + "\" y=\"" + fmt2(y_px(0.05) + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"10\">0.05</text>\n";

    for (const double eta : eta_values) {
      svg += "<line x1=\"" + fmt2(x_px(eta)) + "\" y1=\"" + fmt2(plot_bottom) + "\" x2=\"" +
             fmt2(x_px(eta)) + "\" y2=\"" + fmt2(plot_bottom + 4.0) +
             "\" stroke=\"#444444\"/>\n";
      svg += "<text x=\"" + fmt2(x_px(eta)) + "\" y=\"" + fmt2(plot_bottom + 16.0) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
             format_double(eta) + "</text>\n";
    }
    svg += "<text x=\"" + fmt2((left + right) / 2.0) + "\" y=\"" + fmt2(plot_bottom + 32.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
           "eta_c0 - eta_n</text>\n";

    for (const auto& token : active) {
      const auto it = series_map.find(token);
      if (it == series_map.end()) continue;
      const auto style = series_style(token);
      if (it->second.size() > 1) {
        std::string points;
        for (const auto& [eta, rate] : it->second) {
          if (!points.empty()) points += ' ';
          points += fmt2(x_px(eta)) + "," + fmt2(y_px(rate));
        }
        svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + style.color +
               "\" stroke-width=\"2\"" + (style.dashed ? " stroke-dasharray=\"6 4\"" : "") +
               " stroke-opacity=\"" + fmt2(style.opacity) + "\"/>\n";
      }
      for (const auto& [eta, rate] : it->second) {
        svg += "<circle cx=\"" + fmt2(x_px(eta)) + "\" cy=\"" + fmt2(y_px(rate)) +
               "\" r=\"2.50\" fill=\"" + style.color + "\" fill-opacity=\"" +
               fmt2(style.opacity) + "\"/>\n";
      }
    }
    svg += "</g>\n";
    ++panel_idx;
  }
  svg += "</svg>\n";

  return ReportOutput{std::move(table), std::move(svg)};
}

}  // namespace frtpp
