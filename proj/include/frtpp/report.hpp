#pragma once

#include <string>
#include <vector>

#include "frtpp/model.hpp"

namespace frtpp {

/// Which slice of a results CSV to draw and how to label it. Panels are the
/// hypotheses (H0 left, H1 right); each series is one method token plotted
/// against eta_c0 - eta_n with the fixed line-style legend:
/// m1 solid blue, m2 solid red, m3 dashed blue, m4 dashed red,
/// model solid green, model_x dashed green; stat series render at reduced
/// opacity next to their disc counterparts.
struct FigureSpec {
  std::string name;
  std::string predictiveness;
  bool misspecified = false;
  std::vector<std::string> series;  // method tokens, draw order
};

/// Built-in analogs: fig1/fig2/fig3 show the eight randomization tests at
/// none/medium/high predictiveness; fig4/fig5/fig6 show the four discrepancy
/// tests plus the two posterior-credible tests. `misspecified` selects which
/// rows the fig4-6 analogs read.
FigureSpec figure_spec(std::string_view name, bool misspecified = false);

struct ReportOutput {
  std::string table;  // aligned text, one block per hypothesis panel
  std::string svg;    // 800x500 document, byte-stable for identical inputs
};

/// Renders the slice selected by the figure spec. Throws ValidationError when
/// the spec has no series or none of them appear in the rows.
ReportOutput make_report(const std::vector<RejectionSummary>& rows,
                         const FigureSpec& spec);

}  // namespace frtpp
