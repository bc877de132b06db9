#pragma once

// Metrics report serialization. Field order: subject_id, dsc, assd_mm,
// bne1, hole_ratio, tp, fp, fn, fn_holes (JSON adds gt_bn1). Reals carry 6
// significant digits; undefined values are empty CSV cells / JSON null.

#include <iosfwd>
#include <string>
#include <vector>

#include "topocp/metrics.hpp"

namespace topocp {

enum class ReportFormat { json, csv };

void write_report(const std::vector<MetricsReport>& reports, std::ostream& os, ReportFormat format);
void write_report(const std::vector<MetricsReport>& reports, const std::string& path, ReportFormat format);

/// "%.6g" formatting used for every real in the reports.
std::string format_real(double v);

}  // namespace topocp
