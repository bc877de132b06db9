#include "topocp/report.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"

namespace topocp {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json real_or_null(const std::optional<double>& v) {
  if (!v) return nullptr;
  return std::stod(format_real(*v));
}

}  // namespace

void write_report(const std::vector<MetricsReport>& reports, std::ostream& os, ReportFormat format) {
  if (format == ReportFormat::csv) {
    os << "subject_id,dsc,assd_mm,bne1,hole_ratio,tp,fp,fn,fn_holes\n";
    for (const auto& r : reports) {
      os << csv_field(r.subject_id) << ',' << format_real(r.dsc) << ',' << (r.assd_mm ? format_real(*r.assd_mm) : "")
         << ',' << r.bne.bn1 << ',' << (r.hole_ratio ? format_real(*r.hole_ratio) : "") << ',' << r.counts.tp << ','
         << r.counts.fp << ',' << r.counts.fn << ',' << r.fn_holes << '\n';
    }
    return;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["subject_id"] = r.subject_id;
    j["dsc"] = std::stod(format_real(r.dsc));
    j["assd_mm"] = real_or_null(r.assd_mm);
    j["bne1"] = r.bne.bn1;
    j["hole_ratio"] = real_or_null(r.hole_ratio);
    j["tp"] = r.counts.tp;
    j["fp"] = r.counts.fp;
    j["fn"] = r.counts.fn;
    j["fn_holes"] = r.fn_holes;
    j["gt_bn1"] = r.gt_bn1;
    arr.push_back(std::move(j));
  }
  os << arr.dump(2) << '\n';
}

void write_report(const std::vector<MetricsReport>& reports, const std::string& path, ReportFormat format) {
  std::ofstream os(path);
  if (!os) throw IoError(IoErrc::open_failed, 0, path);
  write_report(reports, os, format);
  if (!os) throw IoError(IoErrc::write_failed, 0, path);
}

}  // namespace topocp
