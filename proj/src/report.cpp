#include "mhlab/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mhlab/errors.hpp"
#include "mhlab/version.hpp"

namespace mhlab {

ReportBuilder::ReportBuilder(std::uint64_t seed, nlohmann::json config_echo) {
  doc_["schema_version"] = kReportSchemaVersion;
  doc_["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  doc_["seed"] = seed;
  doc_["config_echo"] = std::move(config_echo);
  doc_["sections"] = nlohmann::json::object();
}

void ReportBuilder::add_section(const std::string& name,
                                nlohmann::json payload) {
  doc_["sections"][name] = std::move(payload);
}

void ReportBuilder::add_verdict(const std::string& id,
                                const std::string& status,
                                const std::string& detail) {
  verdicts_.push_back({id, status, detail});
}

int ReportBuilder::exit_status() const {
  bool inconclusive = false;
  for (const auto& v : verdicts_) {
    if (v.status == "fail") return 1;
    if (v.status == "inconclusive") inconclusive = true;
  }
  return inconclusive ? 3 : 0;
}

nlohmann::json ReportBuilder::finish() const {
  nlohmann::json doc = doc_;
  doc["verdicts"] = nlohmann::json::array();
  for (const auto& v : verdicts_) {
    nlohmann::json jv = {{"id", v.id}, {"status", v.status}};
    if (!v.detail.empty()) jv["detail"] = v.detail;
    doc["verdicts"].push_back(jv);
  }
  doc["exit_status"] = exit_status();
  return doc;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw numeric_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw numeric_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw numeric_error("rename failed: " + path);
}

void write_json_atomic(const std::string& path, const nlohmann::json& doc) {
  write_text_atomic(path, doc.dump(2) + "\n");
}

void write_csv_atomic(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  char buf[64];
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

}  // namespace mhlab
